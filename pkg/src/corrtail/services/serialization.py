import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Type, TypeVar

from graphviz import Digraph
from pydantic import BaseModel, ValidationError
from sympy.polys.matrices import DomainMatrix

from ..schemas.schema import OMEGA, CKRep, Graph, HomSpec, RationalMatrix, VertexSet
from .errors import CorrtailError
from .graph_core import canonical_graph, require_valid

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)

# Reading input
def read_text(path: str) -> str:
    source = Path(path)
    if not source.is_file():
        raise CorrtailError(status_code=404, detail=f"Input file not found: {path}")
    return source.read_text(encoding="utf-8")

def parse_model(model: Type[ModelT], text: str, what: str) -> ModelT:
    try:
        return model.model_validate(json.loads(text))
    except json.JSONDecodeError as e:
        raise CorrtailError(status_code=400, detail=f"Malformed JSON in {what}: {e.msg} at line {e.lineno}")
    except ValidationError as e:
        raise CorrtailError(status_code=400, detail=f"Invalid {what}: {e.errors(include_url=False)}")

def load_graph(text: str) -> Graph:
    g = parse_model(Graph, text, "graph")
    require_valid(g)
    return g

def load_vertex_set(text: str) -> VertexSet:
    return parse_model(VertexSet, text, "vertex set")

def load_hom_spec(text: str) -> HomSpec:
    return parse_model(HomSpec, text, "homomorphism")

def read_graph(path: str) -> Graph:
    return load_graph(read_text(path))

def read_vertex_set(path: Optional[str]) -> Optional[VertexSet]:
    return load_vertex_set(read_text(path)) if path else None

# Writing output
def dump_json(data: Any) -> str:
    if isinstance(data, BaseModel):
        data = data.model_dump(mode="json")
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

def graph_to_json(g: Graph) -> str:
    """Canonical JSON: vertices, edges and tails sorted by id."""
    return dump_json(canonical_graph(g))

def write_text(text: str, path: Optional[str]) -> None:
    if path is None:
        print(text, end="")
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")

# DOT export
def _edge_label(edge) -> str:
    if edge.mult == OMEGA:
        return "ω"
    if edge.mult > 1:
        return f"{edge.id} x{edge.mult}"
    return edge.id

def graph_to_dot(g: Graph, name: str = "E") -> str:
    g = canonical_graph(g)
    dot = Digraph(name=name)
    for v in g.vertices:
        dot.node(v, v)
    for e in g.edges:
        dot.edge(e.src, e.rng, label=_edge_label(e))

    # a ray is drawn as two chain vertices and an ellipsis; node names avoid ":" (graphviz port syntax)
    for t in g.tails:
        first, second, rest = f"{t.id}_1", f"{t.id}_2", f"{t.id}_more"
        dot.node(first, first, shape="circle", style="dashed")
        dot.node(second, second, shape="circle", style="dashed")
        dot.node(rest, "...", shape="plaintext")
        dot.edge(t.attach, first)
        dot.edge(first, second)
        dot.edge(second, rest)
    return dot.source

def cmd_export(g: Graph, fmt: str) -> str:
    if fmt == "json":
        return graph_to_json(g)
    if fmt == "dot":
        return graph_to_dot(g)
    raise CorrtailError(status_code=400, detail=f"Unknown export format: {fmt}")

# Matrices
def matrix_to_pairs(m: DomainMatrix) -> RationalMatrix:
    size = m.shape[0]
    rows = [[(0, 1)] * size for _ in range(size)]
    for (i, j), value in m.to_dok().items():
        if value:
            rows[i][j] = (int(value.numerator), int(value.denominator))
    return rows

def rep_to_dict(rep: CKRep) -> Dict[str, Any]:
    return {
        "graph": canonical_graph(rep.graph).model_dump(mode="json"),
        "relative": rep.relative.model_dump(mode="json"),
        "basis": list(rep.basis),
        "degrees": list(rep.grading.degree),
        "projections": {v: matrix_to_pairs(m) for v, m in sorted(rep.projections.items())},
        "isometries": {c: matrix_to_pairs(m) for c, m in sorted(rep.isometries.items())},
    }
