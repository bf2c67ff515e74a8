import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Union

import networkx as nx

from ..schemas.schema import (
    OMEGA,
    Edge,
    Graph,
    Multiplicity,
    PropertyTable,
    Tail,
    ValidationReport,
    VertexClass,
    VertexSet,
    VertexTag,
    Violation,
)
from .errors import CorrtailError

logger = logging.getLogger(__name__)

# Degree helpers
def total_multiplicity(edges: Iterable[Edge]) -> Union[int, Multiplicity]:
    """Exact sum of multiplicities, 0 for no edges; a single omega edge makes it omega."""
    total = 0
    for e in edges:
        if e.mult == OMEGA:
            return OMEGA
        total += e.mult
    return total

def out_edges(g: Graph, v: str) -> List[Edge]:
    return [e for e in g.edges if e.src == v]

def in_edges(g: Graph, v: str) -> List[Edge]:
    return [e for e in g.edges if e.rng == v]

def tail_at(g: Graph, v: str) -> Optional[Tail]:
    for tail in g.tails:
        if tail.attach == v:
            return tail
    return None

def out_degree(g: Graph, v: str) -> Union[int, Multiplicity]:
    """|s^-1(v)| counted with multiplicity; an attached ray adds its first edge."""
    degree = total_multiplicity(out_edges(g, v))
    if degree != OMEGA and tail_at(g, v) is not None:
        degree += 1
    return degree

def successors(g: Graph, v: str) -> Set[str]:
    return {e.rng for e in g.edges if e.src == v}

def edge_copies(edge: Edge) -> List[str]:
    """Labels of the parallel copies of an edge, used as basis letters."""
    if edge.mult == OMEGA:
        raise CorrtailError(status_code=422, detail=f"Edge {edge.id} has multiplicity omega and no finite copies")
    if edge.mult == 1:
        return [edge.id]
    return [f"{edge.id}#{c}" for c in range(1, edge.mult + 1)]

def all_ids(g: Graph) -> Set[str]:
    return set(g.vertices) | {e.id for e in g.edges} | {t.id for t in g.tails}

# Validation
def validate_graph(g: Graph) -> ValidationReport:
    violations: List[Violation] = []

    declared: Set[str] = set()
    for v in g.vertices:
        if v in declared:
            violations.append(Violation(code="duplicate vertex", detail=f"Vertex {v} is declared twice"))
        declared.add(v)

    edge_ids: Set[str] = set()
    for e in g.edges:
        if e.id in edge_ids:
            violations.append(Violation(code="duplicate edge id", detail=f"Edge id {e.id} is used twice"))
        edge_ids.add(e.id)
        if e.src not in declared:
            violations.append(Violation(code="dangling src", detail=f"Edge {e.id} starts at undeclared vertex {e.src}"))
        if e.rng not in declared:
            violations.append(Violation(code="dangling rng", detail=f"Edge {e.id} ends at undeclared vertex {e.rng}"))

    ray_ids: Set[str] = set()
    attached: Set[str] = set()
    for t in g.tails:
        if t.id in ray_ids:
            violations.append(Violation(code="duplicate ray id", detail=f"Ray id {t.id} is used twice"))
        if t.id in edge_ids:
            violations.append(Violation(code="id collision", detail=f"Ray id {t.id} is also an edge id"))
        ray_ids.add(t.id)
        if t.attach not in declared:
            violations.append(Violation(code="dangling ray attachment", detail=f"Ray {t.id} is attached at undeclared vertex {t.attach}"))
        elif t.attach in attached:
            violations.append(Violation(code="duplicate ray attachment", detail=f"Vertex {t.attach} carries more than one ray"))
        attached.add(t.attach)

    return ValidationReport(violations=violations)

def require_valid(g: Graph) -> None:
    report = validate_graph(g)
    if not report.ok:
        summary = "; ".join(f"{v.code}: {v.detail}" for v in report.violations)
        raise CorrtailError(status_code=422, detail=f"Invalid graph: {summary}")

def require_vertex_set(g: Graph, s: VertexSet) -> None:
    unknown = sorted(s.base - set(g.vertices)) + sorted(s.rays - {t.id for t in g.tails})
    if unknown:
        raise CorrtailError(status_code=404, detail=f"Vertex set names unknown vertices or rays: {', '.join(unknown)}")

# Classification
def _tag_for(degree: Union[int, Multiplicity]) -> VertexTag:
    if degree == OMEGA:
        return VertexTag.INFINITE_EMITTER
    if degree == 0:
        return VertexTag.SINK
    return VertexTag.REGULAR

def classify_vertices(g: Graph) -> VertexClass:
    require_valid(g)
    tags: Dict[str, VertexTag] = {v: _tag_for(out_degree(g, v)) for v in g.vertices}
    received = {e.rng for e in g.edges}
    return VertexClass(
        tags=tags,
        ray_tags={t.id: VertexTag.REGULAR for t in g.tails},
        sources=frozenset(v for v in g.vertices if v not in received),
    )

def sinks(g: Graph) -> FrozenSet[str]:
    return frozenset(classify_vertices(g).with_tag(VertexTag.SINK))

def infinite_emitters(g: Graph) -> FrozenSet[str]:
    return frozenset(classify_vertices(g).with_tag(VertexTag.INFINITE_EMITTER))

def regular_vertices(g: Graph) -> VertexSet:
    """R(E); every ray vertex is regular, so all rays are included."""
    classes = classify_vertices(g)
    return VertexSet.of(classes.with_tag(VertexTag.REGULAR), classes.ray_tags.keys())

def correspondence_property_table(g: Graph) -> PropertyTable:
    classes = classify_vertices(g)
    compact = {v: tag != VertexTag.INFINITE_EMITTER for v, tag in classes.tags.items()}
    return PropertyTable(
        compact_action=compact,
        row_finite=all(compact.values()),
        phi_injective=VertexTag.SINK not in classes.tags.values(),
        full=not classes.sources,
        essential=True,
    )

# Shape helpers
def canonical_graph(g: Graph) -> Graph:
    return Graph(
        vertices=tuple(sorted(g.vertices)),
        edges=tuple(sorted(g.edges, key=lambda e: e.id)),
        tails=tuple(sorted(g.tails, key=lambda t: t.id)),
    )

def to_digraph(g: Graph) -> nx.MultiDiGraph:
    """Ordinary part of g as a networkx multigraph, one arc per stored edge."""
    digraph = nx.MultiDiGraph()
    digraph.add_nodes_from(g.vertices)
    for e in g.edges:
        digraph.add_edge(e.src, e.rng, key=e.id, mult=e.mult)
    return digraph

def is_acyclic(g: Graph) -> bool:
    return nx.is_directed_acyclic_graph(to_digraph(g))

def has_omega(g: Graph) -> bool:
    return any(e.mult == OMEGA for e in g.edges)
