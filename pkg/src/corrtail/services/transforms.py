import logging
from typing import Dict, List, Set, Tuple

from ..schemas.schema import OMEGA, Edge, Graph, Multiplicity, QuotientGraph, Tail, VertexSet, VertexTag
from .errors import CorrtailError
from .graph_core import (
    all_ids,
    classify_vertices,
    out_degree,
    out_edges,
    regular_vertices,
    require_valid,
    require_vertex_set,
    sinks,
    successors,
    tail_at,
)

logger = logging.getLogger(__name__)

# ray id -> [(chain vertex, chain edge) at depth 1..d]
TruncationMap = Dict[str, List[Tuple[str, str]]]

def fresh_id(base: str, taken: Set[str]) -> str:
    """Append primes until the id is unused, then reserve it."""
    candidate = base
    while candidate in taken:
        candidate += "'"
    taken.add(candidate)
    return candidate

# Tails
def add_tails(g: Graph) -> Graph:
    require_valid(g)
    open_sinks = sorted(sinks(g))
    if not open_sinks:
        return g

    taken = all_ids(g)
    new_tails = tuple(Tail(id=fresh_id(f"{v}.tail", taken), attach=v) for v in open_sinks)
    logger.debug(f"Attached tails at sinks {open_sinks}")
    return Graph(vertices=g.vertices, edges=g.edges, tails=g.tails + new_tails)

def truncate_with_map(g: Graph, depth: int) -> Tuple[Graph, TruncationMap]:
    require_valid(g)
    if depth < 1:
        raise CorrtailError(status_code=422, detail="Truncation depth must be at least 1")
    if not g.tails:
        return g, {}

    taken = all_ids(g)
    vertices = list(g.vertices)
    edges = list(g.edges)
    chains: TruncationMap = {}
    for tail in sorted(g.tails, key=lambda t: t.id):
        previous = tail.attach
        chain = []
        for i in range(1, depth + 1):
            vertex = fresh_id(f"{tail.attach}_{i}", taken)
            edge = fresh_id(f"{tail.id}_{i}", taken)
            vertices.append(vertex)
            edges.append(Edge(id=edge, src=previous, rng=vertex))
            chain.append((vertex, edge))
            previous = vertex
        chains[tail.id] = chain

    return Graph(vertices=tuple(vertices), edges=tuple(edges), tails=()), chains

def truncate_tails(g: Graph, depth: int) -> Graph:
    return truncate_with_map(g, depth)[0]

# Relative graph E_V
def relative_graph_with_map(g: Graph, V: VertexSet) -> Tuple[Graph, Dict[str, str], Dict[str, str]]:
    """Build E_V together with the maps v -> v' and e -> e'."""
    require_valid(g)
    if g.tails:
        raise CorrtailError(status_code=422, detail="The relative graph is only built for ray-free graphs")
    require_vertex_set(g, V)

    regular = regular_vertices(g).base
    not_regular = sorted(V.base - regular)
    if not_regular:
        raise CorrtailError(status_code=422, detail=f"Relative set must consist of regular vertices; not regular: {', '.join(not_regular)}")

    taken = all_ids(g)
    vertex_primes: Dict[str, str] = {}
    for v in sorted(regular - V.base):
        vertex_primes[v] = fresh_id(f"{v}'", taken)

    edge_primes: Dict[str, str] = {}
    new_edges: List[Edge] = []
    for e in g.edges:
        if e.rng in vertex_primes:
            edge_primes[e.id] = fresh_id(f"{e.id}'", taken)
            new_edges.append(Edge(id=edge_primes[e.id], src=e.src, rng=vertex_primes[e.rng], mult=e.mult))

    graph = Graph(
        vertices=g.vertices + tuple(vertex_primes.values()),
        edges=g.edges + tuple(new_edges),
    )
    return graph, vertex_primes, edge_primes

def build_relative_graph(g: Graph, V: VertexSet) -> Graph:
    return relative_graph_with_map(g, V)[0]

# Hereditary and saturated sets
def _targets_inside(g: Graph, v: str, h: VertexSet) -> bool:
    if not successors(g, v) <= h.base:
        return False
    tail = tail_at(g, v)
    return tail is None or tail.id in h.rays

def is_hereditary(g: Graph, h: VertexSet) -> bool:
    return all(_targets_inside(g, v, h) for v in h.base)

def is_saturated(g: Graph, h: VertexSet) -> bool:
    """Every regular vertex outside h still emits an edge leaving h.

    Ray vertices are regular too, but a ray is either wholly in h or its
    vertices point along the ray outside h, so only ordinary vertices matter.
    """
    classes = classify_vertices(g)
    for v in classes.with_tag(VertexTag.REGULAR):
        if v not in h.base and _targets_inside(g, v, h):
            return False
    return True

def hereditary_closure(g: Graph, s: VertexSet) -> VertexSet:
    require_valid(g)
    require_vertex_set(g, s)
    base = set(s.base)
    stack = list(s.base)
    while stack:
        v = stack.pop()
        for w in successors(g, v):
            if w not in base:
                base.add(w)
                stack.append(w)
    rays = set(s.rays) | {t.id for t in g.tails if t.attach in base}
    return VertexSet.of(base, rays)

def saturation_closure(g: Graph, s: VertexSet) -> VertexSet:
    h = hereditary_closure(g, s)
    regular = classify_vertices(g).with_tag(VertexTag.REGULAR)
    changed = True
    while changed:
        changed = False
        for v in regular:
            if v not in h.base and _targets_inside(g, v, h):
                h = VertexSet.of(h.base | {v}, h.rays)
                changed = True
    return h

# Quotients and subgraphs
def quotient_graph(g: Graph, h: VertexSet) -> QuotientGraph:
    require_valid(g)
    require_vertex_set(g, h)
    if not is_hereditary(g, h) or not is_saturated(g, h):
        raise CorrtailError(status_code=422, detail=f"Vertex set {h.label()} is not hereditary and saturated")

    edges = tuple(e for e in g.edges if e.rng not in h.base)
    tails = tuple(t for t in g.tails if t.id not in h.rays)
    f = Graph(vertices=tuple(v for v in g.vertices if v not in h.base), edges=edges, tails=tails)

    # B_H: infinite emitters left with finitely many (but some) edges into E^0 \ H
    breaking = []
    for v in classify_vertices(g).with_tag(VertexTag.INFINITE_EMITTER):
        if v in h.base:
            continue
        count = out_degree(f, v)
        if count != OMEGA and count > 0:
            breaking.append(v)

    b_h = VertexSet.of(breaking)
    return QuotientGraph(graph=f, b_h=b_h, relative_set=regular_vertices(f).difference(b_h))

def _mult_at_most(small: Multiplicity, large: Multiplicity) -> bool:
    if large == OMEGA:
        return True
    return small != OMEGA and small <= large

def subgraph_relative_set(g: Graph, f: Graph) -> VertexSet:
    require_valid(g)
    require_valid(f)

    problems = sorted(set(f.vertices) - set(g.vertices))
    g_edges = {e.id: e for e in g.edges}
    for e in f.edges:
        parent = g_edges.get(e.id)
        if parent is None or (parent.src, parent.rng) != (e.src, e.rng) or not _mult_at_most(e.mult, parent.mult):
            problems.append(e.id)
    g_tails = {t.id: t for t in g.tails}
    problems += [t.id for t in f.tails if g_tails.get(t.id) != t]
    if problems:
        raise CorrtailError(status_code=422, detail=f"Not a subgraph; offending ids: {', '.join(problems)}")

    f_edges = {e.id: e for e in f.edges}
    regular_f = regular_vertices(f)
    kept = [
        v for v in regular_f.base
        if all(f_edges.get(e.id) == e for e in out_edges(g, v)) and tail_at(f, v) == tail_at(g, v)
    ]
    return VertexSet.of(kept, regular_f.rays)
