"""Cuntz-Krieger (E,V)-families realised by exact matrices.

The concrete model is the path-space representation: basis vectors are the
finite paths of E_V ending at a sink, Q(v) projects onto the paths starting at
v and T(f) prepends f. An (E,V)-family is pulled back through
P(v) = Q(v) + Q(v') and S(e) = T(e) + T(e').
"""
import logging
import os
from typing import Dict, List, Optional, Tuple

import networkx as nx

from ..schemas.schema import CheckReport, CKRep, Edge, GaugeGrading, Graph, VertexSet, VertexTag
from .errors import CorrtailError, VerificationError
from .graph_core import (
    classify_vertices,
    edge_copies,
    has_omega,
    in_edges,
    infinite_emitters,
    is_acyclic,
    out_edges,
    regular_vertices,
    require_valid,
    require_vertex_set,
    sinks,
    tail_at,
    to_digraph,
)
from .linalg import (
    SpannedAlgebra,
    add,
    adjoint,
    describe,
    embed,
    equal,
    is_homogeneous,
    is_partial_isometry,
    is_projection,
    is_zero,
    matrix,
    mul,
    rank,
    sub,
    span_closure,
    total,
    zero,
)
from .transforms import add_tails, relative_graph_with_map, truncate_with_map

logger = logging.getLogger(__name__)

# Largest path-space basis built before giving up
MAX_REP_DIM = int(os.getenv("CORRTAIL_MAX_REP_DIM", "40"))

# Generators
def copy_edges(g: Graph) -> Dict[str, Edge]:
    """Edge-copy label -> the stored edge it is a copy of."""
    return {label: e for e in g.edges for label in edge_copies(e)}

def edge_sums(rep: CKRep) -> Dict[str, object]:
    """v -> sum of S(e)S(e)* over the edge copies leaving v."""
    sums = {v: zero(rep.size) for v in rep.graph.vertices}
    for label, e in copy_edges(rep.graph).items():
        s = rep.isometries[label]
        sums[e.src] = add(sums[e.src], mul(s, adjoint(s)))
    return sums

def generators(rep: CKRep, vertices: Optional[List[str]] = None, edges: Optional[List[str]] = None) -> List[object]:
    vertex_ids = sorted(rep.projections) if vertices is None else vertices
    edge_ids = sorted(rep.isometries) if edges is None else edges
    return [rep.projections[v] for v in vertex_ids] + [rep.isometries[c] for c in edge_ids]

# Path counting
def _paths_to_sinks(g: Graph) -> List[Tuple[str, Tuple[str, ...], str]]:
    incoming = {v: [(label, e.src) for e in in_edges(g, v) for label in edge_copies(e)] for v in g.vertices}
    paths = []
    for terminal in sorted(sinks(g)):
        stack: List[Tuple[str, Tuple[str, ...]]] = [(terminal, ())]
        while stack:
            start, word = stack.pop()
            paths.append((start, word, terminal))
            if len(paths) > MAX_REP_DIM:
                raise CorrtailError(status_code=413, detail=f"Path-space basis exceeds {MAX_REP_DIM} paths")
            for label, origin in incoming[start]:
                stack.append((origin, (label,) + word))
    paths.sort(key=lambda p: (p[2], len(p[1]), p[1], p[0]))
    return paths

def path_label(start: str, word: Tuple[str, ...]) -> str:
    return "(" + ",".join(word) + ")" if word else f"({start})"

def path_count_dimension(g: Graph) -> int:
    """Sum over sinks w of (#paths ending at w)^2, counted by dynamic programming."""
    digraph = to_digraph(g)
    order = list(reversed(list(nx.topological_sort(digraph))))
    total_dimension = 0
    for terminal in sinks(g):
        count: Dict[str, int] = {}
        for v in order:
            count[v] = (1 if v == terminal else 0) + sum(e.mult * count[e.rng] for e in out_edges(g, v))
        total_dimension += sum(count.values()) ** 2
    return total_dimension

# Path-space representation
def _require_finite(g: Graph) -> None:
    if has_omega(g):
        raise CorrtailError(status_code=422, detail="Edges of multiplicity omega have no finite-dimensional representation")
    if not is_acyclic(g):
        raise CorrtailError(status_code=422, detail="Graph has a cycle; its algebra is not finite-dimensional")

def graph_rep(g: Graph) -> CKRep:
    """Path-space representation of C*(g): relations at every regular vertex."""
    _require_finite(g)
    paths = _paths_to_sinks(g)
    size = len(paths)
    index = {(start, word): i for i, (start, word, _) in enumerate(paths)}

    projections = {
        v: matrix(size, {(i, i): 1 for i, (start, _, _) in enumerate(paths) if start == v})
        for v in g.vertices
    }
    isometries = {}
    for label, e in copy_edges(g).items():
        entries = {}
        for i, (start, word, _) in enumerate(paths):
            if start == e.rng:
                entries[(index[(e.src, (label,) + word)], i)] = 1
        isometries[label] = matrix(size, entries)

    return CKRep(
        graph=g,
        relative=regular_vertices(g),
        basis=tuple(path_label(start, word) for start, word, _ in paths),
        grading=GaugeGrading(degree=tuple(len(word) for _, word, _ in paths)),
        projections=projections,
        isometries=isometries,
    )

def _prepare(g: Graph, V: VertexSet, tail_depth: Optional[int]) -> Tuple[Graph, VertexSet]:
    require_valid(g)
    require_vertex_set(g, V)
    if not g.tails:
        return g, V
    if tail_depth is None:
        raise CorrtailError(status_code=422, detail="Graph carries tails; a truncation depth is required")
    truncated, chains = truncate_with_map(g, tail_depth)
    # a flagged ray keeps its relations at every chain vertex except the last, which is a sink
    chain_vertices = [vertex for ray in V.rays for vertex, _ in chains[ray][:-1]]
    return truncated, VertexSet.of(V.base | set(chain_vertices))

def path_space_rep(g: Graph, V: VertexSet, tail_depth: Optional[int] = None) -> CKRep:
    graph, relative = _prepare(g, V, tail_depth)
    _require_finite(graph)
    relative_graph, vertex_primes, edge_primes = relative_graph_with_map(graph, relative)
    q = graph_rep(relative_graph)
    primed_edges = {e.id: e for e in relative_graph.edges}

    projections = {}
    for v in graph.vertices:
        projections[v] = q.projections[v]
        if v in vertex_primes:
            projections[v] = add(projections[v], q.projections[vertex_primes[v]])

    isometries = {}
    for e in graph.edges:
        labels = edge_copies(e)
        primed = edge_copies(primed_edges[edge_primes[e.id]]) if e.id in edge_primes else [None] * len(labels)
        for label, primed_label in zip(labels, primed):
            isometries[label] = q.isometries[label]
            if primed_label is not None:
                isometries[label] = add(isometries[label], q.isometries[primed_label])

    logger.debug(f"Path-space representation of size {q.size} for relative set {relative.label()}")
    return CKRep(
        graph=graph,
        relative=relative,
        basis=q.basis,
        grading=q.grading,
        projections=projections,
        isometries=isometries,
    )

class AlgebraCache:
    """Path representations of one graph and the algebras they span, built once per relative set."""

    def __init__(self, g: Graph):
        self.graph = g
        self._reps: Dict[VertexSet, CKRep] = {}
        self._algebras: Dict[VertexSet, SpannedAlgebra] = {}

    def rep(self, V: VertexSet) -> CKRep:
        if V not in self._reps:
            self._reps[V] = path_space_rep(self.graph, V)
        return self._reps[V]

    def algebra(self, V: VertexSet) -> SpannedAlgebra:
        if V not in self._algebras:
            self._algebras[V] = span_closure(generators(self.rep(V)))
        return self._algebras[V]

# Relations
def verify_gauge(rep: CKRep) -> Tuple[bool, List[str]]:
    degrees = rep.grading.degree
    bad = [v for v, p in sorted(rep.projections.items()) if not is_homogeneous(p, degrees, 0)]
    bad += [c for c, s in sorted(rep.isometries.items()) if not is_homogeneous(s, degrees, 1)]
    return not bad, bad

def verify_ck_relations(rep: CKRep, V: VertexSet) -> CheckReport:
    report = CheckReport(title="Cuntz-Krieger relations")
    edges = copy_edges(rep.graph)
    P = rep.projections
    S = rep.isometries

    missing = sorted(set(rep.graph.vertices) - set(P)) + sorted(set(edges) - set(S))
    if missing:
        report.add("generators present", False, witnesses=missing)
        return report

    not_projections = [v for v in sorted(P) if not is_projection(P[v])]
    report.add("projections", not not_projections, witnesses=not_projections)

    vertices = sorted(P)
    overlapping = [f"{v},{w}" for i, v in enumerate(vertices) for w in vertices[i + 1:] if not is_zero(mul(P[v], P[w]))]
    report.add("mutually orthogonal projections", not overlapping, witnesses=overlapping)

    bad_sources = [c for c, e in sorted(edges.items()) if not equal(mul(adjoint(S[c]), S[c]), P[e.rng])]
    report.add("(1) s_e* s_e = p_r(e)", not bad_sources, witnesses=bad_sources)

    bad_ranges = [
        c for c, e in sorted(edges.items())
        if not is_partial_isometry(S[c]) or not equal(mul(P[e.src], S[c], adjoint(S[c])), mul(S[c], adjoint(S[c])))
    ]
    overlapping_ranges = [
        f"{c},{d}" for c in sorted(edges) for d in sorted(edges)
        if c < d and not is_zero(mul(adjoint(S[c]), S[d]))
    ]
    report.add("(2) s_e s_e* <= p_s(e)", not bad_ranges and not overlapping_ranges, witnesses=bad_ranges + overlapping_ranges)

    sums = edge_sums(rep)
    unbalanced = [v for v in sorted(V.base) if v in P and not equal(P[v], sums[v])]
    report.add("(3) p_v = sum s_e s_e* on V", not unbalanced, witnesses=unbalanced)

    regular = regular_vertices(rep.graph).base
    defects = {v: rank(sub(P[v], sums[v])) for v in sorted(regular - V.base)}
    flat = [v for v, r in defects.items() if r == 0]
    report.add("strict defect off V", not flat, witnesses=flat)
    report.data["defect_ranks"] = defects

    graded, off_degree = verify_gauge(rep)
    report.add("gauge grading", graded, witnesses=off_degree)
    return report

def defect_and_TK(rep: CKRep, K: VertexSet) -> CheckReport:
    """T_K(delta_v) = p_v - sum s_e s_e*, checked to be multiplicative on span{delta_v : v in K}."""
    tags = classify_vertices(rep.graph).tags
    require_vertex_set(rep.graph, K)
    infinite = sorted(K.base & infinite_emitters(rep.graph))
    if infinite:
        raise CorrtailError(status_code=422, detail=f"K must lie in J(X); infinite emitters: {', '.join(infinite)}")

    sums = edge_sums(rep)
    vertices = sorted(K.base)
    T = {v: sub(rep.projections[v], sums[v]) for v in vertices}

    report = CheckReport(title="T_K homomorphism")
    report.add("T_K values are projections", all(is_projection(t) for t in T.values()))

    broken = []
    for v in vertices:
        for w in vertices:
            expected = T[v] if v == w else zero(rep.size)
            if not equal(mul(T[v], T[w]), expected):
                broken.append(f"{v},{w}")
    report.add("T_K multiplicative", not broken, witnesses=broken)

    mismatched = [
        v for v in vertices
        if tags[v] == VertexTag.REGULAR and is_zero(T[v]) != (v in rep.relative.base)
    ]
    report.add("T_K vanishes exactly on V", not mismatched, witnesses=mismatched)

    ranks = {v: rank(t) for v, t in T.items()}
    report.data["ranks"] = ranks
    report.data["injective"] = all(r > 0 for r in ranks.values())
    return report

# Tail extension
def _coordinate_support(m) -> Optional[List[int]]:
    entries = {key: value for key, value in m.to_dok().items() if value}
    if any(i != j or value != 1 for (i, j), value in entries.items()):
        return None
    return sorted(i for i, _ in entries)

def _build_extension(rep: CKRep, depth: int) -> Tuple[CKRep, List[int]]:
    g = rep.graph
    if g.tails:
        raise CorrtailError(status_code=422, detail="Extension starts from a representation of a ray-free graph")
    if depth < 1:
        raise CorrtailError(status_code=422, detail="Extension depth must be at least 1")

    n = rep.size
    kernel = sorted(sinks(g))
    h0 = _coordinate_support(total(n, [rep.projections[w] for w in kernel]))
    if h0 is None:
        raise CorrtailError(status_code=422, detail="pi(ker phi) must be a coordinate projection to build the tail copies")
    if not kernel:
        return rep, h0

    k = len(h0)
    size = n + depth * k
    position = {i: t for t, i in enumerate(h0)}

    def slot(copy: int, t: int) -> int:
        return h0[t] if copy == 0 else n + (copy - 1) * k + t

    def between(m, row_copy: int, col_copy: int):
        entries = {}
        for (i, j), value in m.to_dok().items():
            if value and i in position and j in position:
                entries[(slot(row_copy, position[i]), slot(col_copy, position[j]))] = value
        return matrix(size, entries)

    tailed_graph = add_tails(g)
    tailed, chains = truncate_with_map(tailed_graph, depth)
    projections = {v: embed(p, size) for v, p in rep.projections.items()}
    isometries = {c: embed(s, size) for c, s in rep.isometries.items()}
    tail_vertices = []
    for w in kernel:
        chain = chains[tail_at(tailed_graph, w).id]
        for copy, (vertex, edge) in enumerate(chain, start=1):
            projections[vertex] = between(rep.projections[w], copy, copy)
            isometries[edge] = between(rep.projections[w], copy - 1, copy)
            tail_vertices.append(vertex)
        tail_vertices.pop()  # the chain end is a sink

    degrees = list(rep.grading.degree) + [
        rep.grading.degree[h0[t]] - copy for copy in range(1, depth + 1) for t in range(k)
    ]
    basis = list(rep.basis) + [f"{rep.basis[h0[t]]}@{copy}" for copy in range(1, depth + 1) for t in range(k)]
    extended = CKRep(
        graph=tailed,
        relative=VertexSet.of(rep.relative.base | set(kernel) | set(tail_vertices)),
        basis=tuple(basis),
        grading=GaugeGrading(degree=tuple(degrees)),
        projections=projections,
        isometries=isometries,
    )
    return extended, h0

def _extension_report(rep: CKRep, extended: CKRep, h0: List[int], depth: int) -> CheckReport:
    report = CheckReport(title="tail extension of a representation")
    n = rep.size
    if extended is rep:
        report.add("ker phi is zero; the extension is the original family", True)
        report.data["size"] = n
        report.data["kernel_rank"] = 0
        return report

    relations = verify_ck_relations(extended, extended.relative)
    relation_failures = [c.name for c in relations.failures() if c.name != "strict defect off V"]
    report.add("extension is a Cuntz-Krieger family", not relation_failures, witnesses=relation_failures)

    restricted = [
        v for v, p in rep.projections.items() if not equal(extended.projections[v], embed(p, extended.size))
    ] + [c for c, s in rep.isometries.items() if not equal(extended.isometries[c], embed(s, extended.size))]
    report.add("extension restricts to the original family", not restricted, witnesses=restricted)

    expected_size = n + depth * len(h0)
    report.add("space grows by depth copies of pi(ker phi)H", extended.size == expected_size, detail=f"{n} -> {extended.size}")

    # pi injective on ker phi forces the tail projections to be nonzero
    silent = []
    if all(not is_zero(rep.projections[w]) for w in sinks(rep.graph)):
        silent = [v for v in extended.graph.vertices if v not in rep.projections and is_zero(extended.projections[v])]
    report.add("tail projections nonzero when pi is injective on ker phi", not silent, witnesses=silent)

    graded, off_degree = verify_gauge(extended)
    report.add("tail copies carry a gauge grading", graded, witnesses=off_degree)
    report.data["size"] = extended.size
    report.data["kernel_rank"] = len(h0)
    return report

def extend_representation(rep: CKRep, tail_depth: int) -> CKRep:
    extended, h0 = _build_extension(rep, tail_depth)
    report = _extension_report(rep, extended, h0, tail_depth)
    if not report.passed:
        raise VerificationError(
            "Extended representation fails its checks",
            {"failures": [check.model_dump() for check in report.failures()]},
        )
    return extended

def verify_extension(rep: CKRep, tail_depth: int) -> CheckReport:
    extended, h0 = _build_extension(rep, tail_depth)
    return _extension_report(rep, extended, h0, tail_depth)

def witness_matrices(rep: CKRep, labels: List[str]) -> Dict[str, str]:
    found = {}
    for label in labels:
        if label in rep.projections:
            found[label] = describe(rep.projections[label])
        elif label in rep.isometries:
            found[label] = describe(rep.isometries[label])
    return found
