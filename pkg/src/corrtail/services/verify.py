"""Desk-scale checks for relative graph algebras, tails, corners and quotients.

Every check builds path-space representations of finite acyclic graphs and
compares exact spans; a failing identity raises VerificationError with the
offending matrices.
"""
import logging
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from ..schemas.schema import CheckReport, CKRep, Graph, VertexSet
from .ck_family import (
    AlgebraCache,
    edge_sums,
    generators,
    graph_rep,
    path_count_dimension,
    path_space_rep,
    verify_ck_relations,
    witness_matrices,
)
from .errors import CorrtailError, VerificationError
from .graph_core import edge_copies, regular_vertices, require_valid, sinks
from .lattice import enumerate_saturated_hereditary
from .linalg import (
    SpannedAlgebra,
    add,
    adjoint,
    compress,
    describe,
    equal,
    ideal_closure,
    is_projection,
    is_zero,
    laurent_coefficients,
    mul,
    span_closure,
    sub,
    total,
    zero,
)
from .transforms import add_tails, quotient_graph, relative_graph_with_map, subgraph_relative_set, truncate_with_map

logger = logging.getLogger(__name__)

CORNER_NOTES = [
    "The corner projection is the finite sum of the vertex projections of the original graph",
    "Fullness is checked inside the truncated representation, one depth at a time",
]

def _raise_on_failure(report: CheckReport, rep: CKRep = None) -> CheckReport:
    if report.passed:
        return report
    failures = report.failures()
    counterexample = {"failures": [check.model_dump() for check in failures]}
    if rep is not None:
        counterexample["matrices"] = witness_matrices(rep, [w for check in failures for w in check.witnesses])
    raise VerificationError(f"{report.title}: {', '.join(check.name for check in failures)}", counterexample)

def _span_dimension(gens: List) -> int:
    return span_closure(gens).dimension if gens else 0

# Relative graph algebras are graph algebras
def verify_relgas(g: Graph, V: VertexSet, cache: Optional[AlgebraCache] = None) -> CheckReport:
    require_valid(g)
    if g.tails:
        raise CorrtailError(status_code=422, detail="Relative graph algebras are checked on ray-free graphs")
    rep = cache.rep(V) if cache is not None else path_space_rep(g, V)
    relative_graph, vertex_primes, edge_primes = relative_graph_with_map(g, rep.relative)
    reference = graph_rep(relative_graph)
    primed_edges = {e.id: e for e in relative_graph.edges}

    P = rep.projections
    S = rep.isometries
    sums = edge_sums(rep)

    q = {}
    for w in g.vertices:
        q[w] = sums[w] if w in vertex_primes else P[w]
    for v, primed in vertex_primes.items():
        q[primed] = sub(P[v], sums[v])

    t = {}
    for e in g.edges:
        labels = edge_copies(e)
        for label in labels:
            t[label] = mul(S[label], q[e.rng])
        if e.id in edge_primes:
            for label, primed_label in zip(labels, edge_copies(primed_edges[edge_primes[e.id]])):
                t[primed_label] = mul(S[label], q[vertex_primes[e.rng]])

    family = CKRep(
        graph=relative_graph,
        relative=regular_vertices(relative_graph),
        basis=rep.basis,
        grading=rep.grading,
        projections=q,
        isometries=t,
    )

    report = CheckReport(title="relative graph algebra is a graph algebra")
    relations = verify_ck_relations(family, family.relative)
    report.add("q, t form a Cuntz-Krieger family of E_V", relations.passed, witnesses=[c.name for c in relations.failures()])

    drifted = [v for v in q if not equal(q[v], reference.projections[v])]
    drifted += [c for c in t if not equal(t[c], reference.isometries[c])]
    report.add("q, t agree with the path representation of E_V", not drifted, witnesses=drifted)

    unrecovered = [
        v for v in g.vertices
        if not equal(P[v], add(q[v], q[vertex_primes[v]]) if v in vertex_primes else q[v])
    ]
    report.add("p_v = q_v + q_v'", not unrecovered, witnesses=unrecovered)

    unrecovered_edges = []
    for e in g.edges:
        primed = edge_copies(primed_edges[edge_primes[e.id]]) if e.id in edge_primes else [None] * e.mult
        for label, primed_label in zip(edge_copies(e), primed):
            expected = add(t[label], t[primed_label]) if primed_label else t[label]
            if not equal(S[label], expected):
                unrecovered_edges.append(label)
    report.add("s_e = t_e + t_e'", not unrecovered_edges, witnesses=unrecovered_edges)

    relative_dimension = cache.algebra(V).dimension if cache is not None else _span_dimension(generators(rep))
    graph_dimension = _span_dimension(generators(family))
    counted = path_count_dimension(relative_graph)
    report.add(
        "dimensions agree",
        relative_dimension == graph_dimension == counted,
        detail=f"C*(E,V)={relative_dimension} C*(E_V)={graph_dimension} paths={counted}",
    )
    report.data.update({"relative_dimension": relative_dimension, "graph_dimension": graph_dimension, "path_count": counted})

    if not report.passed:
        counterexample = {"failures": [c.model_dump() for c in report.failures()]}
        counterexample["matrices"] = {
            label: describe(m) for label, m in list(q.items()) + list(t.items()) if label in drifted
        }
        raise VerificationError("Relative graph algebra check failed", counterexample)
    return report

# Truncated tails
class TailPicture:
    """Path representation of truncate_tails(add_tails(g), depth) with its tail generators indexed."""

    def __init__(self, g: Graph, depth: int):
        require_valid(g)
        if g.tails:
            raise CorrtailError(status_code=422, detail="Tail checks start from a ray-free graph")
        self.graph = g
        self.depth = depth
        tailed = add_tails(g)
        self.truncated, chains = truncate_with_map(tailed, depth)
        self.rep = path_space_rep(self.truncated, regular_vertices(self.truncated))

        self.original_vertices = sorted(g.vertices)
        self.original_edges = sorted(label for e in g.edges for label in edge_copies(e))
        # (attachment, slot) -> (chain vertex, chain edge)
        self.slots: Dict[Tuple[str, int], Tuple[str, str]] = {}
        for tail in tailed.tails:
            for slot, (vertex, edge) in enumerate(chains[tail.id], start=1):
                self.slots[(tail.attach, slot)] = (vertex, edge)

    def original_generators(self) -> List:
        return generators(self.rep, self.original_vertices, self.original_edges)

    @cached_property
    def original_algebra(self) -> SpannedAlgebra:
        return span_closure(self.original_generators())

    @cached_property
    def full_algebra(self) -> SpannedAlgebra:
        return span_closure(generators(self.rep))

    def tail_isometry(self, key: Tuple[str, int]):
        return self.rep.isometries[self.slots[key][1]]

    def tail_projection(self, key: Tuple[str, int]):
        return self.rep.projections[self.slots[key][0]]

    def slot_projection(self, attach: str, slot: int):
        """pi~ of eps_slot(delta_attach): P(attach) on slot 0, else the chain vertex."""
        if slot == 0:
            return self.rep.projections[attach]
        return self.tail_projection((attach, slot))

def _vacuous(title: str, notes: List[str] = None) -> CheckReport:
    report = CheckReport(title=title, notes=list(notes or []))
    report.add("no sinks, so no tail generators", True)
    return report

def verify_tail_relation_lemmas(g: Graph, tail_depth: int, picture: Optional[TailPicture] = None) -> CheckReport:
    require_valid(g)
    if not sinks(g):
        return _vacuous("tail relation lemmas")
    picture = picture or TailPicture(g, tail_depth)
    rep = picture.rep
    P = rep.projections
    S = rep.isometries
    size = rep.size
    keys = sorted(picture.slots)

    report = CheckReport(title="tail relation lemmas", notes=[f"Identities are checked on tail slots 1..{tail_depth}"])

    def annihilates(products) -> List[str]:
        return [f"{key[0]}@{key[1]}*{name}" for key, name, m in products if not is_zero(m)]

    against_vertices = annihilates(
        (key, v, mul(picture.tail_isometry(key), P[v])) for key in keys for v in picture.original_vertices
    )
    report.add("t(0,f) pi(a,0) = 0", not against_vertices, witnesses=against_vertices)

    against_edges = annihilates(
        (key, c, mul(picture.tail_isometry(key), S[c])) for key in keys for c in picture.original_edges
    )
    report.add("t(0,f) t(xi,0) = 0", not against_edges, witnesses=against_edges)

    against_adjoints = annihilates(
        (key, c, mul(picture.tail_isometry(key), adjoint(S[c]))) for key in keys for c in picture.original_edges
    )
    report.add("t(0,f) t(xi,0)* = 0", not against_adjoints, witnesses=against_adjoints)

    core = picture.original_algebra
    against_core = annihilates(
        (key, f"c{i}", mul(picture.tail_isometry(key), c)) for key in keys for i, c in enumerate(core.elements)
    )
    report.add("t(0,f) c = 0 on C*(pi,t)", not against_core, witnesses=against_core)

    final_space = []
    for left in keys:
        for right in keys:
            product = mul(picture.tail_isometry(left), adjoint(picture.tail_isometry(right)))
            expected = picture.slot_projection(left[0], left[1] - 1) if left == right else zero(size)
            if not equal(product, expected):
                final_space.append(f"{left[0]}@{left[1]},{right[0]}@{right[1]}")
    report.add("t(0,f) t(0,g)* = pi(f1 g1*, (f2 g2*, ...))", not final_space, witnesses=final_space)

    silent = [v for v in rep.graph.vertices if is_zero(P[v])]
    report.add("vertex projections nonzero", not silent, witnesses=silent)

    report.data.update({"size": size, "tail_generators": len(keys), "core_dimension": core.dimension})
    return report

def verify_corner(g: Graph, tail_depth: int, picture: Optional[TailPicture] = None) -> CheckReport:
    require_valid(g)
    if not sinks(g):
        report = _vacuous("corner of the tail-added algebra", CORNER_NOTES)
        report.data["projection"] = "identity"
        return report
    picture = picture or TailPicture(g, tail_depth)
    rep = picture.rep
    P = rep.projections
    S = rep.isometries
    size = rep.size
    p = total(size, [P[v] for v in picture.original_vertices])

    report = CheckReport(title="corner of the tail-added algebra", notes=list(CORNER_NOTES))
    report.add("p is a projection", is_projection(p))

    # p t(xi, f) = t(xi, (f1, 0, ...)) and t(xi, f) p = t(xi, 0)
    left_edges = [c for c in picture.original_edges if not equal(mul(p, S[c]), S[c])]
    left_edges += [
        f"{key[0]}@{key[1]}" for key in picture.slots
        if not equal(mul(p, picture.tail_isometry(key)), picture.tail_isometry(key) if key[1] == 1 else zero(size))
    ]
    report.add("p t(xi,f) = t(xi,(f1,0,...))", not left_edges, witnesses=left_edges)

    right_edges = [c for c in picture.original_edges if not equal(mul(S[c], p), S[c])]
    right_edges += [f"{key[0]}@{key[1]}" for key in picture.slots if not is_zero(mul(picture.tail_isometry(key), p))]
    report.add("t(xi,f) p = t(xi,0)", not right_edges, witnesses=right_edges)

    compressed = [v for v in picture.original_vertices if not (equal(mul(p, P[v]), P[v]) and equal(mul(P[v], p), P[v]))]
    compressed += [
        f"{key[0]}@{key[1]}" for key in picture.slots
        if not (is_zero(mul(p, picture.tail_projection(key))) and is_zero(mul(picture.tail_projection(key), p)))
    ]
    report.add("p pi(a,f) = pi(a,f) p = pi(a,0)", not compressed, witnesses=compressed)

    full = picture.full_algebra
    corner = compress(full, p)
    original = picture.original_algebra
    report.add(
        "p C*(Y) p equals the span of the original generators",
        corner.same_span(original),
        detail=f"corner={corner.dimension} original={original.dimension}",
    )

    ideal = ideal_closure(full, corner.elements)
    report.add("corner is full", ideal.dimension == full.dimension, detail=f"ideal={ideal.dimension} full={full.dimension}")

    report.data.update({"size": size, "full_dimension": full.dimension, "corner_dimension": corner.dimension})
    return _raise_on_failure(report, rep)

# Quotients and subalgebras
def _graph_algebra(g: Graph, cache: Optional[AlgebraCache] = None) -> Tuple[CKRep, SpannedAlgebra]:
    full = regular_vertices(g)
    if cache is not None:
        return cache.rep(full), cache.algebra(full)
    rep = path_space_rep(g, full)
    return rep, span_closure(generators(rep))

def _relative_dimension(g: Graph, V: VertexSet) -> int:
    if not g.vertices:
        return 0
    return _span_dimension(generators(path_space_rep(g, V)))

def _is_gauge_invariant(algebra: SpannedAlgebra, degrees) -> bool:
    return all(
        algebra.contains(coefficient)
        for element in algebra.elements
        for coefficient in laurent_coefficients(element, degrees).values()
    )

def verify_quotient(g: Graph, h: VertexSet, cache: Optional[AlgebraCache] = None) -> CheckReport:
    """dim C*(E) - dim I_H = dim C*(F, R(F) minus B_H)."""
    rep, algebra = _graph_algebra(g, cache)
    quotient = quotient_graph(g, h)
    ideal = ideal_closure(algebra, [rep.projections[v] for v in sorted(h.base)])
    target = _relative_dimension(quotient.graph, quotient.relative_set)

    report = CheckReport(title=f"quotient by the ideal of {h.label()}")
    report.add(
        "dim C*(E)/I_H = dim C*(F, R(F) minus B_H)",
        algebra.dimension - ideal.dimension == target,
        detail=f"{algebra.dimension} - {ideal.dimension} vs {target}",
    )
    report.add("I_H is gauge invariant", _is_gauge_invariant(ideal, rep.grading.degree))
    report.data.update({"algebra": algebra.dimension, "ideal": ideal.dimension, "quotient": target})
    return _raise_on_failure(report)

def verify_subalgebra(g: Graph, f: Graph) -> CheckReport:
    """The generators of a subgraph span a copy of C*(F, V)."""
    relative = subgraph_relative_set(g, f)
    rep, _ = _graph_algebra(g)
    labels = []
    g_copies = {e.id: edge_copies(e) for e in g.edges}
    for e in f.edges:
        labels += g_copies[e.id][:len(edge_copies(e))]
    sub_dimension = _span_dimension(generators(rep, sorted(f.vertices), labels))
    target = _relative_dimension(f, relative)

    report = CheckReport(title="subgraph generates a relative graph algebra")
    report.add(
        "dim span(subgraph generators) = dim C*(F, V)",
        sub_dimension == target,
        detail=f"{sub_dimension} vs {target} with V={relative.label()}",
    )
    report.data.update({"relative_set": sorted(relative.base), "dimension": sub_dimension})
    return _raise_on_failure(report)

def ideal_map_check(g: Graph, cache: Optional[AlgebraCache] = None) -> CheckReport:
    """H -> ideal generated by {p_v : v in H} is injective and preserves inclusion both ways."""
    lattice = enumerate_saturated_hereditary(g)
    rep, algebra = _graph_algebra(g, cache)
    ideals = [ideal_closure(algebra, [rep.projections[v] for v in sorted(h.base)]) for h in lattice.elements]

    report = CheckReport(title="ideal map on saturated hereditary sets")
    collisions = []
    order_breaks = []
    for i, a in enumerate(lattice.elements):
        for j, b in enumerate(lattice.elements):
            contained = ideals[j].contains_all(ideals[i])
            if contained != a.issubset(b):
                order_breaks.append(f"{a.label()} <= {b.label()}")
            if i < j and ideals[i].same_span(ideals[j]):
                collisions.append(f"{a.label()} ~ {b.label()}")
    report.add("ideal map injective", not collisions, witnesses=collisions)
    report.add("ideal map is an order embedding", not order_breaks, witnesses=order_breaks)
    report.add("ideals are gauge invariant", all(_is_gauge_invariant(i, rep.grading.degree) for i in ideals))
    report.data["dimensions"] = {h.label(): i.dimension for h, i in zip(lattice.elements, ideals)}
    return _raise_on_failure(report)
