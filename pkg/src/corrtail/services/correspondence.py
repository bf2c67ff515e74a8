"""The graph correspondence X(E) over A = C_0(E^0) and the tail construction.

Ideals of A are vertex sets. Submodules such as phi(I)X and XI are computed
as sets of edge atoms: every ordinary v -> w pair with positive multiplicity,
plus two atoms per ray (its entry edge and its body).
"""
import logging
from typing import Dict, FrozenSet, List, Tuple

from ..schemas.schema import (
    OMEGA,
    CheckReport,
    CorrespondenceIdeals,
    Graph,
    GraphCorrespondence,
    IdealOfA,
    Multiplicity,
    QuotientCorrespondence,
    TailBlock,
    TailedCorrespondence,
    VertexSet,
)
from .errors import CorrtailError, VerificationError
from .graph_core import correspondence_property_table, regular_vertices, require_valid, require_vertex_set, sinks
from .transforms import add_tails, quotient_graph

logger = logging.getLogger(__name__)

# An endpoint is ("vertex", id) or ("ray", id); an atom is (name, src endpoint, rng endpoint)
Endpoint = Tuple[str, str]
Atom = Tuple[str, Endpoint, Endpoint]

def _add_mult(a: Multiplicity, b: Multiplicity) -> Multiplicity:
    if a == OMEGA or b == OMEGA:
        return OMEGA
    return a + b

def build_graph_correspondence(g: Graph) -> GraphCorrespondence:
    require_valid(g)
    out_mult: Dict[str, Dict[str, Multiplicity]] = {v: {} for v in g.vertices}
    in_mult: Dict[str, Dict[str, Multiplicity]] = {v: {} for v in g.vertices}
    for e in g.edges:
        row = out_mult[e.src]
        row[e.rng] = _add_mult(row[e.rng], e.mult) if e.rng in row else e.mult
        in_mult[e.rng][e.src] = row[e.rng]

    return GraphCorrespondence(
        graph=g,
        out_mult=out_mult,
        in_mult=in_mult,
        tails={t.attach: t.id for t in g.tails},
        properties=correspondence_property_table(g),
    )

# Edge supports
def _atoms(x: GraphCorrespondence) -> List[Atom]:
    atoms: List[Atom] = []
    for v, row in x.out_mult.items():
        for w in row:
            atoms.append((f"{v}->{w}", ("vertex", v), ("vertex", w)))
    for v, ray in x.tails.items():
        atoms.append((f"{ray}:entry", ("vertex", v), ("ray", ray)))
        atoms.append((f"{ray}:body", ("ray", ray), ("ray", ray)))
    return atoms

def _contains(support: VertexSet, point: Endpoint) -> bool:
    kind, name = point
    return name in (support.base if kind == "vertex" else support.rays)

def left_support(x: GraphCorrespondence, ideal: IdealOfA) -> FrozenSet[str]:
    """Edge support of phi(I)X = {f : s(f) in I}."""
    return frozenset(name for name, src, _ in _atoms(x) if _contains(ideal.support, src))

def right_support(x: GraphCorrespondence, ideal: IdealOfA) -> FrozenSet[str]:
    """Edge support of XI = {f : r(f) in I}."""
    return frozenset(name for name, _, rng in _atoms(x) if _contains(ideal.support, rng))

def _point_ideal(point: Endpoint) -> IdealOfA:
    kind, name = point
    if kind == "vertex":
        return IdealOfA(support=VertexSet.of([name]))
    return IdealOfA(support=VertexSet.of(rays=[name]))

# Ideals of A
def compute_ideals(x: GraphCorrespondence) -> CorrespondenceIdeals:
    vertices = list(x.graph.vertices)
    rays = list(x.tails.values())

    ker_phi = VertexSet.of(v for v in vertices if not x.out_mult[v] and v not in x.tails)
    j_big = VertexSet.of((v for v in vertices if OMEGA not in x.out_mult[v].values()), rays)
    ker_perp = VertexSet.of(set(vertices) - ker_phi.base, rays)
    j_x = j_big.intersection(ker_perp)

    consistent = (
        j_x == regular_vertices(x.graph)
        and ker_phi.base == sinks(x.graph)
        and not (ker_phi.base & j_x.base)
    )
    if not consistent:
        raise VerificationError(
            "Ideals computed from the correspondence disagree with the vertex classification",
            {"ker_phi": ker_phi.label(), "J_X": j_x.label(), "regular": regular_vertices(x.graph).label()},
        )
    return CorrespondenceIdeals(
        ker_phi=IdealOfA(support=ker_phi),
        j_big=IdealOfA(support=j_big),
        j_x=IdealOfA(support=j_x),
        consistent=consistent,
    )

# Invariance and saturation
def is_X_invariant(x: GraphCorrespondence, ideal: IdealOfA) -> bool:
    return left_support(x, ideal) <= right_support(x, ideal)

def is_X_saturated(x: GraphCorrespondence, ideal: IdealOfA) -> bool:
    """a in J_X and phi(a)X inside XI force a in I, tested on the point ideals of J_X."""
    j_x = compute_ideals(x).j_x.support
    inside = right_support(x, ideal)
    points = [("vertex", v) for v in sorted(j_x.base)] + [("ray", r) for r in sorted(j_x.rays)]
    for point in points:
        if _contains(ideal.support, point):
            continue
        if left_support(x, _point_ideal(point)) <= inside:
            return False
    return True

def quotient_correspondence(x: GraphCorrespondence, ideal: IdealOfA) -> QuotientCorrespondence:
    require_vertex_set(x.graph, ideal.support)
    if not is_X_invariant(x, ideal) or not is_X_saturated(x, ideal):
        raise CorrtailError(status_code=422, detail=f"Ideal {ideal.support.label()} is not X-invariant and X-saturated")

    quotient = quotient_graph(x.graph, ideal.support)
    xq = build_graph_correspondence(quotient.graph)
    q_jx = compute_ideals(x).j_x.support.difference(ideal.support)
    j_quotient = compute_ideals(xq).j_x.support

    inclusion = q_jx.issubset(j_quotient)
    equality = q_jx == j_quotient
    hypotheses = {
        "phi(A) in K(X)": x.properties.row_finite,
        # the complement of the sinks always works for finite commutative A
        "ker phi complemented": True,
    }
    violated = [name for name, holds in hypotheses.items() if not holds]

    if not inclusion:
        raise VerificationError(
            "Image of J_X is not contained in J of the quotient",
            {"q_JX": q_jx.label(), "J_quotient": j_quotient.label()},
        )
    if not violated and not equality:
        raise VerificationError(
            "Image of J_X differs from J of the quotient although both hypotheses hold",
            {"q_JX": q_jx.label(), "J_quotient": j_quotient.label()},
        )

    return QuotientCorrespondence(
        quotient=xq,
        b_h=quotient.b_h,
        relative_set=quotient.relative_set,
        q_jx=IdealOfA(support=q_jx),
        j_quotient=IdealOfA(support=j_quotient),
        inclusion_holds=inclusion,
        equality_holds=equality,
        hypotheses=hypotheses,
        violated_hypotheses=[] if equality else violated,
    )

# Tails
def ray_vertex_id(ray: str, depth: int) -> str:
    """Symbolic address of the vertex at the given depth (>= 1) along a ray."""
    return f"{ray}@{depth}"

def add_tail_correspondence(x: GraphCorrespondence) -> TailedCorrespondence:
    tailed = build_graph_correspondence(add_tails(x.graph))
    ker_phi = compute_ideals(x).ker_phi.support.base
    blocks = [TailBlock(vertex=v, ray=tailed.tails[v]) for v in sorted(ker_phi)]

    # Y restricted to A is X, and T adds exactly one block per generator of ker phi
    mismatched = [v for v in x.graph.vertices if tailed.out_mult[v] != x.out_mult[v]]
    kept_rays = {v: r for v, r in tailed.tails.items() if v not in ker_phi}
    if mismatched or kept_rays != x.tails or set(tailed.tails) != set(x.tails) | ker_phi:
        raise VerificationError(
            "Tail correspondence is not the correspondence of the tail-added graph",
            {"mismatched_rows": mismatched, "rays": tailed.tails},
        )
    return TailedCorrespondence(base=x, blocks=blocks, tailed=tailed)

def epsilon(y: TailedCorrespondence, index: int, vertex: str) -> str:
    """The B-vertex carrying eps_index(delta_vertex), i.e. depth index on the ray at vertex."""
    if index < 1:
        raise CorrtailError(status_code=400, detail="Tail slots are indexed from 1")
    for block in y.blocks:
        if block.vertex == vertex:
            return ray_vertex_id(block.ray, index)
    raise CorrtailError(status_code=404, detail=f"Vertex {vertex} does not generate ker phi")

def check_tail_lemmas(y: TailedCorrespondence) -> CheckReport:
    report = CheckReport(title="tail correspondence lemmas")
    base_ideals = compute_ideals(y.base)
    tailed_ideals = compute_ideals(y.tailed)

    kernel = tailed_ideals.ker_phi.support
    report.add("left action of B is injective", kernel.size() == 0, witnesses=sorted(kernel.base))

    j_y = tailed_ideals.j_big.support
    report.add(
        "J_Y equals J(Y)",
        tailed_ideals.j_x.support == j_y,
        detail=f"J_Y={tailed_ideals.j_x.support.label()} J(Y)={j_y.label()}",
    )

    # a = a1 + a2 with a1 in J_X and a2 in ker phi, plus every tail block
    expected = VertexSet.of(
        base_ideals.j_x.support.base | base_ideals.ker_phi.support.base,
        y.tailed.tails.values(),
    )
    report.add(
        "J(Y) decomposes as J_X + ker phi + tail",
        j_y == expected,
        detail=f"computed={j_y.label()} expected={expected.label()}",
    )

    covered = {block.vertex for block in y.blocks}
    report.add("tail blocks cover ker phi", covered == set(base_ideals.ker_phi.support.base))

    # eps_1, eps_2 of each generator of ker phi land on its own ray, at distinct depths
    addresses = {block.vertex: [epsilon(y, index, block.vertex) for index in (1, 2)] for block in y.blocks}
    flat = [a for values in addresses.values() for a in values]
    misplaced = [a for block in y.blocks for a in addresses[block.vertex] if a.rsplit("@", 1)[0] != block.ray]
    report.add("eps maps have disjoint ranges on the tail blocks", len(set(flat)) == len(flat) and not misplaced, witnesses=misplaced)
    report.data["epsilon"] = addresses

    if not report.passed:
        raise VerificationError(
            "Tail lemma check failed",
            {"failures": [check.model_dump() for check in report.failures()]},
        )
    return report
