import itertools
import logging
import os
from typing import Dict, List, Set

from ..schemas.schema import Graph, IdealLattice, LatticeIso, LatticeReport, VertexSet, VertexTag
from .errors import CorrtailError, VerificationError
from .graph_core import classify_vertices, correspondence_property_table, require_valid, successors
from .transforms import add_tails, saturation_closure

logger = logging.getLogger(__name__)

# Enumeration covers 2^n vertex subsets
LATTICE_MAX_VERTICES = int(os.getenv("CORRTAIL_LATTICE_MAX_VERTICES", "16"))
# Meet/join tables and the order relation are quadratic in the lattice size
LATTICE_MAX_TABLE = int(os.getenv("CORRTAIL_LATTICE_MAX_TABLE", "512"))

def enumerate_saturated_hereditary(g: Graph, max_vertices: int = None) -> IdealLattice:
    """All saturated hereditary vertex sets of g, smallest first."""
    require_valid(g)
    budget = LATTICE_MAX_VERTICES if max_vertices is None else max_vertices
    order = sorted(g.vertices)
    n = len(order)
    if n > budget:
        raise CorrtailError(status_code=413, detail=f"Lattice enumeration is limited to {budget} ordinary vertices; graph has {n}")

    index = {v: i for i, v in enumerate(order)}
    succ_mask = [sum(1 << index[w] for w in successors(g, v)) for v in order]
    ray_at = {t.attach: t.id for t in g.tails}
    tags = classify_vertices(g).tags
    regular = [i for i, v in enumerate(order) if tags[v] == VertexTag.REGULAR]

    found: List[VertexSet] = []
    for mask in range(1 << n):
        members = [i for i in range(n) if mask >> i & 1]
        # hereditary on ordinary vertices
        if any(succ_mask[i] & ~mask for i in members):
            continue
        base = frozenset(order[i] for i in members)
        forced = {ray_at[v] for v in base if v in ray_at}
        free = sorted(r for v, r in ray_at.items() if v not in base)
        for choice in itertools.product((False, True), repeat=len(free)):
            rays = forced | {r for r, chosen in zip(free, choice) if chosen}
            saturated = True
            for i in regular:
                if mask >> i & 1 or succ_mask[i] & ~mask:
                    continue
                tail = ray_at.get(order[i])
                if tail is None or tail in rays:
                    saturated = False
                    break
            if saturated:
                found.append(VertexSet.of(base, rays))

    found.sort(key=VertexSet.sort_key)
    logger.info(f"Enumerated {len(found)} saturated hereditary sets over {n} vertices")
    return _assemble(g, found)

def _assemble(g: Graph, elements: List[VertexSet]) -> IdealLattice:
    row_finite = correspondence_property_table(g).row_finite
    if len(elements) > LATTICE_MAX_TABLE:
        logger.warning(f"Lattice has {len(elements)} elements; order and meet/join tables are skipped")
        return IdealLattice(elements=elements, order=[], meet=[], join=[], row_finite=row_finite, complete_tables=False)

    position: Dict[VertexSet, int] = {h: i for i, h in enumerate(elements)}
    order = [(i, j) for i, a in enumerate(elements) for j, b in enumerate(elements) if a.issubset(b)]

    meet: List[List[int]] = []
    join: List[List[int]] = []
    for a in elements:
        meet_row = []
        join_row = []
        for b in elements:
            low = a.intersection(b)
            high = saturation_closure(g, a.union(b))
            if low not in position or high not in position:
                raise VerificationError(
                    "Lattice is not closed under meet and join",
                    {"left": a.label(), "right": b.label(), "meet": low.label(), "join": high.label()},
                )
            meet_row.append(position[low])
            join_row.append(position[high])
        meet.append(meet_row)
        join.append(join_row)

    return IdealLattice(elements=elements, order=order, meet=meet, join=join, row_finite=row_finite)

def tails_image(f: Graph, h: VertexSet) -> VertexSet:
    """H -> H together with the rays of f attached at vertices of H."""
    rays = {t.id for t in f.tails if t.attach in h.base}
    return VertexSet.of(h.base, h.rays | rays)

def tails_lattice_map(g: Graph) -> LatticeIso:
    require_valid(g)
    if g.tails:
        raise CorrtailError(status_code=422, detail="The tail lattice map is defined for ray-free graphs")

    f = add_tails(g)
    source = enumerate_saturated_hereditary(g)
    target = enumerate_saturated_hereditary(f)
    pairs = [(h, tails_image(f, h)) for h in source.elements]

    hits: Set[VertexSet] = set(target.elements)
    for h, image in pairs:
        if image not in hits:
            raise VerificationError(
                "Image of a saturated hereditary set is not saturated hereditary after adding tails",
                {"source": h.label(), "image": image.label()},
            )

    images = [image for _, image in pairs]
    if len(set(images)) != len(images):
        raise VerificationError("Tail lattice map is not injective", {"images": [i.label() for i in images]})
    if len(images) != len(target.elements):
        missed = [t.label() for t in target.elements if t not in set(images)]
        raise VerificationError("Tail lattice map is not surjective", {"missed": missed})

    for a, image_a in pairs:
        for b, image_b in pairs:
            if a.issubset(b) != image_a.issubset(image_b):
                raise VerificationError(
                    "Tail lattice map does not preserve inclusion in both directions",
                    {"left": a.label(), "right": b.label()},
                )

    logger.info(f"Verified tail lattice isomorphism on {len(pairs)} elements")
    return LatticeIso(source=source, target=target, pairs=pairs)

def lattice_report(l: IdealLattice) -> LatticeReport:
    labels = [h.label() for h in l.elements]
    notes: List[str] = []
    if not l.row_finite:
        notes.append(
            "Graph is not row-finite: the lattice lists saturated hereditary sets only; "
            "gauge-invariant ideals additionally carry breaking-vertex data"
        )
    if not l.complete_tables:
        notes.append(f"Order, Hasse diagram and meet/join tables skipped above {LATTICE_MAX_TABLE} elements")
        return LatticeReport(count=len(labels), elements=labels, hasse=[], meet=[], join=[], notes=notes)

    below = set(l.order)
    hasse = []
    for i, j in l.order:
        if i == j:
            continue
        if any(k not in (i, j) and (i, k) in below and (k, j) in below for k in range(len(labels))):
            continue
        hasse.append((labels[i], labels[j]))

    return LatticeReport(
        count=len(labels),
        elements=labels,
        hasse=hasse,
        meet=[[labels[k] for k in row] for row in l.meet],
        join=[[labels[k] for k in row] for row in l.join],
        notes=notes,
    )
