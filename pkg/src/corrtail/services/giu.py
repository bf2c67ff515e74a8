import logging
from typing import Optional

from sympy import QQ

from ..schemas.schema import CheckReport, CKRep, GaugeGrading, Graph, HomSpec, RationalMatrix, VertexSet
from .ck_family import AlgebraCache, edge_sums, path_space_rep, verify_ck_relations
from .errors import CorrtailError, VerificationError
from .graph_core import regular_vertices, require_vertex_set
from .linalg import describe, is_homogeneous, is_zero, map_kernel, matrix, sub, zero
from .transforms import quotient_graph

logger = logging.getLogger(__name__)

def parse_matrix(rows: RationalMatrix) -> object:
    size = len(rows)
    entries = {}
    for i, row in enumerate(rows):
        if len(row) != size:
            raise CorrtailError(status_code=400, detail=f"Matrix row {i} has {len(row)} entries; expected {size}")
        for j, (numerator, denominator) in enumerate(row):
            if denominator == 0:
                raise CorrtailError(status_code=400, detail=f"Zero denominator at ({i},{j})")
            if numerator:
                entries[(i, j)] = QQ(numerator, denominator)
    return matrix(size, entries)

def _collapse_set(g: Graph, spec: HomSpec) -> VertexSet:
    return spec.vertices if spec.vertices is not None else regular_vertices(g)

def _target_family(g: Graph, V: VertexSet, domain: CKRep, spec: HomSpec, cache: Optional[AlgebraCache] = None) -> CKRep:
    """Images of the generators p_v, s_e under rho, packaged with the target grading."""
    if spec.kind == "identity":
        return domain

    if spec.kind == "collapse":
        wider = _collapse_set(g, spec)
        if not V.issubset(wider) or not wider.issubset(regular_vertices(g)):
            raise CorrtailError(status_code=422, detail="Collapse target needs V inside V' inside R(E)")
        target = cache.rep(wider) if cache is not None else path_space_rep(g, wider)
        return target.model_copy(update={"relative": V})

    if spec.kind == "quotient":
        if spec.vertices is None:
            raise CorrtailError(status_code=400, detail="Quotient target needs the vertex set H")
        if V != regular_vertices(g):
            raise CorrtailError(status_code=422, detail="Quotient targets are defined for the full graph algebra, V = R(E)")
        quotient = quotient_graph(g, spec.vertices)
        if not quotient.graph.vertices:
            # C*(E)/I_E = 0, realised on a one-dimensional zero space
            projections = {v: zero(1) for v in g.vertices}
            isometries = {c: zero(1) for c in domain.isometries}
            return CKRep(graph=g, relative=V, basis=("0",), grading=GaugeGrading(degree=(0,)), projections=projections, isometries=isometries)
        target = path_space_rep(quotient.graph, quotient.relative_set)
        projections = {v: target.projections.get(v, zero(target.size)) for v in g.vertices}
        isometries = {c: target.isometries.get(c, zero(target.size)) for c in domain.isometries}
        return CKRep(graph=g, relative=V, basis=target.basis, grading=target.grading, projections=projections, isometries=isometries)

    # user-supplied matrices
    given_p = spec.projections or {}
    given_s = spec.isometries or {}
    missing = sorted(set(domain.projections) - set(given_p)) + sorted(set(domain.isometries) - set(given_s))
    unknown = sorted(set(given_p) - set(domain.projections)) + sorted(set(given_s) - set(domain.isometries))
    if missing or unknown:
        raise CorrtailError(status_code=404, detail=f"Target matrices must name every generator; missing {missing}, unknown {unknown}")
    projections = {v: parse_matrix(rows) for v, rows in given_p.items()}
    isometries = {c: parse_matrix(rows) for c, rows in given_s.items()}
    sizes = {m.shape[0] for m in list(projections.values()) + list(isometries.values())}
    if not sizes:
        raise CorrtailError(status_code=400, detail="A matrix target needs at least one generator")
    if len(sizes) != 1:
        raise CorrtailError(status_code=400, detail=f"Target matrices have mixed sizes {sorted(sizes)}")
    size = sizes.pop()
    degrees = tuple(spec.degrees) if spec.degrees is not None else tuple([0] * size)
    if len(degrees) != size:
        raise CorrtailError(status_code=400, detail=f"Target grading has {len(degrees)} degrees for size {size}")
    return CKRep(
        graph=g,
        relative=V,
        basis=tuple(str(i) for i in range(size)),
        grading=GaugeGrading(degree=degrees),
        projections=projections,
        isometries=isometries,
    )

def giu_test(g: Graph, V: VertexSet, target: HomSpec, cache: Optional[AlgebraCache] = None) -> CheckReport:
    """Gauge-invariant uniqueness on one homomorphism rho given on generators."""
    require_vertex_set(g, V)
    domain = cache.rep(V) if cache is not None else path_space_rep(g, V)
    image = _target_family(g, V, domain, target, cache)

    relations = verify_ck_relations(image, V)
    broken = [c for c in relations.failures() if c.name not in ("strict defect off V", "gauge grading")]
    if broken:
        raise CorrtailError(
            status_code=422,
            detail=f"Target does not satisfy the relations of C*(E,V): {', '.join(f'{c.name} at {c.witnesses}' for c in broken)}",
        )

    vertices = sorted(domain.projections)
    edges = sorted(domain.isometries)
    domain_gens = [domain.projections[v] for v in vertices] + [domain.isometries[c] for c in edges]
    target_gens = [image.projections[v] for v in vertices] + [image.isometries[c] for c in edges]
    closures = {}
    if cache is not None:
        closures["domain"] = cache.algebra(V)
        if target.kind == "collapse":
            closures["image"] = cache.algebra(_collapse_set(g, target))
    kernel = map_kernel(domain_gens, target_gens, **closures)
    if not kernel.well_defined:
        witness = describe(kernel.witness) if kernel.witness is not None else ""
        raise CorrtailError(status_code=422, detail=f"Target is not multiplicative on generators; rho(0) = {witness}")

    sums = edge_sums(image)
    missing_vertices = [v for v in vertices if is_zero(image.projections[v])]
    flat_defects = [
        v for v in sorted(regular_vertices(g).base - V.base)
        if is_zero(sub(image.projections[v], sums[v]))
    ]
    degrees = image.grading.degree
    off_degree = [v for v in vertices if not is_homogeneous(image.projections[v], degrees, 0)]
    off_degree += [c for c in edges if not is_homogeneous(image.isometries[c], degrees, 1)]

    conditions = {
        "(1) rho(p_v) != 0": not missing_vertices,
        "(2) rho(p_v - sum s_e s_e*) != 0 off V": not flat_defects,
        "(3) gauge equivariant": not off_degree,
    }
    failing = [name for name, holds in conditions.items() if not holds]

    report = CheckReport(title=f"gauge-invariant uniqueness for a {target.kind} map")
    report.add(
        "conditions imply injectivity",
        bool(failing) or kernel.kernel_dimension == 0,
        detail=f"kernel dimension {kernel.kernel_dimension}",
    )
    report.add(
        "a nonzero kernel is explained by a failing condition",
        kernel.kernel_dimension == 0 or bool(failing),
    )
    report.data.update({
        "conditions": conditions,
        "failing": failing,
        "witnesses": {
            "(1)": missing_vertices,
            "(2)": flat_defects,
            "(3)": off_degree,
        },
        "domain_dimension": kernel.domain_dimension,
        "image_dimension": kernel.image_dimension,
        "kernel_dimension": kernel.kernel_dimension,
        "kernel_witness": describe(kernel.witness) if kernel.witness is not None else None,
    })

    logger.info(f"GIU on {V.label()}: kernel dimension {kernel.kernel_dimension}, failing conditions {failing}")
    if not report.passed:
        raise VerificationError("Gauge-invariant uniqueness violated", report.model_dump())
    return report
