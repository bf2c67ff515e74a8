import pytest
from sympy import QQ

from corrtail.services.ck_family import generators, path_space_rep
from corrtail.services.errors import CorrtailError
from corrtail.services.linalg import (
    EchelonBasis,
    adjoint,
    block,
    block_diagonal,
    compress,
    equal,
    flatten,
    ideal_closure,
    identity,
    is_homogeneous,
    is_partial_isometry,
    is_projection,
    laurent_coefficients,
    map_kernel,
    matrix,
    mul,
    rank,
    span_closure,
    subspace,
    unit,
    zero,
)
from corrtail.schemas.schema import VertexSet


def test_products_stay_exact():
    half = matrix(2, {(0, 0): QQ(1, 2), (1, 1): QQ(1, 2)})
    assert equal(mul(half, half), matrix(2, {(0, 0): QQ(1, 4), (1, 1): QQ(1, 4)}))
    assert flatten(zero(3)) == {}
    assert rank(zero(2)) == 0
    assert rank(identity(3)) == 3


def test_projection_predicates():
    assert is_projection(unit(2, 0, 0))
    assert not is_projection(unit(2, 0, 1))
    assert is_partial_isometry(unit(2, 0, 1))
    assert equal(adjoint(unit(2, 0, 1)), unit(2, 1, 0))


def test_blocks():
    m = block_diagonal(unit(2, 0, 1), identity(1))
    assert m.shape == (3, 3)
    assert equal(block(m, 0, 2), unit(2, 0, 1))
    assert equal(block(m, 2, 1), identity(1))


def test_echelon_basis_detects_dependence():
    basis = EchelonBasis()
    assert basis.add(flatten(unit(2, 0, 0)))
    assert basis.add(flatten(identity(2)))
    assert not basis.add(flatten(unit(2, 1, 1)))
    assert basis.contains(flatten(matrix(2, {(0, 0): 3, (1, 1): -2})))
    assert len(basis) == 2


def test_span_of_identity_is_scalars():
    assert span_closure([identity(3)]).dimension == 1


def test_span_of_matrix_unit_is_full_algebra():
    algebra = span_closure([unit(2, 0, 1)])
    assert algebra.dimension == 4
    assert len(algebra.basis()) == 4


def test_span_of_path_representations(e2):
    assert span_closure(generators(path_space_rep(e2, VertexSet.of(["v"])))).dimension == 4
    assert span_closure(generators(path_space_rep(e2, VertexSet()))).dimension == 5


def test_span_rejects_size_mismatch():
    with pytest.raises(CorrtailError) as exc:
        span_closure([identity(2), identity(3)])
    assert exc.value.status_code == 400


def test_subspace_does_not_multiply():
    assert subspace([unit(2, 0, 1), unit(2, 1, 0)]).dimension == 2


def test_ideal_and_corner():
    algebra = span_closure([unit(2, 0, 1)])
    assert ideal_closure(algebra, [unit(2, 0, 0)]).dimension == 4
    assert ideal_closure(algebra, []).dimension == 0
    assert compress(algebra, unit(2, 0, 0)).dimension == 1


def test_ideal_inside_direct_sum():
    algebra = span_closure([unit(3, 0, 1), unit(3, 2, 2)])
    assert algebra.dimension == 5
    assert ideal_closure(algebra, [unit(3, 2, 2)]).dimension == 1


def test_laurent_coefficients():
    degrees = [0, 1]
    m = matrix(2, {(0, 0): 1, (1, 0): 2})
    coefficients = laurent_coefficients(m, degrees)
    assert sorted(coefficients) == [0, 1]
    assert equal(coefficients[1], matrix(2, {(1, 0): 2}))
    assert not is_homogeneous(m, degrees, 0)
    assert is_homogeneous(unit(2, 1, 0), degrees, 1)


def test_map_kernel_identity():
    gens = [unit(2, 0, 0), unit(2, 1, 1), unit(2, 1, 0)]
    kernel = map_kernel(gens, gens)
    assert kernel.well_defined
    assert kernel.kernel_dimension == 0
    assert kernel.witness is None


def test_map_kernel_onto_smaller_algebra():
    # C + C -> C, killing the second summand
    kernel = map_kernel([unit(2, 0, 0), unit(2, 1, 1)], [identity(1), zero(1)])
    assert kernel.well_defined
    assert (kernel.domain_dimension, kernel.image_dimension, kernel.kernel_dimension) == (2, 1, 1)
    assert kernel.witness is not None
    assert equal(mul(kernel.witness, unit(2, 0, 0)), zero(2))


def test_map_kernel_detects_non_multiplicative_map():
    kernel = map_kernel([unit(2, 0, 0), unit(2, 1, 1)], [identity(1), identity(1)])
    assert not kernel.well_defined
    assert kernel.witness is not None


def test_map_kernel_reuses_a_given_domain_closure():
    gens = [unit(2, 0, 0), unit(2, 1, 1), unit(2, 1, 0)]
    domain = span_closure(gens)
    kernel = map_kernel(gens, gens, domain=domain)
    assert (kernel.domain_dimension, kernel.image_dimension, kernel.kernel_dimension) == (4, 4, 0)


def test_map_kernel_with_equal_but_distinct_targets():
    gens = [unit(2, 0, 0), unit(2, 1, 1), unit(2, 1, 0)]
    copies = [unit(2, 0, 0), unit(2, 1, 1), unit(2, 1, 0)]
    kernel = map_kernel(gens, copies)
    assert kernel.well_defined
    assert kernel.kernel_dimension == 0
    assert kernel.image_dimension == 4
