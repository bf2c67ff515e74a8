import pytest

from corrtail.schemas.schema import HomSpec, VertexSet
from corrtail.services.errors import CorrtailError
from corrtail.services.ck_family import AlgebraCache
from corrtail.services.giu import giu_test, parse_matrix
from corrtail.services.linalg import equal, unit

ONE = [[(1, 1)]]
E00 = [[(1, 1), (0, 1)], [(0, 1), (0, 1)]]
E11 = [[(0, 1), (0, 1)], [(0, 1), (1, 1)]]
E10 = [[(0, 1), (0, 1)], [(1, 1), (0, 1)]]


def test_parse_matrix():
    m = parse_matrix([[(1, 2), (0, 1)], [(0, 1), (3, 1)]])
    assert m.shape == (2, 2)
    assert not equal(m, unit(2, 0, 0))


def test_parse_matrix_rejects_zero_denominator():
    with pytest.raises(CorrtailError) as exc:
        parse_matrix([[(1, 0)]])
    assert exc.value.status_code == 400


def test_parse_matrix_rejects_ragged_rows():
    with pytest.raises(CorrtailError) as exc:
        parse_matrix([[(1, 1), (0, 1)], [(0, 1)]])
    assert exc.value.status_code == 400


def test_identity_is_injective(e1):
    report = giu_test(e1, VertexSet.of(["u", "v"]), HomSpec())
    assert report.passed
    assert report.data["kernel_dimension"] == 0
    assert report.data["failing"] == []
    assert report.data["domain_dimension"] == 16


def test_quotient_by_everything_kills_vertices(e1):
    everything = VertexSet.of(["u", "v", "w"])
    report = giu_test(e1, VertexSet.of(["u", "v"]), HomSpec(kind="quotient", vertices=everything))
    assert report.passed
    assert "(1) rho(p_v) != 0" in report.data["failing"]
    assert report.data["kernel_dimension"] == 16
    assert report.data["witnesses"]["(1)"] == ["u", "v", "w"]


def test_collapse_fails_the_defect_condition(e2):
    report = giu_test(e2, VertexSet(), HomSpec(kind="collapse", vertices=VertexSet.of(["v"])))
    assert report.passed
    assert report.data["failing"] == ["(2) rho(p_v - sum s_e s_e*) != 0 off V"]
    assert report.data["kernel_dimension"] == 1
    assert report.data["witnesses"]["(2)"] == ["v"]
    assert report.data["kernel_witness"] is not None


def test_collapse_needs_a_wider_set(e2):
    with pytest.raises(CorrtailError) as exc:
        giu_test(e2, VertexSet.of(["v"]), HomSpec(kind="collapse", vertices=VertexSet()))
    assert exc.value.status_code == 422


def test_explicit_matrices(e2):
    spec = HomSpec(
        kind="matrices",
        projections={"w": E00, "v": E11},
        isometries={"e": E10},
        degrees=[0, 1],
    )
    report = giu_test(e2, VertexSet.of(["v"]), spec)
    assert report.passed
    assert report.data["failing"] == []
    assert report.data["kernel_dimension"] == 0


def test_explicit_matrices_without_grading_fail_equivariance(e2):
    spec = HomSpec(kind="matrices", projections={"w": E00, "v": E11}, isometries={"e": E10})
    report = giu_test(e2, VertexSet.of(["v"]), spec)
    assert report.passed
    assert report.data["failing"] == ["(3) gauge equivariant"]
    assert report.data["witnesses"]["(3)"] == ["e"]


def test_overlapping_projections_rejected(e2):
    spec = HomSpec(kind="matrices", projections={"w": ONE, "v": ONE}, isometries={"e": ONE})
    with pytest.raises(CorrtailError) as exc:
        giu_test(e2, VertexSet.of(["v"]), spec)
    assert exc.value.status_code == 422


def test_missing_generator_rejected(e2):
    spec = HomSpec(kind="matrices", projections={"w": E00, "v": E11})
    with pytest.raises(CorrtailError) as exc:
        giu_test(e2, VertexSet.of(["v"]), spec)
    assert exc.value.status_code == 404


def test_zero_denominator_rejected(e2):
    spec = HomSpec(kind="matrices", projections={"w": [[(1, 0)]], "v": ONE}, isometries={"e": ONE})
    with pytest.raises(CorrtailError) as exc:
        giu_test(e2, VertexSet.of(["v"]), spec)
    assert exc.value.status_code == 400


def test_mixed_sizes_rejected(e2):
    spec = HomSpec(kind="matrices", projections={"w": E00, "v": ONE}, isometries={"e": E10})
    with pytest.raises(CorrtailError) as exc:
        giu_test(e2, VertexSet.of(["v"]), spec)
    assert exc.value.status_code == 400


def test_quotient_needs_full_relative_set(e1):
    with pytest.raises(CorrtailError) as exc:
        giu_test(e1, VertexSet(), HomSpec(kind="quotient", vertices=VertexSet.of(["u", "v", "w"])))
    assert exc.value.status_code == 422


@pytest.mark.parametrize(
    "V, spec",
    [
        (VertexSet(), HomSpec(kind="identity")),
        (VertexSet(), HomSpec(kind="collapse", vertices=VertexSet.of(["v"]))),
        (VertexSet.of(["v"]), HomSpec(kind="quotient", vertices=VertexSet.of(["w", "v"]))),
    ],
)
def test_shared_cache_gives_the_same_report(e2, V, spec):
    cache = AlgebraCache(e2)
    assert giu_test(e2, V, spec, cache).data == giu_test(e2, V, spec).data
    # a second call reuses the cached closures
    assert giu_test(e2, V, spec, cache).data == giu_test(e2, V, spec).data
