import pytest

from corrtail.schemas.schema import Edge, Graph, VertexSet
from corrtail.services.ck_family import AlgebraCache
from corrtail.services.errors import CorrtailError
from corrtail.services.transforms import add_tails
from corrtail.services.verify import (
    CORNER_NOTES,
    TailPicture,
    ideal_map_check,
    verify_corner,
    verify_quotient,
    verify_relgas,
    verify_subalgebra,
    verify_tail_relation_lemmas,
)


# Relative graph algebras
def test_relgas_e2_empty_set(e2):
    report = verify_relgas(e2, VertexSet())
    assert report.passed
    assert report.data["relative_dimension"] == 5
    assert report.data["graph_dimension"] == 5


def test_relgas_e2_full_set(e2):
    report = verify_relgas(e2, VertexSet.of(["v"]))
    assert report.passed
    assert report.data["relative_dimension"] == 4


def test_relgas_e1_empty_set(e1):
    report = verify_relgas(e1, VertexSet())
    assert report.passed
    assert report.data["relative_dimension"] == 21
    assert report.data["path_count"] == 21


def test_relgas_rejects_rays(e2):
    with pytest.raises(CorrtailError) as exc:
        verify_relgas(add_tails(e2), VertexSet())
    assert exc.value.status_code == 422


# Tails
def test_tail_picture_slots(z):
    picture = TailPicture(z, 2)
    assert sorted(picture.slots) == [("z", 1), ("z", 2)]
    assert picture.rep.size == 3


def test_tail_lemmas_e1(e1):
    report = verify_tail_relation_lemmas(e1, 3)
    assert report.passed
    assert report.data["tail_generators"] == 3


def test_tail_lemmas_single_sink(z):
    report = verify_tail_relation_lemmas(z, 2)
    assert report.passed
    assert report.data["size"] == 3


def test_tail_lemmas_vacuous_without_sinks(c5):
    report = verify_tail_relation_lemmas(c5, 2)
    assert report.passed
    assert [check.name for check in report.checks] == ["no sinks, so no tail generators"]


def test_corner_single_sink(z):
    report = verify_corner(z, 1)
    assert report.passed
    assert report.data["full_dimension"] == 4
    assert report.data["corner_dimension"] == 1
    assert report.notes == CORNER_NOTES


def test_corner_e1(e1):
    report = verify_corner(e1, 2)
    assert report.passed
    assert report.data["corner_dimension"] == 16


def test_corner_vacuous_without_sinks(c5):
    report = verify_corner(c5, 1)
    assert report.passed
    assert report.data["projection"] == "identity"


# Quotients and subalgebras
def test_quotient_by_everything(e1):
    report = verify_quotient(e1, VertexSet.of(["u", "v", "w"]))
    assert report.passed
    assert report.data == {"algebra": 16, "ideal": 16, "quotient": 0}


def test_quotient_by_isolated_vertex(e2_plus_z):
    report = verify_quotient(e2_plus_z, VertexSet.of(["z"]))
    assert report.passed
    assert report.data == {"algebra": 5, "ideal": 1, "quotient": 4}


def test_subalgebra_drops_one_edge(e1):
    f = Graph(
        vertices=("u", "v", "w"),
        edges=(Edge(id="e", src="u", rng="v"), Edge(id="g", src="v", rng="w")),
    )
    report = verify_subalgebra(e1, f)
    assert report.passed
    assert report.data["relative_set"] == ["v"]
    assert report.data["dimension"] == 10


def test_ideal_map(e2_plus_z):
    report = ideal_map_check(e2_plus_z)
    assert report.passed
    assert len(report.data["dimensions"]) == 4
    assert report.data["dimensions"]["{}"] == 0
    assert report.data["dimensions"]["{v,w,z}"] == 5


def test_checks_agree_with_a_shared_cache(e2_plus_z):
    cache = AlgebraCache(e2_plus_z)
    assert verify_relgas(e2_plus_z, VertexSet(), cache).data == verify_relgas(e2_plus_z, VertexSet()).data
    assert verify_quotient(e2_plus_z, VertexSet.of(["z"]), cache).data == {"algebra": 5, "ideal": 1, "quotient": 4}
    assert ideal_map_check(e2_plus_z, cache).data == ideal_map_check(e2_plus_z).data


def test_tail_checks_share_one_picture(e1):
    picture = TailPicture(e1, 2)
    assert verify_tail_relation_lemmas(e1, 2, picture).passed
    assert verify_corner(e1, 2, picture).data["corner_dimension"] == 16
    assert {"original_algebra", "full_algebra"} <= set(vars(picture))
