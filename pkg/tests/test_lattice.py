import pytest

from corrtail.schemas.schema import VertexSet
from corrtail.services.errors import CorrtailError
from corrtail.services.lattice import enumerate_saturated_hereditary, lattice_report, tails_lattice_map
from corrtail.services.transforms import add_tails


def test_e1_lattice_is_a_chain(e1):
    lattice = enumerate_saturated_hereditary(e1)
    assert lattice.elements == [VertexSet(), VertexSet.of(["u", "v", "w"])]
    assert lattice.order == [(0, 0), (0, 1), (1, 1)]
    assert lattice.meet == [[0, 0], [0, 1]]
    assert lattice.join == [[0, 1], [1, 1]]


def test_e3_lattice(e3):
    lattice = enumerate_saturated_hereditary(e3)
    assert [h.label() for h in lattice.elements] == ["{}", "{w1}", "{w2}", "{w1,w2}", "{v,w1,w2}"]
    assert not lattice.row_finite


def test_edgeless_lattice_is_boolean(edgeless_pair):
    report = lattice_report(enumerate_saturated_hereditary(edgeless_pair))
    assert report.count == 4
    assert sorted(report.hasse) == [("{x}", "{x,y}"), ("{y}", "{x,y}"), ("{}", "{x}"), ("{}", "{y}")]
    assert report.meet[1][2] == "{}"
    assert report.join[1][2] == "{x,y}"


def test_loop_lattice(c5):
    assert [h.label() for h in enumerate_saturated_hereditary(c5).elements] == ["{}", "{v}"]


def test_report_e1(e1):
    report = lattice_report(enumerate_saturated_hereditary(e1))
    assert report.count == 2
    assert report.hasse == [("{}", "{u,v,w}")]
    assert report.notes == []


def test_report_notes_non_row_finite(e3):
    report = lattice_report(enumerate_saturated_hereditary(e3))
    assert report.count == 5
    assert any("not row-finite" in note for note in report.notes)


def test_tailed_lattice_ties_rays_to_vertices(e1):
    lattice = enumerate_saturated_hereditary(add_tails(e1))
    assert lattice.elements == [VertexSet(), VertexSet.of(["u", "v", "w"], ["w.tail"])]


def test_tails_map_e1(e1):
    iso = tails_lattice_map(e1)
    assert [(a.label(), b.label()) for a, b in iso.pairs] == [("{}", "{}"), ("{u,v,w}", "{u,v,w,ray(w.tail)}")]


def test_tails_map_without_sinks_is_identity(c5):
    iso = tails_lattice_map(c5)
    assert all(a == b for a, b in iso.pairs)


def test_tails_map_isolated_vertex(z):
    iso = tails_lattice_map(z)
    assert len(iso.source.elements) == len(iso.target.elements) == 2


def test_tails_map_rejects_rays(e1):
    with pytest.raises(CorrtailError) as exc:
        tails_lattice_map(add_tails(e1))
    assert exc.value.status_code == 422


def test_enumeration_budget(e1):
    with pytest.raises(CorrtailError) as exc:
        enumerate_saturated_hereditary(e1, max_vertices=2)
    assert exc.value.status_code == 413
