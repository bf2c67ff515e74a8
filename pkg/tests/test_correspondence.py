import pytest

from corrtail.schemas.schema import Edge, Graph, IdealOfA, TailBlock, VertexSet
from corrtail.services.corpus import FIXTURES
from corrtail.services.correspondence import (
    add_tail_correspondence,
    build_graph_correspondence,
    check_tail_lemmas,
    compute_ideals,
    epsilon,
    is_X_invariant,
    is_X_saturated,
    left_support,
    quotient_correspondence,
    right_support,
)
from corrtail.services.errors import CorrtailError


def ideal(*vertices, rays=()):
    return IdealOfA(support=VertexSet.of(vertices, rays))


def test_multiplicity_rows(e1, e3):
    x = build_graph_correspondence(e1)
    assert x.out_mult == {"u": {"v": 1, "w": 1}, "v": {"w": 1}, "w": {}}
    assert x.in_mult["w"] == {"u": 1, "v": 1}
    assert build_graph_correspondence(e3).out_mult["v"] == {"w1": "omega", "w2": 1}


def test_parallel_edges_add_up():
    g = Graph(vertices=("a", "b"), edges=(Edge(id="e", src="a", rng="b"), Edge(id="f", src="a", rng="b", mult=2)))
    assert build_graph_correspondence(g).out_mult["a"] == {"b": 3}


def test_supports(e1):
    x = build_graph_correspondence(e1)
    assert left_support(x, ideal("v")) == frozenset({"v->w"})
    assert right_support(x, ideal("w")) == frozenset({"u->w", "v->w"})


def test_ideals_e1(e1):
    ideals = compute_ideals(build_graph_correspondence(e1))
    assert ideals.ker_phi.support == VertexSet.of(["w"])
    assert ideals.j_big.support == VertexSet.of(["u", "v", "w"])
    assert ideals.j_x.support == VertexSet.of(["u", "v"])


def test_ideals_c5(c5):
    ideals = compute_ideals(build_graph_correspondence(c5))
    assert ideals.ker_phi.support == VertexSet()
    assert ideals.j_big.support == ideals.j_x.support == VertexSet.of(["v"])


def test_ideals_e3(e3):
    ideals = compute_ideals(build_graph_correspondence(e3))
    assert ideals.ker_phi.support == VertexSet.of(["w1", "w2"])
    assert ideals.j_big.support == VertexSet.of(["w1", "w2"])
    assert ideals.j_x.support == VertexSet()


def test_invariance_and_saturation_e1(e1):
    x = build_graph_correspondence(e1)
    assert is_X_invariant(x, ideal("w"))
    assert not is_X_saturated(x, ideal("w"))
    assert not is_X_invariant(x, ideal("u"))
    assert is_X_invariant(x, ideal()) and is_X_saturated(x, ideal())


def test_invariance_and_saturation_e3(e3):
    x = build_graph_correspondence(e3)
    assert is_X_invariant(x, ideal("w1"))
    assert is_X_saturated(x, ideal("w1"))


def test_quotient_e3_reports_violated_hypothesis(e3):
    q = quotient_correspondence(build_graph_correspondence(e3), ideal("w1"))
    assert q.inclusion_holds
    assert not q.equality_holds
    assert q.q_jx.support == VertexSet()
    assert q.j_quotient.support == VertexSet.of(["v"])
    assert q.b_h == VertexSet.of(["v"])
    assert q.violated_hypotheses == ["phi(A) in K(X)"]


def test_full_quotient_is_zero(e1):
    q = quotient_correspondence(build_graph_correspondence(e1), ideal("u", "v", "w"))
    assert q.quotient.graph.vertices == ()
    assert q.equality_holds
    assert q.violated_hypotheses == []


def test_trivial_quotient_keeps_j_x():
    g = Graph(vertices=("v", "w"), edges=(Edge(id="e", src="v", rng="v"), Edge(id="f", src="v", rng="w")))
    x = build_graph_correspondence(g)
    q = quotient_correspondence(x, ideal())
    assert q.quotient.graph == g
    assert q.q_jx.support == compute_ideals(x).j_x.support


def test_quotient_rejects_non_invariant_ideal(e1):
    with pytest.raises(CorrtailError) as exc:
        quotient_correspondence(build_graph_correspondence(e1), ideal("u"))
    assert exc.value.status_code == 422


def test_tail_correspondence_e1(e1):
    y = add_tail_correspondence(build_graph_correspondence(e1))
    assert y.blocks == [TailBlock(vertex="w", ray="w.tail")]
    assert y.tailed.tails == {"w": "w.tail"}
    assert epsilon(y, 2, "w") == "w.tail@2"


def test_tail_correspondence_without_kernel(c5):
    y = add_tail_correspondence(build_graph_correspondence(c5))
    assert y.blocks == []
    assert y.tailed.out_mult == y.base.out_mult


def test_epsilon_rejects_bad_arguments(e1):
    y = add_tail_correspondence(build_graph_correspondence(e1))
    with pytest.raises(CorrtailError) as exc:
        epsilon(y, 0, "w")
    assert exc.value.status_code == 400
    with pytest.raises(CorrtailError) as exc:
        epsilon(y, 1, "u")
    assert exc.value.status_code == 404


def test_tail_lemmas_report_epsilon_addresses(e2_plus_z):
    report = check_tail_lemmas(add_tail_correspondence(build_graph_correspondence(e2_plus_z)))
    assert report.passed
    assert report.data["epsilon"] == {
        "w": ["w.tail@1", "w.tail@2"],
        "z": ["z.tail@1", "z.tail@2"],
    }


@pytest.mark.parametrize("name", ["E1", "E2", "E3", "C5", "z"])
def test_tail_lemmas_hold_on_fixtures(name):
    report = check_tail_lemmas(add_tail_correspondence(build_graph_correspondence(FIXTURES[name])))
    assert report.passed


def test_tail_lemmas_e3_exclude_infinite_emitter(e3):
    report = check_tail_lemmas(add_tail_correspondence(build_graph_correspondence(e3)))
    decomposition = next(c for c in report.checks if c.name == "J(Y) decomposes as J_X + ker phi + tail")
    assert "v," not in decomposition.detail and "{v" not in decomposition.detail
