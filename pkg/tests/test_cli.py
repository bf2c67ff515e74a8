import json

import pytest

from corrtail.main import build_parser, main
from corrtail.services.serialization import graph_to_json


@pytest.fixture
def graph_file(tmp_path, e1):
    path = tmp_path / "e1.json"
    path.write_text(graph_to_json(e1), encoding="utf-8")
    return str(path)


@pytest.fixture
def set_file(tmp_path):
    def write(members):
        path = tmp_path / "set.json"
        path.write_text(json.dumps(members), encoding="utf-8")
        return str(path)
    return write


def _read(path):
    return json.loads(path.read_text(encoding="utf-8"))


def _error(capsys):
    err = capsys.readouterr().err
    return json.loads(err[err.index("{\n"):])


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_export_json(graph_file, tmp_path, e1):
    out = tmp_path / "out.json"
    assert main(["export", "--in", graph_file, "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8") == graph_to_json(e1)


def test_export_dot(graph_file, tmp_path):
    out = tmp_path / "out.dot"
    assert main(["export", "--in", graph_file, "--format", "dot", "--out", str(out)]) == 0
    assert "u -> v" in out.read_text(encoding="utf-8")


def test_export_unknown_format(graph_file, capsys):
    assert main(["export", "--in", graph_file, "--format", "graphml"]) == 2
    assert _error(capsys)["status_code"] == 400


def test_missing_input(tmp_path, capsys):
    assert main(["export", "--in", str(tmp_path / "absent.json")]) == 2
    assert _error(capsys)["status_code"] == 404


def test_transform_add_tails(graph_file, tmp_path):
    out = tmp_path / "tailed.json"
    dot = tmp_path / "tailed.dot"
    assert main(["transform", "--op", "add-tails", "--in", graph_file, "--out", str(out), "--dot", str(dot)]) == 0
    assert _read(out)["tails"] == [{"attach": "w", "id": "w.tail"}]
    assert "..." in dot.read_text(encoding="utf-8")


def test_transform_closure_has_no_dot(graph_file, set_file, tmp_path):
    args = ["transform", "--op", "saturation-closure", "--in", graph_file, "--set", set_file(["w"])]
    assert main(args + ["--out", str(tmp_path / "closure.json")]) == 0
    assert _read(tmp_path / "closure.json")["base"] == ["u", "v", "w"]
    assert main(args + ["--dot", str(tmp_path / "closure.dot")]) == 2


def test_transform_truncate_needs_depth(graph_file):
    assert main(["transform", "--op", "truncate", "--in", graph_file]) == 2


def test_lattice(graph_file, tmp_path):
    out = tmp_path / "lattice.json"
    assert main(["lattice", "--in", graph_file, "--verify-tails", "--verify-ideal-map", "--out", str(out)]) == 0
    payload = _read(out)
    assert payload["report"]["count"] == 2
    assert payload["ideal_map"]["passed"]
    assert len(payload["tails"]) == 2


def test_corr_ideals(graph_file, tmp_path):
    out = tmp_path / "ideals.json"
    assert main(["corr", "--op", "ideals", "--in", graph_file, "--out", str(out)]) == 0
    payload = _read(out)
    assert payload["ker_phi"]["support"]["base"] == ["w"]
    assert payload["j_x"]["support"]["base"] == ["u", "v"]


def test_corr_invariant_needs_set(graph_file):
    assert main(["corr", "--op", "invariant", "--in", graph_file]) == 2


def test_rep_build(graph_file, tmp_path):
    out = tmp_path / "rep.json"
    assert main(["rep", "--op", "build", "--in", graph_file, "--out", str(out)]) == 0
    assert _read(out)["basis"] == ["(w)", "(f)", "(g)", "(e,g)"]


def test_rep_verify_adds_notes(graph_file, tmp_path):
    out = tmp_path / "verify.json"
    assert main(["rep", "--op", "verify", "--in", graph_file, "--out", str(out)]) == 0
    payload = _read(out)
    assert payload["passed"]
    assert payload["notes"]


def test_rep_giu_identity(graph_file, tmp_path):
    out = tmp_path / "giu.json"
    assert main(["rep", "--op", "giu", "--in", graph_file, "--out", str(out)]) == 0
    assert _read(out)["data"]["kernel_dimension"] == 0


def test_rep_giu_with_hom_file(graph_file, set_file, tmp_path):
    hom = tmp_path / "hom.json"
    hom.write_text(json.dumps({"kind": "quotient", "vertices": ["u", "v", "w"]}), encoding="utf-8")
    out = tmp_path / "giu.json"
    assert main(["rep", "--op", "giu", "--in", graph_file, "--hom", str(hom), "--out", str(out)]) == 0
    assert _read(out)["data"]["kernel_dimension"] == 16


def test_rep_extend(graph_file, tmp_path):
    out = tmp_path / "extend.json"
    assert main(["rep", "--op", "extend", "--in", graph_file, "--depth", "1", "--out", str(out)]) == 0
    payload = _read(out)
    assert payload["report"]["passed"]
    assert "representation" in payload


def test_rep_corner_needs_depth(graph_file, capsys):
    assert main(["rep", "--op", "corner", "--in", graph_file]) == 2
    assert "--depth" in _error(capsys)["detail"]


def test_suite_fixtures_only(tmp_path):
    out = tmp_path / "suite.json"
    assert main(["suite", "--fixtures-only", "--workers", "1", "--out", str(out)]) == 0
    payload = _read(out)
    assert payload["passed"]
    assert payload["counts"]["instances"] == 5


def test_suite_with_fault(tmp_path):
    out = tmp_path / "suite.json"
    assert main(["suite", "--fixtures-only", "--inject-fault", "saturation", "--workers", "1", "--out", str(out)]) == 1
    assert not _read(out)["passed"]


def test_suite_rejects_bad_options(capsys):
    assert main(["suite", "--max-vertices", "9", "--workers", "1"]) == 2
    assert _error(capsys)["status_code"] == 400
