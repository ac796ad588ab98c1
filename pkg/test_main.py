"""Command-line behaviour and exit codes."""
import json
from pathlib import Path

import pytest

import main as cli
from digraph_core import canonical_form, parse_compact

QUARTIC = str(Path(__file__).parent / "data" / "quartic1d.json")


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_enum_weight_3(capsys):
    code, out, _ = run(capsys, "enum", "--weight", "3")
    assert code == cli.EXIT_OK
    assert len(out.splitlines()) == 15


def test_enum_weight_1(capsys):
    code, out, _ = run(capsys, "enum", "--weight", "1")
    assert code == 0
    assert out.strip() == "1; 0>0*2\tG1:2"


def test_enum_lines_parse_back(capsys):
    _, out, _ = run(capsys, "enum", "--weight", "2")
    for line in out.splitlines():
        compact, key = line.split("\t")
        assert canonical_form(parse_compact(compact)) == key


def test_enum_json(capsys):
    _, out, _ = run(capsys, "enum", "--weight", "2", "--format", "json")
    rows = [json.loads(line) for line in out.splitlines()]
    assert len(rows) == 4
    assert all(not row["pointed"] for row in rows)


def test_enum_weight_0_is_a_usage_error(capsys):
    code, out, err = run(capsys, "enum", "--weight", "0")
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert "weight" in err


def test_z(capsys):
    code, out, _ = run(capsys, "z", "1; 0>0*2")
    assert code == 0
    assert out.strip() == "-1/3"


def test_phi(capsys):
    code, out, _ = run(capsys, "phi", "2; 1>0*2, 0>1*2")
    assert code == 0
    assert out.strip() == "8"


def test_phi_from_a_file(tmp_path, capsys):
    path = tmp_path / "gamma.json"
    path.write_text(json.dumps({"vertices": 1, "pointed": True, "edges": [[0, 0, 3]]}))
    code, out, _ = run(capsys, "phi", str(path))
    assert code == 0
    assert out.strip() == "6"


def test_phi_rejects_unpointed_json(capsys):
    code, _, err = run(capsys, "phi", '{"vertices": 1, "pointed": false, "edges": [[0, 0, 2]]}')
    assert code == cli.EXIT_USAGE
    assert "pointed" in err


def test_z_rejects_pointed_input(capsys):
    code, _, _ = run(capsys, "z", "•1; 0>0*2")
    assert code == cli.EXIT_USAGE


def test_unparseable_graph(capsys):
    code, _, err = run(capsys, "z", "1; 0=>0")
    assert code == cli.EXIT_USAGE
    assert err.startswith("error:")


def test_coeff_json(capsys):
    code, out, _ = run(capsys, "coeff", "--weight", "3", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert len(data["terms"]) == 15
    assert data["terms"][0]["z"] == "-1/162"


def test_coeff_sigma(capsys):
    code, out, _ = run(capsys, "coeff", "--weight", "3", "--sigma")
    assert code == 0
    assert out.splitlines()[0].startswith("c1 = 1/162")
    assert len(out.splitlines()) == 15


def test_coeff_sigma_only_at_weight_3(capsys):
    code, _, _ = run(capsys, "coeff", "--weight", "2", "--sigma")
    assert code == cli.EXIT_USAGE


def test_coeff_latex(capsys):
    code, out, _ = run(capsys, "coeff", "--weight", "1", "--format", "latex")
    assert code == 0
    assert out.strip() == r"-\frac{1}{3} g_{i\bar{i}j\bar{j}}"


def test_unknown_format(capsys):
    code, _, _ = run(capsys, "coeff", "--weight", "1", "--format", "html")
    assert code == cli.EXIT_USAGE


def test_eval_quartic(capsys):
    code, out, _ = run(capsys, "eval", "--graph", "1; 0>0*2", "--potential", QUARTIC)
    assert code == 0
    assert out.strip() == "4"


def test_eval_reports_the_required_order(capsys):
    code, _, err = run(capsys, "eval", "--graph", "1; 0>0*3", "--potential", QUARTIC)
    assert code == cli.EXIT_USAGE
    assert "N >= 6" in err
    assert "--order 6" in err


def test_eval_needs_one_target(capsys):
    code, _, _ = run(capsys, "eval", "--potential", QUARTIC)
    assert code == cli.EXIT_USAGE
    code, _, _ = run(capsys, "eval", "--graph", "1; 0>0*2", "--sigma", "1")
    assert code == cli.EXIT_USAGE


def test_eval_sigma_seeded(capsys):
    first = run(capsys, "eval", "--sigma", "1", "--seed", "3", "--order", "6")
    second = run(capsys, "eval", "--sigma", "1", "--seed", "3", "--order", "6")
    assert first[0] == 0
    assert first == second


def test_eval_invariants_json(capsys):
    code, out, _ = run(capsys, "eval", "--invariants", "--order", "6", "--format", "json")
    assert code == 0
    assert set(json.loads(out)) == {"rho", "ricci_sq", "riemann_sq", "box_rho"}


def test_verify_table1(capsys):
    code, out, _ = run(capsys, "verify", "table1")
    assert code == cli.EXIT_OK
    assert "12/12" in out


def test_verify_appendix(capsys):
    code, out, _ = run(capsys, "verify", "appendix", "--d", "2", "--seeds", "5")
    assert code == 0
    assert out.startswith("appendix: PASS")


def test_verify_failure_exit_code(capsys, monkeypatch):
    from digraph_core import MultiDigraph, PointedGraph
    import oracles

    wrong = ((PointedGraph(MultiDigraph.from_edges(1, [(0, 0, 2)])), 3),)
    monkeypatch.setattr(oracles, "TABLE1", wrong)
    code, out, _ = run(capsys, "verify", "table1", "--format", "json")
    assert code == cli.EXIT_FAILED
    assert json.loads(out)[0]["counterexample"]


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "everything")
    assert code == cli.EXIT_USAGE


def test_cache_roundtrip(tmp_path, capsys):
    path = str(tmp_path / "phi.tsv")
    assert run(capsys, "phi", "2; 1>0*2, 0>1*2", "--cache", path)[0] == 0
    code, out, _ = run(capsys, "cache", "stats", "--cache", path, "--format", "json")
    assert code == 0
    assert json.loads(out)["entries"] > 0
    assert run(capsys, "cache", "clear", "--cache", path)[0] == 0
    assert Path(path).read_text() == ""


def test_cache_needs_a_path(capsys, monkeypatch):
    monkeypatch.setattr(cli, "PHI_CACHE", None)
    code, _, err = run(capsys, "cache", "stats")
    assert code == cli.EXIT_USAGE
    assert "KHEAT_PHI_CACHE" in err


def test_out_file(tmp_path, capsys):
    target = tmp_path / "a1.txt"
    code, out, _ = run(capsys, "z", "1; 0>0*2", "--out", str(target))
    assert code == 0
    assert out == ""
    assert target.read_text() == "-1/3\n"


def test_config_validation():
    with pytest.raises(cli.UsageError):
        cli.Config(order=3).validate()
    with pytest.raises(cli.UsageError):
        cli.Config(d=0).validate()
    assert cli.Config().validate().fmt == "text"


def test_eval_broken_invariant_exit_code(capsys, monkeypatch):
    import curvature_lab

    def not_real(graph, potential):
        raise ArithmeticError("graph value 1 + 1i of a self-reverse graph is not real")

    monkeypatch.setattr(curvature_lab, "evaluate_graph", not_real)
    code, out, err = run(capsys, "eval", "--graph", "1; 0>0*2", "--potential", QUARTIC)
    assert code == cli.EXIT_FAILED
    assert out == ""
    assert "not real" in err


@pytest.mark.parametrize("graph", ["-2;", '{"vertices": -1, "edges": []}'])
def test_negative_vertex_count_is_a_usage_error(capsys, graph):
    code, out, err = run(capsys, "eval", f"--graph={graph}", "--potential", QUARTIC)
    assert code == cli.EXIT_USAGE
    assert out == ""
    assert "vertex count" in err
