import json

import pytest

from tubespec import cli


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return p


SMALL = {"schema_version": 1, "seed": 5, "scenarios": [
    {"id": "b-torus", "kind": "torus", "params": {"basis": [[0.3, 0.0], [0.1, 0.35]]}},
    {"id": "a-graph", "kind": "graph", "params": {"edges": [[0, 1], [1, 2], [2, 0], [2, 3]]}},
    {"id": "c-thin", "kind": "torus", "params": {"basis": [[0.05, 0.0], [0.0, 3.0]]}},
    {"id": "d-jacobi", "kind": "jacobi", "params": {"profiles": 3, "b": 2.0}},
    {"id": "e-shell", "kind": "extend", "params": {"suite": "shell", "cases": 5}},
]}


def test_empty_scenarios_exit_zero(tmp_path):
    cfg = write(tmp_path, "c.json", {"scenarios": []})
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["scenarios"] == [] and rep["schema_version"] == cli.SCHEMA_VERSION


def test_malformed_json_exit_two(tmp_path, capsys):
    cfg = write(tmp_path, "c.json", '{"scenarios": [\n  {"id": 1,,}\n]}')
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "c.json:2:" in capsys.readouterr().err


@pytest.mark.parametrize("scenario, where", [
    ({"id": "x", "kind": "nope"}, "scenarios[0].kind"),
    ({"kind": "torus"}, "scenarios[0].id"),
    ({"id": "x", "kind": "torus", "params": {}}, "scenarios[0].params"),
    ({"id": "x", "kind": "tube-spectrum", "params": {"tube": {"core_length": 0.5}}}, "scenarios[0].params"),
])
def test_config_errors_name_location(tmp_path, capsys, scenario, where):
    cfg = write(tmp_path, "c.json", {"scenarios": [scenario]})
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert where in capsys.readouterr().err


def test_duplicate_ids_rejected(tmp_path):
    s = {"id": "x", "kind": "torus", "params": {"basis": [[1, 0], [0, 1]]}}
    cfg = write(tmp_path, "c.json", {"scenarios": [s, s]})
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_missing_config_file(tmp_path):
    assert cli.main(["run", "--config", str(tmp_path / "none.json"), "--out", str(tmp_path / "o")]) == 2


def test_run_is_byte_identical_and_order_independent(tmp_path):
    cfg = write(tmp_path, "c.json", SMALL)
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o1")]) == 0
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o2"), "--jobs", "2"]) == 0
    files = sorted(p.name for p in (tmp_path / "o1").iterdir())
    assert "timing.json" in files
    for name in files:
        if name != "timing.json":
            assert (tmp_path / "o1" / name).read_bytes() == (tmp_path / "o2" / name).read_bytes(), name
    rep = json.loads((tmp_path / "o1" / "report.json").read_text())
    assert [s["id"] for s in rep["scenarios"]] == sorted(s["id"] for s in SMALL["scenarios"])
    assert all(s["seed"] == 5 for s in rep["scenarios"])
    thin = next(s for s in rep["scenarios"] if s["id"] == "c-thin")
    assert thin["verdicts"] == {"pass": 0, "fail": 0, "inapplicable": 1} and thin["status"] == "pass"


def test_seed_override_recorded(tmp_path):
    cfg = write(tmp_path, "c.json", SMALL)
    cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "11"])
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["seed"] == 11


def test_numerical_failure_exit_one(tmp_path, capsys):
    # a torus floor constant far above the true lambda_1 * area^2
    bad = {"scenarios": [{"id": "too-high", "kind": "torus",
                          "params": {"basis": [[0.3, 0.0], [0.0, 0.3]], "manifold": {"constants": {"c2": 1e6}}}}]}
    cfg = write(tmp_path, "c.json", bad)
    assert cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 1
    assert "too-high" in capsys.readouterr().err


def test_csv_tables_use_lf(tmp_path):
    cfg = write(tmp_path, "c.json", SMALL)
    cli.main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")])
    text = (tmp_path / "o" / "e-shell.margins.csv").read_bytes()
    assert b"\r" not in text and text.startswith(b"case_id,hypothesis_ok,margin,tolerance\n")


def test_tube_spectrum_command(tmp_path):
    cfg = write(tmp_path, "t.json", {"tube": {"core_length": 1e-3}, "lambda_max": 0.05})
    out = tmp_path / "r.json"
    assert cli.main(["tube-spectrum", "--config", str(cfg), "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert {"schema_version", "params", "modes", "spectrum"} <= set(rep)
    first = rep["spectrum"][0]
    assert set(first) == {"lambda", "m", "k", "mult", "err"} and first["lambda"] == 0.0
    assert all({"m", "k", "omega", "eigs"} <= set(m) for m in rep["modes"])


def test_extend_command(tmp_path, capsys):
    cfg = write(tmp_path, "e.json", {"tube": {"core_length": 1e-3}, "cases": 4})
    assert cli.main(["extend", "--config", str(cfg)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "case_id,hypothesis_ok,margin,tolerance" and len(lines) == 5


def test_graph_command(tmp_path, capsys):
    edges = write(tmp_path, "k4.txt", "0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n")
    assert cli.main(["graph", "--edges", str(edges), "--check", "all"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["vertex_variant_fails"] and rep["ok"]
    bad = write(tmp_path, "bad.txt", "0 1\nx y\n")
    assert cli.main(["graph", "--edges", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_bundled_config_lists_all_criteria():
    cfg = cli.default_config()
    parsed = cli.parse_config(cfg)
    crit = sorted(c for s in parsed["scenarios"] for c in s["params"]["criteria"])
    assert crit == list(range(1, 11))
