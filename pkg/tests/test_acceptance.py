"""Acceptance criteria 1-11, run through the bundled ``verify-all`` config.

Each test records one PASS/FAIL line; the lines are printed in the terminal
summary.
"""

import json

import pytest

from tubespec import acceptance, cli

TITLES = {
    1: "graph spectra, degree-volume Cheeger inequality, K4 witness",
    2: "square 2*pi torus: lambda_1 = 1 (multiplicity 4) to 1e-12",
    3: "Jacobi closed form to 1e-6; 100 profiles with b <= 3 keep both comparisons",
    4: "finite volume vs shooting oracle, R in {2, 5, 8}, first five eigenvalues to 1e-6",
    5: "extension mass bounds and mean preservation exact; q2 fitted with stability < 10",
    6: "tube family lambda_1 ratio: q3 fitted with stability < 10",
    7: "core, shell and slice-renormalization suites: no failures, >= 80% applicable",
    8: "lower eigenvalue bound from the thick part on 20 glued models",
    9: "upper eigenvalue bound by the thick part: q4 stability < 10",
    10: "boundary strip mass of low thick-part eigenfunctions",
    11: "byte-identical reports for repeated runs",
}


@pytest.fixture(scope="module")
def runs():
    parsed = cli.parse_config(cli.default_config())
    out = []
    for _ in range(2):
        report, tables, _ = cli.run_scenarios(parsed)
        out.append((cli.dumps(report), tables, report))
    return out


def _criterion(runs, cid):
    report = runs[0][2]
    for s in report["scenarios"]:
        for r in s["result"]["criteria"]:
            if r["id"] == cid:
                return r
    raise AssertionError(f"criterion {cid} missing from report")


def _log(log, cid, ok, note=""):
    log.append(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {TITLES[cid]}" + (f"  [{note}]" if note else ""))


def test_criterion_1(runs, acceptance_log):
    r = _criterion(runs, 1)
    d = r["details"]
    ok = (r["passed"] and d["atlas_on_six"] == 112 and d["random_graphs"] == 500
          and d["max_sum_identity_error"] <= 1e-8 and d["min_top_eigenvalue"] >= 1 - 1e-9
          and d["min_volume_cheeger_margin"] >= 0 and d["k4_witness"]["vertex_variant_fails"])
    _log(acceptance_log, 1, ok, f"min margin {d['min_volume_cheeger_margin']:.3g}")
    assert ok


def test_criterion_2(runs, acceptance_log):
    d = _criterion(runs, 2)["details"]
    ok = d["multiplicity"] == 4 and d["max_error"] <= 1e-12
    _log(acceptance_log, 2, ok, f"max error {d['max_error']:.1e}")
    assert ok


def test_criterion_3(runs, acceptance_log):
    r = _criterion(runs, 3)
    d = r["details"]
    ok = (r["passed"] and d["profiles"] == 100 and all(c["max_abs_error"] <= 1e-6 for c in d["closed_form"].values())
          and d["min_growth_margin"] >= -1e-8 and d["min_logderiv_margin"] >= -1e-8)
    _log(acceptance_log, 3, ok, f"growth {d['min_growth_margin']:.2e}, logderiv {d['min_logderiv_margin']:.2e}")
    assert ok


def test_criterion_4(runs, acceptance_log):
    d = _criterion(runs, 4)["details"]["radii"]
    worst = max(v["max_diff"] for v in d.values())
    ok = set(d) == {"2", "5", "8"} and all(len(v["fv"]) == 5 for v in d.values()) and worst <= 1e-6
    _log(acceptance_log, 4, ok, f"max diff {worst:.1e}")
    assert ok


def test_criterion_5(runs, acceptance_log):
    r = _criterion(runs, 5)
    d = r["details"]
    ok = (r["passed"] and d["mass_bounds_ok"] and d["mean_preserved"] and d["max_quadrature_rel_diff"] <= 1e-6
          and d["q2_stability"] < acceptance.STABILITY_LIMIT)
    _log(acceptance_log, 5, ok, f"q2 = {d['q2']:.3g}, stability {d['q2_stability']:.3g}")
    assert ok


def test_criterion_6(runs, acceptance_log):
    d = _criterion(runs, 6)["details"]
    ok = d["q3_stability"] < acceptance.STABILITY_LIMIT
    _log(acceptance_log, 6, ok, f"q3 = {d['q3']:.3g}, stability {d['q3_stability']:.3g}")
    assert ok


def test_criterion_7(runs, acceptance_log):
    d = _criterion(runs, 7)["details"]
    suites = [d["core_inequality"], d["shell"], d["renormalization"]]
    ok = all(s["failures"] == 0 and s["applicable_fraction"] >= 0.8 for s in suites)
    _log(acceptance_log, 7, ok, ", ".join(f"{s['applicable']}/{s['cases']}" for s in suites))
    assert ok


def test_criterion_8(runs, acceptance_log):
    r = _criterion(runs, 8)
    d = r["details"]
    ok = r["passed"] and d["configs"] == 20 and not d["violations"] and d["max_relative_error_bar"] < 1e-4
    _log(acceptance_log, 8, ok, f"min margin {d['min_margin_k_ge_1']:.2e}")
    assert ok


def test_criterion_9(runs, acceptance_log):
    r = _criterion(runs, 9)
    d = r["details"]
    ok = r["passed"] and d["q4_stability"] < acceptance.STABILITY_LIMIT
    _log(acceptance_log, 9, ok, f"q4 = {d['q4']:.3g}, max ratio {d['max_ratio']:.4f}")
    assert ok


def test_criterion_10(runs, acceptance_log):
    r = _criterion(runs, 10)
    d = r["details"]
    ok = r["passed"] and d["functions"] > 0 and d["min_margin"] >= -1e-8
    _log(acceptance_log, 10, ok, f"min margin {d['min_margin']:.3g} over {d['functions']}")
    assert ok


def test_criterion_11(runs, acceptance_log):
    (a, ta, _), (b, tb, _) = runs
    ok = a == b and ta == tb
    _log(acceptance_log, 11, ok)
    assert ok


def test_report_is_clean_json(runs):
    rep = json.loads(runs[0][0])
    assert rep["schema_version"] == 1 and rep["failed"] == []
    assert {"q2", "q3", "q4", "c2"} <= set(rep["scenarios"][0]["fitted"]) | {
        k for s in rep["scenarios"] for k in s["fitted"]}
