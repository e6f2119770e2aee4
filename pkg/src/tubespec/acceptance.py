"""The acceptance suite: one function per criterion, each returning a JSON-ready verdict."""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from . import extension as ext
from . import graphspec as gs
from .fitting import fit_constant
from .geometry import CuspModel, ManifoldParams, MargulisTube, TorusLattice, tube_volume
from .jacobi import CurvatureProfile, hyperbolic_jacobian, integrate_riccati_many, logderiv_compare, volume_growth_margin
from .model1d import LOWER_BOUND_THRESHOLD, assemble, strip_mass_check, radial_spectrum, standard_family, verify_lower_bound, verify_upper_bound
from .numerics import richardson, sl_solve
from .shooting import shooting_eigs
from .spectra import TubeMode, check_tube_lambda1, mode_operator, torus_lambda1_floor, torus_spectrum

STABILITY_LIMIT = 10.0


def _result(cid: int, title: str, passed: bool, **details) -> dict[str, Any]:
    return {"id": cid, "title": title, "passed": bool(passed), "details": details}


def criterion_1(seed: int = 0) -> dict[str, Any]:
    atlas = gs.atlas_graphs(2, 6)
    rand = [gs.random_connected_graph(seed + i, 12) for i in range(500)]
    reports = gs.iter_checks(atlas + rand)
    witness = gs.k4_witness()
    worst_sum = max(r["sum_identity_error"] for r in reports)
    min_top = min(r["top_eigenvalue"] for r in reports)
    min_margin = min(r["margin_volume"] for r in reports)
    passed = all(r["ok"] for r in reports) and witness["vertex_variant_fails"]
    return _result(1, "graph identities and Cheeger inequality", passed,
                   atlas_graphs=len(atlas), atlas_on_six=sum(g.n == 6 for g in atlas), random_graphs=len(rand),
                   max_sum_identity_error=worst_sum, min_top_eigenvalue=min_top,
                   min_volume_cheeger_margin=min_margin,
                   vertex_variant_failures=sum(r["vertex_variant_fails"] for r in reports),
                   k4_witness=witness)


def criterion_2(seed: int = 0) -> dict[str, Any]:
    rep = torus_spectrum(TorusLattice.rectangle(2 * math.pi, 2 * math.pi), 6)
    v = rep.values
    mult = int(np.sum(np.abs(v[1:] - 1.0) <= 1e-12))
    passed = v[0] == 0.0 and mult == 4 and v[5] > 1.0 + 1e-12
    return _result(2, "square torus lambda_1 = 1 with multiplicity 4", passed,
                   lambda1=float(v[1]), multiplicity=mult, next_level=float(v[5]),
                   max_error=float(np.abs(v[1:5] - 1.0).max()))


def criterion_3(seed: int = 0) -> dict[str, Any]:
    closed = {}
    for n in (3, 4):
        tr = integrate_riccati_many([CurvatureProfile.constant(n, -1.0)], T=5.0)[0]
        err = np.abs(tr.j - hyperbolic_jacobian(n, tr.t))
        closed[str(n)] = {"max_abs_error": float(err.max()),
                          "max_rel_error": float((err / hyperbolic_jacobian(n, tr.t)).max()),
                          "residual": tr.residual}
    rng = np.random.default_rng(seed)
    bs = rng.uniform(1.0, 3.0, size=100)
    dims = np.where(np.arange(100) % 2 == 0, 3, 4)
    traces = []
    for n in (3, 4):
        idx = np.flatnonzero(dims == n)
        profs = [CurvatureProfile.random(n, float(bs[i]), seed + int(i)) for i in idx]
        traces += integrate_riccati_many(profs, T=5.0)
    growth = [volume_growth_margin(t) for t in traces]
    logd = [logderiv_compare(t) for t in traces]
    resid = max(t.residual for t in traces)
    passed = (all(c["max_abs_error"] <= 1e-6 for c in closed.values()) and min(growth) >= -1e-8
              and min(logd) >= -1e-8 and resid <= 1e-6)
    return _result(3, "Jacobi comparison and volume growth", passed, closed_form=closed, profiles=len(traces),
                   min_growth_margin=min(growth), min_logderiv_margin=min(logd), max_residual=resid)


def criterion_4(seed: int = 0) -> dict[str, Any]:
    rows = {}
    for R in (2.0, 5.0, 8.0):
        p = ManifoldParams()
        op = mode_operator(MargulisTube(p.a * p.epsilon / math.cosh(R), R), TubeMode(0, 0, 0.0))
        coarse = sl_solve(op, np.linspace(0.0, R, 1025), 6).values
        fine = sl_solve(op, np.linspace(0.0, R, 2049), 6).values
        fv, err = richardson(coarse, fine)
        shot = shooting_eigs(op, 6)
        rows[f"{R:g}"] = {"fv": fv[1:].tolist(), "shooting": shot[1:].tolist(),
                          "max_diff": float(np.abs(fv[1:] - shot[1:]).max()), "richardson_err": float(err[1:].max())}
    passed = all(r["max_diff"] <= 1e-6 for r in rows.values())
    return _result(4, "finite volume vs shooting oracle", passed, radii=rows)


def extension_tubes() -> list[MargulisTube]:
    tubes = [MargulisTube.from_core_length(ell) for ell in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)]
    tubes += [MargulisTube.from_core_length(ell, twist=1.3, fill=0.6) for ell in (1e-3, 1e-4, 1e-5, 1e-6)]
    tubes.append(MargulisTube.from_core_length(1e-2, twist=2.0))
    return tubes


def criterion_5(seed: int = 0) -> dict[str, Any]:
    mass_bounds_ok = mean_preserved = quad = True
    worst_quad = worst_int = 0.0
    ratios = []
    pairs, groups = [], []
    mean_zero = 0
    for ti, t in enumerate(extension_tubes()):
        for s in range(50):
            f = ext.random_boundary_function(t.boundary_lattice, seed + s)
            plan, rep = ext.extend(t, f)
            grid = ext.grid_quadrature(plan)
            mass_bounds_ok &= rep.mass_bounds_ok
            rel = abs(grid["sq_norm"] - rep.sq_norm) / rep.sq_norm
            worst_quad = max(worst_quad, rel)
            quad &= rel <= 1e-6
            ratios.append(rep.sq_norm / rep.boundary_sq_norm)
            if rep.mean_zero:
                mean_zero += 1
                scale = math.sqrt(rep.sq_norm * tube_volume(t))
                dev = max(abs(rep.integral), abs(grid["integral"])) / scale
                worst_int = max(worst_int, dev)
                mean_preserved &= dev <= 1e-9
            if rep.q2_statistic is not None:
                pairs.append((rep.rayleigh, rep.rayleigh_boundary * rep.log_volume))
                groups.append((ti, s))
    fit = fit_constant(pairs, groups)
    passed = mass_bounds_ok and mean_preserved and quad and fit["stability"] < STABILITY_LIMIT
    return _result(5, "extension operator into tubes", passed, tubes=len(extension_tubes()), cases=len(ratios),
                   mass_bounds_ok=mass_bounds_ok, mass_ratio_range=[min(ratios), max(ratios)], max_quadrature_rel_diff=worst_quad,
                   mean_preserved=mean_preserved, mean_zero_cases=mean_zero, max_mean_deviation=worst_int,
                   q2=fit["constant"], q2_stability=fit["stability"])


def criterion_6(seed: int = 0) -> dict[str, Any]:
    rows = []
    for ell in (1e-2, 1e-3, 1e-4, 1e-5):
        r = check_tube_lambda1(MargulisTube.from_core_length(ell))
        rows.append(r)
    applicable = all(r["applicable"] for r in rows)
    fit = fit_constant([(r["ratio"], 1.0) for r in rows]) if applicable else {"constant": math.nan,
                                                                             "stability": math.inf}
    passed = applicable and fit["stability"] < STABILITY_LIMIT
    return _result(6, "tube lambda_1 against log vol / vol(boundary)^2", passed,
                   family=[{"core_length": r["core_length"], "ratio": r.get("ratio"), "lambda1": r.get("lambda1"),
                            "mode": r.get("mode")} for r in rows],
                   q3=fit["constant"], q3_stability=fit["stability"])


def _suite_summary(results: list[dict[str, Any]], upper: bool = False) -> dict[str, Any]:
    app = [r for r in results if r.get("hypothesis_ok", True)]
    margins = [r["margin"] for r in app]
    return {"cases": len(results), "applicable": len(app), "applicable_fraction": len(app) / len(results),
            ("max_margin" if upper else "min_margin"): (max(margins) if upper else min(margins)) if margins else None,
            "failures": sum(r["verdict"] == ext.FAIL for r in results)}


def criterion_7(seed: int = 0) -> dict[str, Any]:
    spaces: list[Any] = [MargulisTube.from_core_length(ell) for ell in (1e-2, 1e-3, 1e-4)]
    spaces += [CuspModel(TorusLattice.rectangle(1.0, 1.3)), CuspModel(TorusLattice(((0.8, 0.0), (0.3, 1.1))), 7.0)]
    l22 = [ext.core_inequality_check(spaces[i % len(spaces)], ext.random_separable(spaces[i % len(spaces)], seed + i))
           for i in range(100)]
    shells = []
    for i in range(100):
        sh = ext.random_shell(seed + i)
        shells.append(ext.shell_rayleigh_check(sh, ext.random_shell_profile(sh, seed + i)))
    collars = [ext.slice_renormalize(ext.random_collar(seed + i)) for i in range(100)]
    s22, ssh, sw = _suite_summary(l22), _suite_summary(shells), _suite_summary(collars, upper=True)
    passed = (s22["failures"] == 0 and ssh["failures"] == 0 and sw["failures"] == 0
              and min(s22["applicable_fraction"], ssh["applicable_fraction"], sw["applicable_fraction"]) >= 0.8)
    return _result(7, "tube, shell and slice-renormalization inequalities", passed,
                   core_inequality=s22, shell=ssh, renormalization=sw)


def _family(seed: int = 0):
    models = [assemble(c["segments"]) for c in standard_family()]
    pairs = [radial_spectrum(m, 9) for m in models]
    return models, pairs


def criterion_8(seed: int = 0, family=None) -> dict[str, Any]:
    models, pairs = family or _family(seed)
    rows, worst_err, bad = [], 0.0, []
    for i, (m, p) in enumerate(zip(models, pairs)):
        for r in verify_lower_bound(m, 8, p):
            rows.append(r)
            if r["k"] > 0:
                worst_err = max(worst_err, p.full_err[r["k"]] / p.full[r["k"]], p.thick_err[r["k"]] / p.thick[r["k"]])
            if not r["ok"]:
                bad.append([i, r["k"]])
    nonzero = [r["margin"] for r in rows if r["k"] > 0]
    passed = not bad and worst_err < 1e-4
    return _result(8, "eigenvalue lower bound from the thick part (radial sector)", passed, configs=len(models),
                   rows=len(rows), min_margin_k_ge_1=min(nonzero) if nonzero else None,
                   max_relative_error_bar=worst_err, violations=bad, threshold=LOWER_BOUND_THRESHOLD)


def criterion_9(seed: int = 0, family=None) -> dict[str, Any]:
    models, pairs = family or _family(seed)
    res = verify_upper_bound(models, 8, pairs)
    ratios = [r["ratio"] for r in res["rows"]]
    passed = res["ok"] and res["stability"] < STABILITY_LIMIT and len(ratios) > 0
    return _result(9, "eigenvalue upper bound by the thick part (radial sector)", passed, configs=len(models),
                   admissible=len(ratios), max_ratio=max(ratios) if ratios else None, q4=res["q4"],
                   q4_stability=res["stability"])


def criterion_10(seed: int = 0, family=None) -> dict[str, Any]:
    models, _ = family or _family(seed)
    rows = []
    for i, m in enumerate(models):
        if m.collar_width < 96:
            continue
        for r in strip_mass_check(m):
            rows.append({"config": i, **r})
    margins = [r["margin"] for r in rows]
    passed = len(rows) > 0 and all(r["ok"] for r in rows)
    return _result(10, "boundary strip mass of low thick-part eigenfunctions", passed, functions=len(rows),
                   min_margin=min(margins) if margins else None)


def torus_floor_fit(seed: int = 0, count: int = 40) -> dict[str, Any]:
    """Fitted ``c2`` over random thick tori with shortest vector in ``[2 eps, 4 eps]``."""
    params = ManifoldParams()
    rng = np.random.default_rng(seed)
    stats = []
    for _ in range(count):
        s = rng.uniform(2 * params.epsilon, 4 * params.epsilon)
        x = rng.uniform(-s / 2, s / 2)
        y = math.sqrt(max(rng.uniform(s, 4 * params.epsilon) ** 2 - x * x, s * s - x * x))
        r = torus_lambda1_floor(TorusLattice(((s, 0.0), (x, y))), params)
        if r["applicable"]:
            stats.append(r["statistic"])
    return {"c2": min(stats), "stability": max(stats) / min(stats), "tori": len(stats)}


CRITERIA: dict[int, Callable[..., dict[str, Any]]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}


def run_all(seed: int = 0, which: list[int] | None = None) -> dict[str, Any]:
    which = sorted(which or CRITERIA)
    family = _family(seed) if any(c in which for c in (8, 9, 10)) else None
    results = []
    for cid in which:
        fn = CRITERIA[cid]
        results.append(fn(seed, family) if cid in (8, 9, 10) else fn(seed))
    fitted = {}
    for r in results:
        d = r["details"]
        for key in ("q2", "q3", "q4"):
            if key in d:
                fitted[key] = {"value": d[key], "stability": d[f"{key}_stability"]}
    floor = torus_floor_fit(seed)
    fitted["c2"] = {"value": floor["c2"], "stability": floor["stability"]}
    return {"criteria": results, "fitted": fitted, "passed": all(r["passed"] for r in results)}


def summary_line(r: dict[str, Any]) -> str:
    return f"criterion {r['id']:>2}: {'PASS' if r['passed'] else 'FAIL'}  {r['title']}"
