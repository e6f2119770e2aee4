import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tubespec import extension as ext
from tubespec.geometry import CuspModel, MargulisTube, TorusLattice, tube_volume
from tubespec.spectra import tube_lambda1

TUBE = MargulisTube.from_core_length(1e-3)
TWISTED = MargulisTube.from_core_length(1e-4, twist=1.3, fill=0.6)


def test_hermitian_coefficients_enforced():
    lat = TUBE.boundary_lattice
    with pytest.raises(ValueError):
        ext.BoundaryFunction(lat, {(1, 0): 1.0})
    with pytest.raises(ValueError):
        ext.BoundaryFunction(lat, {(0, 0): 1.0})
    f = ext.BoundaryFunction.from_half(lat, {(1, 0): 0.5j})
    assert ext.BoundaryFunction.from_dict(f.to_dict()).coeffs == f.coeffs


def test_boundary_function_norm_matches_samples():
    f = ext.random_boundary_function(TWISTED.boundary_lattice, 3)
    u, v = np.meshgrid(np.arange(64) / 64, np.arange(64) / 64, indexing="ij")
    sampled = f.torus.area * float((f(u, v) ** 2).mean())
    assert sampled == pytest.approx(f.sq_norm(), rel=1e-12)


@pytest.mark.parametrize("tube", [TUBE, TWISTED], ids=["plain", "twisted"])
@pytest.mark.parametrize("seed", range(6))
def test_extension_items(tube, seed):
    f = ext.random_boundary_function(tube.boundary_lattice, seed)
    plan, rep = ext.extend(tube, f)
    assert rep.mass_bounds_ok
    grid = ext.grid_quadrature(plan)
    assert grid["sq_norm"] == pytest.approx(rep.sq_norm, rel=1e-6)
    if rep.mean_zero:
        assert rep.mean_preserved
        assert abs(grid["integral"]) <= 1e-9 * math.sqrt(rep.sq_norm * tube_volume(tube))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 500), st.integers(0, 500), st.floats(-3, 3), st.floats(-3, 3))
def test_extension_is_linear(s1, s2, alpha, beta):
    lat = TUBE.boundary_lattice
    f, g = ext.random_boundary_function(lat, s1), ext.random_boundary_function(lat, s2)
    h = f.scale(alpha) + g.scale(beta)
    rho = np.linspace(0.0, TUBE.radius, 97)
    pf, pg, ph = (ext.plan_extension(TUBE, x).mode_profiles(rho) for x in (f, g, h))
    for key in set(pf) | set(pg):
        want = alpha * pf.get(key, 0) + beta * pg.get(key, 0)
        assert np.abs(ph.get(key, 0) - want).max() <= 1e-12 * max(1.0, np.abs(want).max())


@pytest.mark.parametrize("seed", [0, 2, 4])
def test_mass_profile_monotone_for_mean_zero(seed):
    f = ext.random_boundary_function(TUBE.boundary_lattice, seed)
    plan = ext.plan_extension(TUBE, f)
    rho = np.linspace(plan.theta + 1, TUBE.radius, 50)
    m = np.array([ext.mass_profile(plan, r) for r in rho])
    assert np.all(np.diff(m) >= 0)


def test_first_eigenfunction_rayleigh_bound():
    lat = TUBE.boundary_lattice
    _, rep = ext.extend(TUBE, ext.first_eigenfunction(lat))
    assert tube_lambda1(TUBE).value <= rep.rayleigh * (1 + 1e-9)


def test_extension_preconditions():
    short = MargulisTube.from_core_length(0.15)
    with pytest.raises(ValueError):
        ext.plan_extension(short, ext.BoundaryFunction.zero(short.boundary_lattice))
    with pytest.raises(ValueError):
        ext.plan_extension(TUBE, ext.BoundaryFunction.zero(TWISTED.boundary_lattice))


def test_core_inequality_suite():
    spaces = [TUBE, CuspModel(TorusLattice.rectangle(1.0, 1.3))]
    results = [ext.core_inequality_check(sp, ext.random_separable(sp, s)) for sp in spaces for s in range(20)]
    applicable = [r for r in results if r["hypothesis_ok"]]
    assert len(applicable) >= 0.8 * len(results)
    assert all(r["margin"] >= -1e-8 for r in applicable)
    assert all(r["verdict"] == ext.INAPPLICABLE for r in results if not r["hypothesis_ok"])


def test_shell_suite():
    results = []
    for s in range(30):
        sh = ext.random_shell(s)
        results.append(ext.shell_rayleigh_check(sh, ext.random_shell_profile(sh, s)))
    assert sum(r["hypothesis_ok"] for r in results) >= 24
    assert all(r["verdict"] != ext.FAIL for r in results)


def test_slice_renormalization():
    for s in range(20):
        r = ext.slice_renormalize(ext.random_collar(s))
        assert r["verdict"] == ext.PASS and r["normal_u"] <= r["normal_f"] + r["tolerance"]


def test_product_collar_is_equality_case():
    beta = lambda r: 1.0 + 0.5 * np.sin(r)
    c = ext.collar_of_product(beta, np.array([1.0, 0.4]), 0.8)
    r = ext.slice_renormalize(c)
    assert abs(r["margin"]) <= 1e-8 * max(1.0, r["normal_f"])
