import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tubespec.geometry import CuspModel, ManifoldParams, MargulisTube, TorusLattice
from tubespec.numerics import richardson, sl_solve
from tubespec.shooting import shooting_eigs
from tubespec.spectra import (
    TubeMode, check_tube_lambda1, cusp_spectrum, dual_vectors_within, mode_operator, torus_lambda1,
    torus_lambda1_floor, torus_spectrum, tube_lambda1, tube_lambda1_2d, tube_mode_spectrum, tube_modes,
    tube_neumann_spectrum,
)

P = ManifoldParams()

# shooting-oracle values (DOP853 + bracketing), frozen
ORACLE_M0 = {
    2.0: [4.17865873055084, 12.760881360468789, 26.320740949904604, 44.82231339535619],
    5.0: [1.4455104765348272, 2.7586941832478606, 4.900920579102922, 7.848948308628315],
    8.0: [1.1665297129516294, 1.6636541213553866, 2.485687058231085, 3.6267775584304762],
}
ORACLE_M1_R2 = [0.33852839, 7.26016289, 18.38098438, 34.42369162]


def tube_of_radius(R, twist=0.0):
    return MargulisTube(P.a * P.epsilon / math.cosh(R), R, twist)


def test_square_torus_first_level():
    rep = torus_spectrum(TorusLattice.rectangle(2 * math.pi, 2 * math.pi), 10)
    assert rep.values[0] == 0.0
    assert rep.levels()[:3] == [(0.0, 1), (pytest.approx(1.0, abs=1e-12), 4), (pytest.approx(2.0, abs=1e-12), 4)]


def test_rectangular_torus_closed_form():
    a, b = 1.0, 1.7
    vals = torus_spectrum(TorusLattice.rectangle(a, b), 30).values
    ref = sorted(4 * math.pi**2 * ((i / a) ** 2 + (j / b) ** 2) for i in range(-8, 9) for j in range(-8, 9))[:30]
    assert np.allclose(vals, ref, rtol=1e-12)


@given(st.integers(-3, 3), st.floats(0.2, 2.0), st.floats(0.2, 2.0))
def test_torus_spectrum_basis_invariant(shear, a, b):
    lat = TorusLattice(((a, 0.0), (0.3 * a, b)))
    sheared = TorusLattice(((a, 0.0), (0.3 * a + shear * a, b)))
    assert np.allclose(torus_spectrum(lat, 12).values, torus_spectrum(sheared, 12).values, rtol=1e-10)
    assert torus_lambda1(lat) == pytest.approx(torus_spectrum(lat, 2).values[1], rel=1e-12)


def test_dual_vectors_within_radius():
    lat = TorusLattice(((1.0, 0.0), (0.4, 0.9)))
    out = dual_vectors_within(lat, 3.0)
    assert all(np.linalg.norm(xi) <= 3.0 + 1e-12 for _, _, xi in out)
    assert all(np.allclose(lat.dual_vector(i, j), xi) for i, j, xi in out)


def test_torus_floor_applicability():
    thick = torus_lambda1_floor(TorusLattice.rectangle(0.3, 0.3), P)
    assert thick["applicable"] and thick["margin"] > 0
    thin = torus_lambda1_floor(TorusLattice.rectangle(0.05, 3.0), P)
    assert not thin["applicable"] and "margin" not in thin


@pytest.mark.parametrize("R", sorted(ORACLE_M0))
def test_fv_matches_frozen_shooting(R):
    ms = tube_mode_spectrum(tube_of_radius(R), TubeMode(0, 0, 0.0), count=5)
    assert ms.values[0] == 0.0
    assert np.allclose(ms.values[1:], ORACLE_M0[R], atol=1e-6)


def test_fv_matches_frozen_shooting_angular_mode():
    t = tube_of_radius(2.0)
    ms = tube_mode_spectrum(t, TubeMode(1, 0, 0.0), count=4)
    assert np.allclose(ms.values, ORACLE_M1_R2, atol=1e-6)
    assert np.allclose(shooting_eigs(mode_operator(t, TubeMode(1, 0, 0.0)), 4, order=1), ORACLE_M1_R2, atol=1e-7)


@pytest.mark.parametrize("R", [1.5, 2.0])
def test_two_dimensional_oracle_agrees(R):
    t = tube_of_radius(R)
    value, err = tube_lambda1_2d(t)
    ms = tube_mode_spectrum(t, TubeMode(1, 0, 0.0), count=2)
    assert abs(value - ms.values[0]) < 1e-4
    assert err < 1e-2


def test_mode_multiplicity_convention():
    t = MargulisTube.from_core_length(1e-3)
    assert TubeMode(0, 0, 0.0).multiplicity == 1 and TubeMode(1, 0, 0.0).multiplicity == 2
    modes = tube_modes(t, 0.5)
    keys = {(m.m, m.k) for m in modes}
    assert (0, 0) in keys and all((-m, -k) not in keys for m, k in keys if (m, k) != (0, 0))


def test_tube_neumann_spectrum_sorted_and_starts_at_zero():
    rep = tube_neumann_spectrum(MargulisTube.from_core_length(1e-3), 0.05)
    v = rep.values
    assert v[0] == 0.0 and np.all(np.diff(v) >= 0) and not rep.flags
    assert set(rep.to_dict()) >= {"modes", "spectrum"}
    assert v[1] == pytest.approx(tube_lambda1(MargulisTube.from_core_length(1e-3)).value)


def test_tube_lambda1_ratio_reported():
    r = check_tube_lambda1(MargulisTube.from_core_length(1e-3))
    assert r["applicable"] and r["mode"] == [1, 0]
    assert 5 < r["ratio"] < 20


def test_cusp_spectrum_below_floor():
    rep = cusp_spectrum(CuspModel(TorusLattice.rectangle(1.0, 1.3)), 1.0)
    assert rep.values[0] == 0.0 and np.all(rep.values < 1.0)


def test_richardson_reduces_error():
    t = tube_of_radius(5.0)
    op = mode_operator(t, TubeMode(0, 0, 0.0))
    c = sl_solve(op, np.linspace(0, 5, 129), 3).values
    f = sl_solve(op, np.linspace(0, 5, 257), 3).values
    val, _ = richardson(c, f)
    assert abs(val[1] - ORACLE_M0[5.0][0]) < abs(f[1] - ORACLE_M0[5.0][0])
