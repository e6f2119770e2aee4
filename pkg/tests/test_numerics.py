import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tubespec.numerics import (
    DIRICHLET, NEUMANN, EigenSolverError, GridSpec, RadialOperator, SymTridiag, gauss_legendre, ode_rk4,
    richardson, sl_solve, symmetric_eigs, tridiag_eigs,
)
from tubespec.shooting import shooting_eigs

# positive roots of tan x = x (Neumann modes of the unit ball, radial sector)
BALL_ROOTS = [4.493409457909064, 7.725251836937707, 10.904121659428899]


def _extrapolated(op, n, k):
    edges = np.linspace(op.a, op.b, n + 1)
    return richardson(sl_solve(op, edges, k).values, sl_solve(op, np.linspace(op.a, op.b, 2 * n + 1), k).values)


def test_neumann_interval_matches_cosine_modes():
    op = RadialOperator(lambda x: np.ones_like(x), 0.0, math.pi)
    vals, err = _extrapolated(op, 256, 5)
    assert np.allclose(vals, np.arange(5) ** 2, atol=1e-7)
    assert err.max() < 1e-3


def test_dirichlet_interval_matches_sine_modes():
    op = RadialOperator(lambda x: np.ones_like(x), 0.0, 2.0, left=DIRICHLET, right=DIRICHLET)
    vals, _ = _extrapolated(op, 256, 4)
    assert np.allclose(vals, (np.arange(1, 5) * math.pi / 2) ** 2, rtol=1e-7)


def test_ball_radial_sector_singular_endpoint():
    op = RadialOperator(lambda x: x**2, 0.0, 1.0)
    vals, _ = _extrapolated(op, 512, 4)
    assert vals[0] == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(vals[1:], np.square(BALL_ROOTS), rtol=1e-6)


def test_shooting_oracle_on_the_ball():
    op = RadialOperator(lambda x: x**2, 0.0, 1.0)
    assert np.allclose(shooting_eigs(op, 4)[1:], np.square(BALL_ROOTS), rtol=1e-8)


def test_tiny_eigenvalues_keep_relative_accuracy():
    # potential eps: spectrum shifted by eps, lowest value must not be swamped by roundoff
    eps = 1e-9
    op = RadialOperator(lambda x: np.ones_like(x), 0.0, 1.0, potential=lambda x: np.full_like(x, eps))
    sol = sl_solve(op, np.linspace(0, 1, 513), 2)
    assert sol.values[0] == pytest.approx(eps, rel=1e-6)


def test_eigenvectors_are_mass_orthonormal():
    op = RadialOperator(lambda x: 1 + x, 0.0, 3.0)
    sol = sl_solve(op, np.linspace(0, 3, 201), 5)
    gram = sol.vectors.T @ (sol.system.mass[:, None] * sol.vectors)
    assert np.allclose(gram, np.eye(5), atol=1e-10)


def test_richardson_second_order():
    h = np.array([0.1])
    val, err = richardson(1 + 3 * h**2, 1 + 3 * (h / 2) ** 2)
    assert val[0] == pytest.approx(1.0, abs=1e-15)
    assert err[0] == pytest.approx(3 * (h[0] ** 2 - (h[0] / 2) ** 2) / 3)


@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10_000))
def test_ql_matches_lapack(n, seed):
    rng = np.random.default_rng(seed)
    t = SymTridiag(rng.normal(size=n), rng.normal(size=n - 1))
    ref = np.linalg.eigvalsh(t.to_dense())
    assert np.allclose(tridiag_eigs(t), ref, atol=1e-10 * max(1.0, t.norm()))
    assert np.abs(ref).max() <= t.norm() + 1e-12


@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=10_000))
def test_symmetric_eigs_residual(n, seed):
    a = np.random.default_rng(seed).normal(size=(n, n))
    a = a + a.T
    w, v = symmetric_eigs(a)
    assert np.all(np.diff(w) >= 0)
    assert np.allclose(a @ v, v * w, atol=1e-9 * max(1.0, np.abs(a).max()))


def test_symmetric_eigs_rejects_asymmetric():
    with pytest.raises(ValueError):
        symmetric_eigs(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_symtridiag_shape_checked():
    with pytest.raises(ValueError):
        SymTridiag(np.ones(3), np.ones(3))
    with pytest.raises(ValueError):
        SymTridiag(np.array([1.0, np.nan]), np.ones(1))


def test_grid_and_operator_validation():
    with pytest.raises(ValueError):
        GridSpec(1.0, 0.0)
    with pytest.raises(ValueError):
        RadialOperator(lambda x: x, 0.0, 1.0, left="robin")
    g = GridSpec(0.0, 1.0, 16)
    assert g.refined().count == 32 and g.h == pytest.approx(1 / 16)


@given(st.integers(min_value=0, max_value=31), st.floats(-3, 3), st.floats(0.1, 4))
def test_gauss_legendre_exact_on_polynomials(deg, a, width):
    b = a + width
    x, w = gauss_legendre(a, b, 16, breaks=[a + width / 3])
    exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
    assert float(w @ x**deg) == pytest.approx(exact, rel=1e-11, abs=1e-11)


def test_rk4_fourth_order_on_exponential():
    errs = []
    for steps in (32, 64):
        _, y = ode_rk4(lambda t, y: y, [1.0], (0.0, 1.0), steps)
        errs.append(abs(y[-1, 0] - math.e))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.05)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_rk4_blow_up_reported():
    from tubespec.numerics import BlowUpError

    with pytest.raises(BlowUpError):
        ode_rk4(lambda t, y: y**2, [1.0], (0.0, 2.0), 64)


def test_neumann_dirichlet_constants():
    assert {NEUMANN, DIRICHLET} == {"neumann", "dirichlet"}
    assert issubclass(EigenSolverError, RuntimeError)
