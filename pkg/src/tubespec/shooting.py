"""Shooting-method eigenvalues for weighted Sturm-Liouville problems.

This is deliberately independent of the finite-volume path in
:mod:`tubespec.numerics`: it integrates the first-order system
``u' = p/w, p' = (V - lam) w u`` with an adaptive high-order integrator and
locates the zeros of the right-endpoint residual in ``lam``.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .numerics import DIRICHLET, NEUMANN, RadialOperator

_START = 1e-5


def _shoot(op: RadialOperator, lam: float, rtol: float = 1e-12, order: int = 0):
    a, b = op.a, op.b
    w_a = float(op.weight(np.array([a]))[0])
    if w_a == 0.0:
        # regular solution at a singular endpoint w(x) ~ w1 (x - a): u ~ (x - a)^order
        x0 = a + _START
        w0 = float(op.weight(np.array([x0]))[0])
        if order == 0:
            v0 = float(op.V(np.array([x0]))[0])
            u0 = 1.0 - 0.25 * (lam - v0) * _START**2
            p0 = -0.5 * (lam - v0) * _START * w0
        else:
            u0 = _START**order
            p0 = w0 * order * _START ** (order - 1)
    else:
        x0 = a
        u0, p0 = (1.0, 0.0) if op.left == NEUMANN else (0.0, w_a)

    def rhs(x, y):
        xx = np.array([x])
        w = float(op.weight(xx)[0])
        v = float(op.V(xx)[0])
        return [y[1] / w, (v - lam) * w * y[0]]

    sol = solve_ivp(rhs, (x0, b), [u0, p0], method="DOP853", rtol=rtol, atol=1e-14, dense_output=True)
    if not sol.success:  # pragma: no cover
        raise RuntimeError(sol.message)
    return sol


def _residual(op: RadialOperator, lam: float, order: int = 0) -> float:
    y = _shoot(op, lam, order=order).y[:, -1]
    if op.right == NEUMANN:
        # scale-free: p/(w |u|+|p|) keeps the bracket search well conditioned
        return float(y[1] / (abs(y[0]) * float(op.weight(np.array([op.b]))[0]) + abs(y[1]) + 1e-300))
    return float(y[0] / (abs(y[0]) + abs(y[1]) + 1e-300))


def _zero_count(op: RadialOperator, lam: float, order: int = 0) -> int:
    sol = _shoot(op, lam, order=order)
    x = np.linspace(sol.t[0], op.b, 4001)
    u = sol.sol(x)[0]
    if op.right == DIRICHLET:
        u = u[:-1]
    s = np.sign(u[np.abs(u) > 1e-10 * np.abs(u).max()])
    return int(np.count_nonzero(s[1:] != s[:-1]))


def shooting_eigs(op: RadialOperator, k: int, lam_max: float = 1e4, rel_step: float = 0.15,
                  order: int = 0) -> np.ndarray:
    """The lowest ``k`` eigenvalues of ``op``.

    The scan step follows the asymptotic eigenvalue spacing
    ``2 pi sqrt(lam) / (b - a)`` so no two eigenvalues share a step. For pure
    Neumann problems (no potential) the zero eigenvalue of the constant
    function is included exactly. The j-th returned eigenfunction is checked
    to have exactly j interior zeros. ``order`` selects the regular solution
    ``u ~ (x - a)^order`` at a singular left endpoint (``w(a) = 0``).
    """
    found: list[float] = []
    length = op.b - op.a
    if op.potential is None and op.left == NEUMANN and op.right == NEUMANN:
        found.append(0.0)
        lam = 1e-9
    else:
        v = op.V(np.linspace(op.a + 1e-3 * length, op.b, 400))
        lam = min(0.0, float(v.min())) - 1.0
    res = lambda x: _residual(op, x, order)  # noqa: E731
    prev_l, prev_r = lam, res(lam)
    while len(found) < k and lam < lam_max:
        lam = lam + rel_step * 2.0 * np.pi * np.sqrt(max(abs(lam), 1.0)) / length
        r = res(lam)
        if np.sign(r) != np.sign(prev_r):
            found.append(brentq(res, prev_l, lam, xtol=1e-14, rtol=1e-15))
        prev_l, prev_r = lam, r
    vals = np.array(found[:k])
    if vals.size < k:
        raise RuntimeError(f"only {vals.size} eigenvalues found below {lam_max}")
    for j, lam in enumerate(vals):
        if lam > 0 and _zero_count(op, lam, order) != j:
            raise RuntimeError(f"shooting oracle missed an eigenvalue below {lam:.6g}")
    return vals
