"""Riccati/Jacobi-field comparison for diagonal curvature profiles.

Along a radial geodesic the shape operator ``A`` of the Jacobi tensor with one
Neumann-type field (``J_1(0) = Y_1``, ``J_1'(0) = 0``) and ``n - 2``
Dirichlet-type fields (``J_i(0) = 0``, ``J_i'(0) = Y_i``) solves
``A' + A^2 + R = 0`` and ``(log det J)' = tr A``.

For diagonal profiles every entry evolves independently. The integration runs
in ``tau = log t`` (the Dirichlet entries behave like ``1/t``) and tracks the
deviations ``a_i - 1`` and the volume-growth margin ``j - (n-1) int_0^t j``
directly, so margins that nearly cancel are never formed by subtraction of
large numbers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .numerics import BlowUpError, gauss_legendre, ode_rk4

T_START = 1e-3


@dataclass(frozen=True)
class CurvatureProfile:
    """Sectional curvatures ``kappa(t)`` (diagonal of ``R_{eta'}``), each in ``[-b^2, -1]``."""

    n: int
    kappa: Callable[[float], np.ndarray]
    b: float = 1.0
    label: str = ""
    # (bias, amp, freq, phase) of a random profile; enables batched evaluation
    coeffs: tuple | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("n must be >= 3")
        probe = np.linspace(0.0, 10.0, 257)
        vals = np.array([self(t) for t in probe])
        if vals.shape != (probe.size, self.n - 1):
            raise ValueError("kappa must return n-1 diagonal entries")
        if vals.max() > -1 + 1e-12 or vals.min() < -self.b**2 - 1e-12:
            raise ValueError("curvature samples must lie in [-b^2, -1]")

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.kappa(t), dtype=float).reshape(self.n - 1)

    @classmethod
    def constant(cls, n: int, kappa: float) -> "CurvatureProfile":
        b = math.sqrt(-kappa)
        vec = np.full(n - 1, float(kappa))
        return cls(n, lambda t: vec, b, f"constant({kappa:g})")

    @classmethod
    def from_samples(cls, n: int, t: np.ndarray, values: np.ndarray, b: float) -> "CurvatureProfile":
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float).reshape(t.size, n - 1)

        def kappa(s):
            return np.array([np.interp(s, t, values[:, i]) for i in range(n - 1)])

        return cls(n, kappa, b, "sampled")

    @classmethod
    def random(cls, n: int, b: float, seed: int, modes: int = 4) -> "CurvatureProfile":
        """Smooth random diagonal profile with values in ``[-b^2, -1]``."""
        rng = np.random.default_rng(seed)
        freq = rng.uniform(0.2, 3.0, size=(n - 1, modes))
        phase = rng.uniform(0, 2 * np.pi, size=(n - 1, modes))
        amp = rng.normal(0, 1.5, size=(n - 1, modes))
        bias = rng.normal(0, 1.0, size=n - 1)
        span = b * b - 1.0

        def kappa(t):
            s = bias + (amp * np.sin(freq * t + phase)).sum(axis=1)
            return -1.0 - span / (1.0 + np.exp(-s))

        return cls(n, kappa, b, f"random(seed={seed})", (bias, amp, freq, phase))


def _batch_kappa(profiles: list[CurvatureProfile]) -> Callable[[float], np.ndarray]:
    """Curvature of all profiles at time t, shape (P, n-1)."""
    if all(p.coeffs is not None for p in profiles):
        bias = np.stack([p.coeffs[0] for p in profiles])
        amp = np.stack([p.coeffs[1] for p in profiles])
        freq = np.stack([p.coeffs[2] for p in profiles])
        phase = np.stack([p.coeffs[3] for p in profiles])
        span = np.array([p.b**2 - 1.0 for p in profiles])[:, None]

        def kappa(t):
            s = bias + (amp * np.sin(freq * t + phase)).sum(axis=2)
            return -1.0 - span / (1.0 + np.exp(-s))

        return kappa
    return lambda t: np.stack([p(t) for p in profiles])


@dataclass
class JacobiTrace:
    t: np.ndarray
    A: np.ndarray  # diagonal of the shape operator, shape (len(t), n-1)
    j: np.ndarray
    logderiv: np.ndarray
    growth: np.ndarray  # j(t) - (n-1) int_0^t j
    dev: np.ndarray  # A - 1, carried with full relative precision
    residual: float
    n: int


def _const_curvature_start(k: np.ndarray, t: float):
    """Shape operator, det J and int_0^t det J for constant curvature -k at time t."""
    s = np.sqrt(k)
    a = s / np.tanh(s * t)
    a[0] = s[0] * np.tanh(s[0] * t)

    def jac(x):
        x = np.asarray(x)[..., None]
        out = np.cosh(s[0] * x[..., 0])
        for si in s[1:]:
            out = out * np.sinh(si * x[..., 0]) / si
        return out

    xs, ws = gauss_legendre(0.0, t, 16)
    return a, float(jac(np.array(t))), float(ws @ jac(xs))


def integrate_riccati_many(profiles: list[CurvatureProfile], T: float = 5.0, steps: int = 8192,
                           t0: float = T_START) -> list[JacobiTrace]:
    """Integrate the Riccati flow of several same-dimension profiles in one batched RK4 run.

    Each flow starts at ``t0`` from the constant-curvature solution for the
    local curvature ``kappa(t0)`` (the hyperbolic solution when ``kappa = -1``).
    """
    if T > 10:
        raise ValueError("horizon T must be <= 10")
    if steps < 1024:
        raise ValueError("steps must be >= 1024")
    if not profiles:
        return []
    n = profiles[0].n
    if any(p.n != n for p in profiles):
        raise ValueError("profiles must share the dimension")
    P, d = len(profiles), n - 1
    kappa = _batch_kappa(profiles)
    y0 = np.empty((P, d + 2))
    k0 = kappa(t0)
    for i in range(P):
        a0, j0, int0 = _const_curvature_start(-k0[i], t0)
        y0[i, :d] = a0 - 1.0
        y0[i, d] = math.log(j0)
        y0[i, d + 1] = j0 - d * int0

    def rhs(tau, y):
        t = math.exp(tau)
        y = y.reshape(P, d + 2)
        e = y[:, :d]
        es = e.sum(axis=1)
        out = np.empty_like(y)
        out[:, :d] = -((1.0 + e) ** 2) - kappa(t)
        out[:, d] = d + es
        out[:, d + 1] = np.exp(y[:, d]) * es
        return (t * out).ravel()

    try:
        tau, Y = ode_rk4(rhs, y0.ravel(), (math.log(t0), math.log(T)), steps)
    except BlowUpError as exc:
        raise BlowUpError(math.exp(exc.t), "Riccati flow blew up (focal point)") from exc
    Y = Y.reshape(tau.size, P, d + 2)
    t = np.exp(tau)
    K = np.stack([kappa(s) for s in t])  # (len(t), P, d)
    dtau = tau[1] - tau[0]
    traces = []
    for i in range(P):
        dev = Y[:, i, :d]
        A = 1.0 + dev
        # 4th-order central differences in tau for the pointwise residual A' + A^2 + R,
        # measured relative to max(1, A^2)
        dA = (-A[4:] + 8 * A[3:-1] - 8 * A[1:-3] + A[:-4]) / (12 * dtau) / t[2:-2, None]
        res = np.abs(dA + A[2:-2] ** 2 + K[2:-2, i]) / np.maximum(1.0, A[2:-2] ** 2)
        traces.append(JacobiTrace(t, A, np.exp(Y[:, i, d]), A.sum(axis=1), Y[:, i, d + 1], dev,
                                  float(res.max()), n))
    return traces


def integrate_riccati(profile: CurvatureProfile, T: float = 5.0, steps: int = 8192, t0: float = T_START) -> JacobiTrace:
    """Integrate the Riccati flow on ``[t0, T]``; see :func:`integrate_riccati_many`."""
    return integrate_riccati_many([profile], T, steps, t0)[0]


def hyperbolic_jacobian(n: int, t):
    t = np.asarray(t, dtype=float)
    return np.sinh(t) ** (n - 2) * np.cosh(t)


def hyperbolic_logderiv_excess(n: int, t) -> np.ndarray:
    """``jbar'/jbar - (n-1)`` = ``(n-2)(coth t - 1) + (tanh t - 1)``, without cancellation."""
    t = np.asarray(t, dtype=float)
    e2 = np.expm1(2 * t)
    return (n - 2) * 2.0 / e2 - 2.0 / (e2 + 2.0)


def cusp_jacobian(n: int, t):
    return np.exp(-(n - 1) * np.asarray(t, dtype=float))


def volume_growth_margin(trace: JacobiTrace, n: int | None = None) -> float:
    """``min_R [j(R) - (n-1) int_0^R j]`` over the trace grid."""
    if n is not None and n != trace.n:
        raise ValueError("dimension mismatch")
    return float(trace.growth.min())


def logderiv_margin(trace: JacobiTrace) -> np.ndarray:
    return trace.dev.sum(axis=1) - hyperbolic_logderiv_excess(trace.n, trace.t)


def logderiv_compare(trace: JacobiTrace, n: int | None = None, cutoff: float = T_START) -> float:
    """``min_t [j'/j - jbar'/jbar]`` for ``t >= cutoff``."""
    if n is not None and n != trace.n:
        raise ValueError("dimension mismatch")
    mask = trace.t >= cutoff * (1 - 1e-12)
    return float(logderiv_margin(trace)[mask].min())


def trace_csv(trace: JacobiTrace) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "j", "jbar", "logderiv_margin", "growth_margin"])
    jbar = hyperbolic_jacobian(trace.n, trace.t)
    for row in zip(trace.t, trace.j, jbar, logderiv_margin(trace), trace.growth):
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()
