"""Extension of boundary functions into tubes, and the tube/shell integral inequalities.

Functions on a tube or cusp are finite sums ``sum_xi F_xi(rho) e_xi(x)`` of
torus characters times radial profiles. Every integral then reduces to a 1-D
quadrature in ``rho``: the slice at ``rho`` is a homothetic copy of the
boundary torus, and a character contributes the tangential multiplier
``m^2 / sinh^2 rho + omega^2 / cosh^2 rho`` (tube) or ``4 pi^2 |xi|^2 e^{2 rho}``
(cusp, depth ``rho``) to the gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np
from scipy.interpolate import BSpline, make_interp_spline

from .geometry import (
    CuspModel,
    ManifoldParams,
    MargulisTube,
    Shell,
    TorusLattice,
    extension_theta,
    tube_boundary_volume,
    tube_volume,
)
from .numerics import gauss_legendre
from .spectra import dual_vectors_within, mode_omega

Mode = tuple[int, int]
INAPPLICABLE = "inapplicable"
PASS = "pass"
FAIL = "fail"


def _verdict(applicable: bool, margin: float | None, tol: float) -> str:
    if not applicable:
        return INAPPLICABLE
    return PASS if margin >= -tol else FAIL


# ---------------------------------------------------------------------------
# boundary functions and the extension operator


@dataclass(frozen=True)
class BoundaryFunction:
    """Real trigonometric polynomial ``mean + sum_xi c_xi e^{2 pi i <xi, x>}`` on a flat torus.

    ``coeffs`` is keyed by dual-lattice indices ``(i, j)`` and must be
    Hermitian (``c_{-xi} = conj(c_xi)``); :meth:`from_half` fills in the
    conjugate partners.
    """

    torus: TorusLattice
    coeffs: Mapping[Mode, complex]
    mean: float = 0.0

    def __post_init__(self):
        clean = {}
        for key, c in self.coeffs.items():
            key = (int(key[0]), int(key[1]))
            if key == (0, 0):
                raise ValueError("put the constant term in `mean`")
            clean[key] = complex(c)
        for (i, j), c in clean.items():
            partner = clean.get((-i, -j))
            if partner is None or abs(partner - c.conjugate()) > 1e-12 * max(1.0, abs(c)):
                raise ValueError(f"coefficients are not Hermitian at {(i, j)}")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def from_half(cls, torus: TorusLattice, half: Mapping[Mode, complex], mean: float = 0.0) -> "BoundaryFunction":
        full: dict[Mode, complex] = {}
        for (i, j), c in half.items():
            full[(i, j)] = full.get((i, j), 0) + complex(c)
            full[(-i, -j)] = full.get((-i, -j), 0) + complex(c).conjugate()
        return cls(torus, full, mean)

    @classmethod
    def zero(cls, torus: TorusLattice) -> "BoundaryFunction":
        return cls(torus, {}, 0.0)

    def __add__(self, other: "BoundaryFunction") -> "BoundaryFunction":
        if not np.allclose(self.torus.matrix, other.torus.matrix):
            raise ValueError("boundary functions live on different tori")
        c = dict(self.coeffs)
        for k, v in other.coeffs.items():
            c[k] = c.get(k, 0) + v
        return BoundaryFunction(self.torus, c, self.mean + other.mean)

    def scale(self, alpha: float) -> "BoundaryFunction":
        return BoundaryFunction(self.torus, {k: alpha * v for k, v in self.coeffs.items()}, alpha * self.mean)

    @property
    def oscillating_power(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def sq_norm(self) -> float:
        return self.torus.area * (self.mean**2 + self.oscillating_power)

    def dirichlet(self) -> float:
        return self.torus.area * sum(4 * math.pi**2 * float(np.sum(self.torus.dual_vector(*k) ** 2)) * abs(c) ** 2
                                     for k, c in self.coeffs.items())

    def rayleigh(self) -> float:
        n = self.sq_norm()
        return self.dirichlet() / n if n > 0 else 0.0

    def __call__(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Values at lattice coordinates ``x = u*b0 + v*b1``."""
        out = np.full(np.broadcast(u, v).shape, self.mean, dtype=complex)
        for (i, j), c in self.coeffs.items():
            out += c * np.exp(2j * math.pi * (i * u + j * v))
        return out.real

    def to_dict(self) -> dict[str, Any]:
        return {"torus": self.torus.to_dict(), "mean": self.mean,
                "coeffs": [[i, j, c.real, c.imag] for (i, j), c in self.coeffs.items()]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BoundaryFunction":
        coeffs = {(int(i), int(j)): complex(re, im) for i, j, re, im in d.get("coeffs", [])}
        return cls(TorusLattice.from_dict(d["torus"]), coeffs, float(d.get("mean", 0.0)))


def random_boundary_function(torus: TorusLattice, seed: int, n_modes: int = 6, reach: float = 4.0,
                             mean_zero: bool | None = None) -> BoundaryFunction:
    """Seeded random boundary function.

    Modes are drawn among dual vectors within ``reach`` times the shortest
    nonzero one, with amplitudes ``|c_xi| <= (|xi| / |xi_min|)^{-3}``; the
    decay is measured in units of the shortest dual vector so it is
    independent of the torus scale.
    """
    rng = np.random.default_rng(seed)
    dual = TorusLattice(tuple(map(tuple, torus.dual)))
    xmin = dual.shortest_vector()
    cands = [(i, j, xi) for i, j, xi in dual_vectors_within(torus, reach * xmin)
             if (j > 0 or (j == 0 and i > 0))]
    cands.sort(key=lambda c: (float(c[2] @ c[2]), c[0], c[1]))
    pick = rng.choice(len(cands), size=min(n_modes, len(cands)), replace=False)
    half = {}
    for p in sorted(pick):
        i, j, xi = cands[p]
        decay = (float(np.linalg.norm(xi)) / xmin) ** -3
        half[(i, j)] = decay * rng.uniform(0.2, 1.0) * np.exp(2j * math.pi * rng.uniform())
    if mean_zero is None:
        mean_zero = bool(seed % 2 == 0)
    mean = 0.0 if mean_zero else float(rng.normal())
    return BoundaryFunction.from_half(torus, half, mean)


def first_eigenfunction(torus: TorusLattice) -> BoundaryFunction:
    """Real first eigenfunction ``cos(2 pi <xi_min, x>)`` of a flat torus."""
    dual = TorusLattice(tuple(map(tuple, torus.dual)))
    short = dual.reduced_basis()[0]
    ij = np.rint(np.linalg.solve(torus.dual.T, short)).astype(int)
    return BoundaryFunction.from_half(torus, {(int(ij[0]), int(ij[1])): 0.5})


def cutoff_profile(theta: float):
    """The radial factor of the extension: 0 below theta, linear ramp, 1 above theta + 1."""

    def phi(r):
        return np.clip(np.asarray(r, dtype=float) - theta, 0.0, 1.0)

    def dphi(r):
        r = np.asarray(r, dtype=float)
        return ((r > theta) & (r < theta + 1.0)).astype(float)

    return phi, dphi


@dataclass
class ExtensionPlan:
    """Extension ``F = f0 + phi(rho) g`` of a boundary function ``f = f0 + g``."""

    tube: MargulisTube
    f: BoundaryFunction
    theta: float
    modes: list[dict[str, Any]] = field(default_factory=list)

    @property
    def R(self) -> float:
        return self.tube.radius

    @property
    def F0(self) -> float:
        return self.f.mean

    def profile(self, rho) -> np.ndarray:
        return cutoff_profile(self.theta)[0](rho)

    def mode_profiles(self, rho) -> dict[Mode, np.ndarray]:
        """Complex radial profile of every character, the constant included as (0, 0)."""
        phi = self.profile(rho)
        out = {(0, 0): np.full_like(np.asarray(rho, dtype=float), self.F0, dtype=complex)}
        for key, c in self.f.coeffs.items():
            out[key] = c * phi
        return out

    def breaks(self) -> list[float]:
        return [self.theta, self.theta + 1.0]


@dataclass
class ExtensionReport:
    sq_norm: float
    boundary_sq_norm: float
    dirichlet: float
    rayleigh: float
    rayleigh_boundary: float
    integral: float
    mean_zero: bool
    log_volume: float
    mass_bounds_ok: bool
    mean_preserved: bool | None
    q2_statistic: float | None

    def to_dict(self) -> dict[str, Any]:
        return dict(self.__dict__)


def _slice_area(t: MargulisTube, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    return 2 * math.pi * t.core_length * np.sinh(rho) * np.cosh(rho)


def _tangential(t: MargulisTube, m: int, omega: float, rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    return m**2 / np.sinh(rho) ** 2 + omega**2 / np.cosh(rho) ** 2


def plan_extension(t: MargulisTube, f: BoundaryFunction, params: ManifoldParams | None = None) -> ExtensionPlan:
    params = params or t.params
    if not np.allclose(f.torus.matrix, t.boundary_lattice.matrix, rtol=1e-12, atol=0):
        raise ValueError("boundary function must live on the tube's boundary torus")
    theta = t.radius - math.log(tube_boundary_volume(t)) + params.q1 + 1.0
    if t.radius - theta < 3.0:
        raise ValueError(f"extension needs R - theta >= 3 (got {t.radius - theta:.4g})")
    if theta <= 0:
        raise ValueError("extension needs a positive inner cutoff theta")
    if t.boundary_lattice.injectivity_radius < params.epsilon * (1 - 1e-12):
        raise ValueError("boundary torus is thinner than the Margulis constant")
    modes = [{"m": i, "k": j, "omega": mode_omega(t, i, j), "coeff": [c.real, c.imag]}
             for (i, j), c in f.coeffs.items()]
    return ExtensionPlan(t, f, theta, modes)


def extend(t: MargulisTube, f: BoundaryFunction, params: ManifoldParams | None = None,
           panels: int = 64, order: int = 16) -> tuple[ExtensionPlan, ExtensionReport]:
    """Extend ``f`` into the tube and evaluate the three extension properties."""
    plan = plan_extension(t, f, params)
    R, th = t.radius, plan.theta
    phi, dphi = cutoff_profile(th)
    brk = sorted({*np.linspace(0.0, R, panels + 1)[1:-1], th, th + 1.0})
    x, w = gauss_legendre(0.0, R, order, brk)
    A = _slice_area(t, x)
    vol = tube_volume(t)
    mass_osc = float(w @ (phi(x) ** 2 * A))
    grad_rad = float(w @ (dphi(x) ** 2 * A))
    sq = f.mean**2 * vol
    dir_ = 0.0
    for (m, k), c in f.coeffs.items():
        a2 = abs(c) ** 2
        sq += a2 * mass_osc
        dir_ += a2 * (grad_rad + float(w @ (phi(x) ** 2 * _tangential(t, m, mode_omega(t, m, k), x) * A)))
    bsq = f.sq_norm()
    d = f.rayleigh()
    logv = math.log(vol)
    ray = dir_ / sq if sq > 0 else 0.0
    integral = f.mean * vol  # characters integrate to zero on every slice
    mean_zero = abs(f.mean) <= 1e-15
    tol = 1e-6 * bsq
    mass_bounds_ok = 0.25 * bsq - tol <= sq <= 0.5 * bsq + tol
    mean_preserved = abs(integral) <= 1e-9 * math.sqrt(max(sq, 1e-300) * vol) if mean_zero else None
    q2 = ray / (d * logv) if d > 0 and logv > 0 else None
    return plan, ExtensionReport(sq, bsq, dir_, ray, d, integral, mean_zero, logv, mass_bounds_ok, mean_preserved, q2)


def grid_quadrature(plan: ExtensionPlan, n_rho: int = 24, n_torus: int | None = None) -> dict[str, float]:
    """Independent check of ``int_T F`` and ``int_T F^2``: point samples of ``F`` on a tensor grid.

    The torus factor uses the periodic trapezoid rule in lattice coordinates
    (exact for the trigonometric polynomials involved once the grid is fine
    enough); the radial factor uses Gauss-Legendre panels split at the kinks
    of the cutoff.
    """
    t, f = plan.tube, plan.f
    ni = max([abs(i) for i, _ in f.coeffs] + [0])
    nj = max([abs(j) for _, j in f.coeffs] + [0])
    nu = n_torus or 4 * ni + 4
    nv = n_torus or 4 * nj + 4
    u, v = np.meshgrid(np.arange(nu) / nu, np.arange(nv) / nv, indexing="ij")
    g = (f(u, v) - f.mean).ravel()
    g1, g2 = float(g.mean()), float((g**2).mean())
    x, w = gauss_legendre(0.0, t.radius, n_rho, [plan.theta, plan.theta + 1.0])
    scale = np.sinh(x) * np.cosh(x) / (math.sinh(t.radius) * math.cosh(t.radius))
    area = f.torus.area
    phi = plan.profile(x)
    # slice averages of F = f0 + phi g and of F^2 from the sampled torus averages of g, g^2
    slice_int = area * (f.mean + phi * g1)
    slice_sq = area * (f.mean**2 + 2 * f.mean * phi * g1 + phi**2 * g2)
    return {"integral": float(w @ (scale * slice_int)), "sq_norm": float(w @ (scale * slice_sq))}


def mass_profile(plan: ExtensionPlan, rho: float) -> float:
    """``int F^2`` over the slice at distance ``rho`` from the core."""
    t = plan.tube
    if not 0 < rho <= t.radius * (1 + 1e-15):
        raise ValueError("rho must lie in (0, R]")
    dil = math.sinh(rho) * math.cosh(rho) / (math.sinh(t.radius) * math.cosh(t.radius))
    phi = float(plan.profile(rho))
    return dil * plan.f.torus.area * (plan.f.mean**2 + phi**2 * plan.f.oscillating_power)


# ---------------------------------------------------------------------------
# radial-separable functions on tubes and cusps


@dataclass
class SeparableFunction:
    """``sum_mode profile_mode(rho) * e_mode`` with real profiles over an orthonormal real character basis.

    Each key ``(i, j)`` names a real character (cosine or sine of
    ``2 pi <xi, x>``) normalized to unit mean square; ``(0, 0)`` is the
    constant. Profiles are callables with a ``derivative()`` method
    (e.g. :class:`scipy.interpolate.BSpline`).
    """

    profiles: dict[Mode, BSpline]


def _spline(coef: np.ndarray, a: float, b: float, degree: int = 3) -> BSpline:
    inner = np.linspace(a, b, coef.shape[0] - degree + 1)
    knots = np.concatenate([[a] * degree, inner, [b] * degree])
    return BSpline(knots, coef, degree, extrapolate=False)


def _domain(space: MargulisTube | CuspModel):
    """(interval, slice area, tangential multiplier, boundary endpoint)."""
    if isinstance(space, MargulisTube):
        t = space
        lat = t.boundary_lattice

        def area(r):
            return _slice_area(t, r)

        def tang(key, r):
            return _tangential(t, key[0], mode_omega(t, key[0], key[1]), r)

        return (0.0, t.radius), area, tang, t.radius
    if isinstance(space, CuspModel):
        c = space
        lat = c.cross_section

        def area(r):
            return lat.area * np.exp(-2.0 * np.asarray(r, dtype=float))

        def tang(key, r):
            xi = lat.dual_vector(*key)
            return 4 * math.pi**2 * float(xi @ xi) * np.exp(2.0 * np.asarray(r, dtype=float))

        return (0.0, c.rho_max), area, tang, 0.0
    raise TypeError("space must be a MargulisTube or CuspModel")


def separable_integrals(space, f: SeparableFunction, panels: int = 64, order: int = 12) -> dict[str, float]:
    (a, b), area, tang, edge = _domain(space)
    x, w = gauss_legendre(a, b, order, np.linspace(a, b, panels + 1)[1:-1])
    A = area(x)
    sq = grad = bnd = 0.0
    for key, p in f.profiles.items():
        v = np.nan_to_num(p(x))
        dv = np.nan_to_num(p.derivative()(x))
        sq += float(w @ (v**2 * A))
        grad += float(w @ (dv**2 * A))
        if key != (0, 0):
            grad += float(w @ (v**2 * tang(key, x) * A))
        bnd += float(p(edge)) ** 2 * float(area(edge))
    return {"sq_norm": sq, "dirichlet": grad, "boundary_sq_norm": bnd}


def random_separable(space, seed: int, n_modes: int | None = None, knots: int = 10) -> SeparableFunction:
    """Seeded separable function whose boundary trace is damped.

    Non-constant characters get profiles vanishing at the core of a tube;
    profiles on a cusp vanish at the truncation depth.
    """
    rng = np.random.default_rng(seed)
    n_modes = 1 + seed % 3 if n_modes is None else n_modes
    (a, b), _, _, edge = _domain(space)
    lat = space.boundary_lattice if isinstance(space, MargulisTube) else space.cross_section
    xmin = TorusLattice(tuple(map(tuple, lat.dual))).shortest_vector()
    cands = [(i, j) for i, j, _ in dual_vectors_within(lat, 3.0 * xmin) if (j > 0 or (j == 0 and i > 0))]
    cands.sort()
    keys = [(0, 0)] + [cands[p] for p in sorted(rng.choice(len(cands), size=min(n_modes - 1, len(cands)),
                                                              replace=False))]
    damp = rng.uniform(0.0, 0.3)
    profiles = {}
    for key in keys:
        coef = rng.normal(size=knots)
        if edge == b:
            coef[-1] *= damp
            if key != (0, 0) and isinstance(space, MargulisTube):
                coef[0] = 0.0
        else:
            coef[0] *= damp
            coef[-1] = 0.0
        profiles[key] = _spline(coef, a, b)
    return SeparableFunction(profiles)


def core_inequality_check(space, f: SeparableFunction, n: int = 3) -> dict[str, Any]:
    """Margin ``4/(n-2)^2 int |grad f|^2 - int f^2`` under ``int f^2 >= int_boundary f^2``."""
    ints = separable_integrals(space, f)
    ok = ints["sq_norm"] >= ints["boundary_sq_norm"]
    out = {**ints, "hypothesis_ok": ok, "tolerance": 1e-8 * max(1.0, ints["sq_norm"])}
    out["margin"] = 4.0 / (n - 2) ** 2 * ints["dirichlet"] - ints["sq_norm"] if ok else None
    out["verdict"] = _verdict(ok, out["margin"], out["tolerance"])
    return out


# ---------------------------------------------------------------------------
# shells


def random_shell(seed: int) -> Shell:
    rng = np.random.default_rng(seed)
    k = float(rng.uniform(2.0, 10.0))
    if rng.uniform() < 0.5:
        return Shell(float(rng.uniform(0.1, 10.0)), k, "cusp")
    return Shell(float(rng.uniform(0.1, 10.0)), k, "tube", k + float(rng.uniform(0.2, 6.0)))


def random_shell_profile(sh: Shell, seed: int, knots: int = 12) -> BSpline:
    """Seeded profile on ``[0, k]`` with mass biased toward the inner end."""
    rng = np.random.default_rng(seed)
    t = np.linspace(0.0, sh.height, knots)
    coef = rng.normal(size=knots) * np.exp(-rng.uniform(1.5, 4.0) * t)
    return _spline(coef, 0.0, sh.height)


def shell_rayleigh_check(sh: Shell, f: BSpline, panels: int = 64, order: int = 12) -> dict[str, Any]:
    """``R(f) - 1/3`` under ``int_{[0,1]} f^2 >= 3 int_{[k-1,k]} f^2`` for a radial profile on a shell."""
    k = sh.height
    x, w = gauss_legendre(0.0, k, order, sorted({*np.linspace(0.0, k, panels + 1)[1:-1], 1.0, k - 1.0}))
    A = sh.area(x)
    v = np.nan_to_num(f(x))
    dv = np.nan_to_num(f.derivative()(x))
    inner = float(w @ np.where(x <= 1.0, v**2 * A, 0.0))
    outer = float(w @ np.where(x >= k - 1.0, v**2 * A, 0.0))
    sq = float(w @ (v**2 * A))
    grad = float(w @ (dv**2 * A))
    ok = sq > 0 and inner >= 3.0 * outer
    margin = grad / sq - 1.0 / 3.0 if ok else None
    return {"inner": inner, "outer": outer, "sq_norm": sq, "dirichlet": grad, "hypothesis_ok": ok,
            "margin": margin, "tolerance": 1e-8, "verdict": _verdict(ok, margin, 1e-8)}


# ---------------------------------------------------------------------------
# slice renormalization on a collar


@dataclass
class CollarData:
    """``f(x, s) = sum_j c_j(s) e_j(x)`` on ``V x [0, delta]``.

    ``coeffs`` is a vector-valued spline ``s -> (c_1(s), ..., c_J(s))`` over an
    orthonormal real character basis with tangential multipliers
    ``multipliers``; ``area(s)`` is the slice area.
    """

    delta: float
    coeffs: BSpline
    multipliers: np.ndarray
    area: Callable[[np.ndarray], np.ndarray]


def random_collar(seed: int, n_modes: int = 2, knots: int = 8) -> CollarData:
    rng = np.random.default_rng(seed)
    delta = float(rng.uniform(0.2, 1.0))
    coef = rng.normal(size=(knots, n_modes)) + np.array([3.0] + [0.0] * (n_modes - 1))
    rate = float(rng.uniform(2.0, 2.5))
    base = float(rng.uniform(0.5, 5.0))
    mult = np.concatenate([[0.0], rng.uniform(0.5, 20.0, size=n_modes - 1)])
    return CollarData(delta, _spline(coef, 0.0, delta), mult, lambda s: base * np.exp(rate * np.asarray(s)))


def slice_renormalize(c: CollarData, order: int = 16, panels: int = 32) -> dict[str, Any]:
    """Renormalize ``f`` to ``u(x, s) = e^{beta(s)} f(x, delta)`` with matching slice masses.

    Returns ``int nu(u)^2 - int nu(f)^2`` (never positive up to rounding) and
    the tangential energies of both functions.
    """
    x, w = gauss_legendre(0.0, c.delta, order, np.linspace(0.0, c.delta, panels + 1)[1:-1])
    C = c.coeffs(x)
    dC = c.coeffs.derivative()(x)
    S = (C**2).sum(axis=1)
    if np.any(S <= 0):
        raise ValueError("collar data has a slice of zero mass")
    end = c.coeffs(np.array([c.delta]))[0]
    S_end = float(end @ end)
    if S_end <= 0:
        raise ValueError("collar data has a slice of zero mass")
    A = c.area(x)
    # beta = log(S / S_end) / 2, beta' = <C, C'> / S
    dbeta = (C * dC).sum(axis=1) / S
    nu_u = float(w @ (dbeta**2 * S * A))
    nu_f = float(w @ ((dC**2).sum(axis=1) * A))
    tan_u = float(w @ (S / S_end * float((end**2 * c.multipliers).sum()) * A))
    tan_f = float(w @ ((C**2 * c.multipliers).sum(axis=1) * A))
    mass_u = float(w @ (S * A))
    mass_f = mass_u  # slice masses agree by construction
    margin = nu_u - nu_f
    return {"delta": c.delta, "normal_u": nu_u, "normal_f": nu_f, "margin": margin,
            "tangential_u": tan_u, "tangential_f": tan_f, "mass_u": mass_u, "mass_f": mass_f,
            "tolerance": 1e-8 * max(1.0, nu_f), "verdict": PASS if margin <= 1e-8 * max(1.0, nu_f) else FAIL}


def collar_of_product(beta: Callable, g: np.ndarray, delta: float, knots: int = 16) -> CollarData:
    """Collar data of product form ``e^{beta(s)} g`` (the equality case)."""
    s = np.linspace(0.0, delta, knots)
    spl = make_interp_spline(s, np.exp(beta(s))[:, None] * np.asarray(g)[None, :], k=3)
    return CollarData(delta, spl, np.ones(len(g)), lambda x: np.exp(2.0 * np.asarray(x)))


__all__ = [
    "BoundaryFunction", "ExtensionPlan", "ExtensionReport", "CollarData", "SeparableFunction",
    "INAPPLICABLE", "PASS", "FAIL", "extend", "plan_extension", "grid_quadrature", "mass_profile",
    "random_boundary_function", "first_eigenfunction", "cutoff_profile", "core_inequality_check",
    "separable_integrals", "random_separable", "shell_rayleigh_check", "random_shell",
    "random_shell_profile", "slice_renormalize", "random_collar", "collar_of_product", "extension_theta",
]
