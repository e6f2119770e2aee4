"""Neumann spectra of flat tori, hyperbolic Margulis tubes and cusps.

Tube spectra are assembled from separated modes ``e^{i(m sigma + omega s)}``:
the deck generator ``(sigma, s) -> (sigma + twist, s + l)`` forces
``omega = (2 pi k - m twist) / l``, and each mode leaves the radial problem

    -(1/J)(J u')' + (m^2 / sinh^2 rho + omega^2 / cosh^2 rho) u = lam u,
    J = sinh rho cosh rho,

with Neumann conditions at ``rho = R`` and regularity at the core.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .geometry import (
    CuspModel,
    ManifoldParams,
    MargulisTube,
    TorusLattice,
    extension_theta,
    tube_boundary_volume,
    tube_volume,
)
from .numerics import DIRICHLET, NEUMANN, RadialOperator, richardson, sl_solve, symmetric_eigs

DEFAULT_CELLS = 1024
_TOL = 1e-12


@dataclass(frozen=True, order=True)
class TubeMode:
    m: int
    k: int
    omega: float = field(compare=False)

    @property
    def multiplicity(self) -> int:
        return 1 if (self.m, self.k) == (0, 0) else 2


@dataclass
class SpectrumEntry:
    value: float
    label: tuple
    mult: int = 1
    err: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        d = {"lambda": self.value, "mult": self.mult, "err": self.err}
        if len(self.label) == 2:
            d["m"], d["k"] = int(self.label[0]), int(self.label[1])
        else:
            d["label"] = list(self.label)
        return d


@dataclass
class SpectrumReport:
    entries: list[SpectrumEntry]
    grid: dict[str, Any] = field(default_factory=dict)
    flags: list[str] = field(default_factory=list)
    modes: list[dict[str, Any]] = field(default_factory=list)

    @property
    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity."""
        return np.array([e.value for e in self.entries for _ in range(e.mult)])

    @property
    def errors(self) -> np.ndarray:
        return np.array([e.err for e in self.entries for _ in range(e.mult)])

    def levels(self, rtol: float = 1e-9) -> list[tuple[float, int]]:
        """Distinct eigenvalues with total multiplicity."""
        out: list[tuple[float, int]] = []
        for v in self.values:
            if out and abs(v - out[-1][0]) <= rtol * max(1.0, abs(v)):
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((float(v), 1))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "grid": self.grid,
            "flags": list(self.flags),
            "modes": self.modes,
            "spectrum": [e.to_dict() for e in self.entries],
        }


def _sorted(entries: list[SpectrumEntry]) -> list[SpectrumEntry]:
    return sorted(entries, key=lambda e: (e.value, tuple(e.label)))


def dual_vectors_within(lat: TorusLattice, radius: float) -> list[tuple[int, int, np.ndarray]]:
    """All dual-lattice vectors ``xi = i*d0 + j*d1`` with ``|xi| <= radius``.

    The search box is built in a reduced dual basis, which keeps it tight for
    strongly skewed lattices; indices are mapped back to the original basis.
    """
    d = lat.dual
    red = TorusLattice(tuple(map(tuple, d))).reduced_basis()
    U = np.rint(red @ np.linalg.inv(d)).astype(int)  # red = U d, U unimodular
    area = abs(np.linalg.det(red))
    # Cramer's rule: |a| <= |r1| |xi| / area and |b| <= |r0| |xi| / area
    amax = int(math.floor(radius * np.linalg.norm(red[1]) / area + 1e-9))
    bmax = int(math.floor(radius * np.linalg.norm(red[0]) / area + 1e-9))
    if (2 * amax + 1) * (2 * bmax + 1) > 50_000_000:
        raise ValueError("dual-lattice enumeration too large; reduce the radius")
    a = np.arange(-amax, amax + 1)
    out = []
    for b in range(-bmax, bmax + 1):
        ab = np.stack([a, np.full_like(a, b)], axis=1)
        ij = ab @ U
        xi = ij @ d
        r = np.hypot(xi[:, 0], xi[:, 1])
        for idx in np.flatnonzero(r <= radius * (1 + 1e-12)):
            out.append((int(ij[idx, 0]), int(ij[idx, 1]), xi[idx]))
    out.sort(key=lambda v: (v[0], v[1]))
    return out


def torus_spectrum(lat: TorusLattice, count: int) -> SpectrumReport:
    """The lowest ``count`` Laplace eigenvalues ``4 pi^2 |xi|^2`` of the flat torus, with labels."""
    if count < 1:
        raise ValueError("count must be >= 1")
    red = np.linalg.norm(TorusLattice(tuple(map(tuple, lat.dual))).reduced_basis(), axis=1)
    radius = float(red.max())
    while True:
        vecs = dual_vectors_within(lat, radius)
        if len(vecs) > count:
            break
        radius *= 1.5
    vals = sorted(((4 * math.pi**2 * float(xi @ xi), (i, j)) for i, j, xi in vecs), key=lambda t: (t[0], t[1]))
    # the next vector outside the radius has 4 pi^2 |xi|^2 > 4 pi^2 radius^2, so the first
    # ``count`` values inside the disk are the true lowest ones
    entries = [SpectrumEntry(v, lab) for v, lab in vals[:count]]
    if entries:
        entries[0].value = 0.0 if entries[0].label == (0, 0) else entries[0].value
    return SpectrumReport(entries, grid={"method": "dual-lattice enumeration", "radius": radius})


def torus_lambda1(lat: TorusLattice) -> float:
    """First nonzero eigenvalue of the flat torus (shortest dual vector)."""
    u = TorusLattice(tuple(map(tuple, lat.dual))).shortest_vector()
    return 4 * math.pi**2 * u**2


def torus_lambda1_floor(lat: TorusLattice, params: ManifoldParams | None = None) -> dict[str, Any]:
    """The floor ``c2 / area^2`` for ``lambda_1`` of a thick torus, with its margin.

    Applies only when the injectivity radius is at least ``epsilon``; thinner
    tori are flagged inapplicable and carry no margin.
    """
    params = params or ManifoldParams()
    c2 = params.constants["c2"]
    area = lat.area
    out: dict[str, Any] = {"area": area, "shortest": lat.shortest_vector(), "floor": c2 / area**2,
                           "applicable": lat.injectivity_radius >= params.epsilon * (1 - 1e-12)}
    if out["applicable"]:
        lam1 = torus_lambda1(lat)
        out.update({"lambda1": lam1, "statistic": lam1 * area**2, "margin": lam1 - c2 / area**2})
    return out


def mode_omega(t: MargulisTube, m: int, k: int) -> float:
    return (2 * math.pi * k - m * t.twist) / t.core_length


def mode_floor(t: MargulisTube, m: int, omega: float) -> float:
    """Minimum over the tube of the angular potential of a mode (attained at the boundary)."""
    return m**2 / math.sinh(t.radius) ** 2 + omega**2 / math.cosh(t.radius) ** 2


def tube_modes(t: MargulisTube, lambda_max: float) -> list[TubeMode]:
    """Representatives (one per pair ``+-(m, k)``) of all modes whose potential floor is <= lambda_max."""
    if lambda_max <= 0:
        raise ValueError("lambda_max must be positive")
    sR, cR = math.sinh(t.radius), math.cosh(t.radius)
    mmax = int(math.floor(sR * math.sqrt(lambda_max)))
    modes = []
    for m in range(0, mmax + 1):
        rest = lambda_max - m**2 / sR**2
        if rest < 0:
            continue
        wmax = cR * math.sqrt(rest)
        # |2 pi k - m twist| <= l * wmax
        lo = math.ceil((m * t.twist - t.core_length * wmax) / (2 * math.pi) - 1e-12)
        hi = math.floor((m * t.twist + t.core_length * wmax) / (2 * math.pi) + 1e-12)
        for k in range(lo, hi + 1):
            if m == 0 and k < 0:
                continue
            om = mode_omega(t, m, k)
            if mode_floor(t, m, om) <= lambda_max * (1 + _TOL):
                modes.append(TubeMode(m, k, om))
    return sorted(modes)


def mode_operator(t: MargulisTube, mode: TubeMode) -> RadialOperator:
    m2, w2 = float(mode.m**2), float(mode.omega**2)

    def weight(r):
        return np.sinh(r) * np.cosh(r)

    potential = None
    if m2 or w2:
        def potential(r):
            return m2 / np.sinh(r) ** 2 + w2 / np.cosh(r) ** 2

    return RadialOperator(weight, 0.0, t.radius, potential, NEUMANN if mode.m == 0 else DIRICHLET, NEUMANN)


@dataclass
class ModeSpectrum:
    mode: TubeMode
    values: np.ndarray
    errors: np.ndarray
    cells: int
    resolved: bool


def tube_mode_spectrum(t: MargulisTube, mode: TubeMode, cells: int = DEFAULT_CELLS, count: int = 6) -> ModeSpectrum:
    """Lowest ``count`` radial eigenvalues of one mode, Richardson-extrapolated from (N, 2N) cells."""
    op = mode_operator(t, mode)
    coarse = sl_solve(op, np.linspace(0.0, t.radius, cells + 1), count).values
    fine = sl_solve(op, np.linspace(0.0, t.radius, 2 * cells + 1), count).values
    vals, errs = richardson(coarse, fine)
    if mode.m == 0 and mode.k == 0:
        vals[0], errs[0] = 0.0, 0.0
    resolved = count <= cells // 8 and bool(np.all(errs <= 1e-3 * np.maximum(1.0, np.abs(vals))))
    return ModeSpectrum(mode, vals, errs, cells, resolved)


def tube_neumann_spectrum(t: MargulisTube, lambda_max: float, cells: int = DEFAULT_CELLS) -> SpectrumReport:
    """All Neumann eigenvalues ``<= lambda_max`` of the tube, merged over modes."""
    entries: list[SpectrumEntry] = []
    modes_out = []
    flags = []
    for mode in tube_modes(t, lambda_max):
        count = 4
        while True:
            ms = tube_mode_spectrum(t, mode, cells, count)
            if ms.values[-1] > lambda_max or count >= cells // 8:
                break
            count *= 2
        if not ms.resolved:
            flags.append(f"mode ({mode.m},{mode.k}) under-resolved")
        keep = ms.values <= lambda_max
        modes_out.append({"m": mode.m, "k": mode.k, "omega": mode.omega, "eigs": ms.values[keep].tolist()})
        for v, e in zip(ms.values[keep], ms.errors[keep]):
            entries.append(SpectrumEntry(float(v), (mode.m, mode.k), mode.multiplicity, float(e)))
    return SpectrumReport(_sorted(entries), {"cells": cells, "richardson": [cells, 2 * cells]}, flags, modes_out)


def tube_lambda1(t: MargulisTube, cells: int = DEFAULT_CELLS) -> SpectrumEntry:
    """First nonzero Neumann eigenvalue of the tube.

    A few low modes give an upper bound; every mode whose potential floor lies
    below that bound is then solved, so no candidate can be missed.
    """
    cand = [TubeMode(0, 0, 0.0), TubeMode(1, 0, mode_omega(t, 1, 0))]
    bound = math.inf
    for mode in cand:
        ms = tube_mode_spectrum(t, mode, cells, 2)
        bound = min(bound, ms.values[1] if mode.m == 0 and mode.k == 0 else ms.values[0])
    best = None
    for mode in tube_modes(t, bound):
        ms = tube_mode_spectrum(t, mode, cells, 2)
        i = 1 if (mode.m, mode.k) == (0, 0) else 0
        e = SpectrumEntry(float(ms.values[i]), (mode.m, mode.k), mode.multiplicity, float(ms.errors[i]))
        if best is None or (e.value, e.label) < (best.value, best.label):
            best = e
    return best


def check_tube_lambda1(t: MargulisTube, params: ManifoldParams | None = None, cells: int = DEFAULT_CELLS) -> dict[str, Any]:
    """Neumann ``lambda_1`` of a tube against the shape ``log vol(T) / vol(dT)^2``."""
    params = params or t.params
    theta = extension_theta(t)
    out: dict[str, Any] = {"core_length": t.core_length, "radius": t.radius, "twist": t.twist,
                           "theta": theta, "applicable": t.radius - theta >= 3.0}
    if not out["applicable"]:
        return out
    lam1 = tube_lambda1(t, cells)
    area, vol = tube_boundary_volume(t), tube_volume(t)
    ratio = lam1.value * area**2 / math.log(vol)
    out.update({"lambda1": lam1.value, "lambda1_err": lam1.err, "mode": list(lam1.label),
                "boundary_area": area, "volume": vol, "ratio": ratio,
                "within_q3": ratio <= params.constants["q3"]})
    return out


def tube_lambda1_2d(t: MargulisTube, n_rho: int = 48, n_sigma: int = 16) -> tuple[float, float]:
    """Independent oracle: first nonzero eigenvalue of the tube on functions independent of ``s``.

    Assembles the full (rho, sigma) finite-volume/finite-difference matrix
    (periodic second differences in sigma) and solves it densely at two
    resolutions; returns the Richardson value and its error estimate.
    Only valid when ``omega = 0`` for ``k = 0`` modes, i.e. ``twist = 0``.
    """
    if t.twist != 0.0:
        raise ValueError("the (rho, sigma) oracle needs an untwisted tube")

    def solve(nr, ns):
        edges = np.linspace(0.0, t.radius, nr + 1)
        rho = 0.5 * (edges[:-1] + edges[1:])
        hr, hs = t.radius / nr, 2 * math.pi / ns
        J = np.sinh(rho) * np.cosh(rho)
        Jf = np.sinh(edges[1:-1]) * np.cosh(edges[1:-1])
        size = nr * ns
        K = np.zeros((size, size))
        idx = np.arange(size).reshape(nr, ns)
        for i in range(nr - 1):
            c = Jf[i] / hr * hs
            a, b = idx[i], idx[i + 1]
            K[a, a] += c
            K[b, b] += c
            K[a, b] -= c
            K[b, a] -= c
        for i in range(nr):
            c = J[i] / np.sinh(rho[i]) ** 2 * hr / hs
            a, b = idx[i], np.roll(idx[i], -1)
            K[a, a] += c
            K[b, b] += c
            K[a, b] -= c
            K[b, a] -= c
        mass = np.repeat(J * hr * hs, ns)
        s = 1.0 / np.sqrt(mass)
        vals, _ = symmetric_eigs(K * s[:, None] * s[None, :], 2)
        return vals[1]

    return tuple(float(x) for x in richardson(solve(n_rho, n_sigma), solve(2 * n_rho, 2 * n_sigma)))


def cusp_spectrum(c: CuspModel, lambda_max: float, cells: int = DEFAULT_CELLS) -> SpectrumReport:
    """Eigenvalues ``<= lambda_max`` (and below the essential floor 1) of a truncated cusp.

    Torus mode ``mu = 4 pi^2 |xi|^2`` leaves ``-u'' + 2u' + mu e^{2 rho} u = lam u``
    on ``[0, rho_max]``: Neumann at the boundary torus; at ``rho_max`` Dirichlet
    for ``mu > 0`` (decay surrogate) and Neumann for ``mu = 0`` (truncated
    finite-volume end, whose only eigenvalue below 1 is the constant).
    """
    floor = 1.0
    lam_cap = min(lambda_max, floor)
    flags = []
    entries: list[SpectrumEntry] = []
    modes_out = []
    radius = math.sqrt(lam_cap) / (2 * math.pi)
    vecs = [(i, j, xi) for i, j, xi in dual_vectors_within(c.cross_section, radius)
            if (i, j) == (0, 0) or (j > 0 or (j == 0 and i > 0))]
    edges = [np.linspace(0.0, c.rho_max, cells + 1), np.linspace(0.0, c.rho_max, 2 * cells + 1)]

    def weight(r):
        return np.exp(-2.0 * r)

    for i, j, xi in sorted(vecs, key=lambda v: (float(v[2] @ v[2]), v[0], v[1])):
        mu = 4 * math.pi**2 * float(xi @ xi)
        if (i, j) == (0, 0):
            entries.append(SpectrumEntry(0.0, (0, 0), 1, 0.0))
            modes_out.append({"i": 0, "j": 0, "mu": 0.0, "eigs": [0.0]})
            continue
        if math.exp(2 * c.rho_max) * mu < 10 * lambda_max:
            flags.append(f"truncation too short for mode ({i},{j})")
        op = RadialOperator(weight, 0.0, c.rho_max, lambda r, mu=mu: mu * np.exp(2.0 * r), NEUMANN, DIRICHLET)
        count = 4
        while True:
            sols = [sl_solve(op, e, count).values for e in edges]
            vals, errs = richardson(*sols)
            if vals[-1] > lam_cap or count >= cells // 8:
                break
            count *= 2
        keep = vals < lam_cap
        modes_out.append({"i": i, "j": j, "mu": mu, "eigs": vals[keep].tolist()})
        for v, e in zip(vals[keep], errs[keep]):
            entries.append(SpectrumEntry(float(v), (i, j), 2, float(e)))
    return SpectrumReport(_sorted(entries), {"cells": cells, "rho_max": c.rho_max, "floor": floor}, flags, modes_out)
