"""Glued radial model manifolds: tube, thick collar and cusp segments on one line.

A model is a weighted interval ``[0, L]`` with density ``w(x)`` assembled from
segments. Its Neumann problem ``-(1/w)(w u')' = lam u`` is the radial sector
of the Laplacian on the corresponding warped product. The thick region is
the collar segment; its own Neumann spectrum is computed on the collar alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .geometry import DEFAULT_A, DEFAULT_EPSILON
from .numerics import NEUMANN, RadialOperator, richardson, sl_solve

LOWER_BOUND_THRESHOLD = 1.0 / 12.0
UPPER_BOUND_ADMISSIBLE = 1.0 / 96.0
DEFAULT_COLLAR = 96.0
MIN_SEGMENT_CELLS = 64


@dataclass(frozen=True)
class Segment:
    """One piece of a model: ``weight`` is given in local coordinates ``s in [0, length]``."""

    kind: str  # 'tube' | 'collar' | 'cusp'
    length: float
    weight: Callable[[np.ndarray], np.ndarray]
    slope: Callable[[np.ndarray], np.ndarray]
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def thin(self) -> bool:
        return self.kind != "collar"

    def closed_volume(self) -> float | None:
        p = self.params
        if self.kind == "tube":
            return math.pi * p["core_length"] * math.sinh(p["radius"]) ** 2
        if self.kind == "cusp":
            return 0.5 * p["area"] * (1.0 - math.exp(-2.0 * p["rho_max"]))
        return None


def tube_segment(core_length: float, radius: float | None = None, fill: float = 1.0, reverse: bool = False,
                 a: float = DEFAULT_A, epsilon: float = DEFAULT_EPSILON) -> Segment:
    """Radial tube density ``2 pi l sinh rho cosh rho``; reversed when the core is at the right end."""
    if radius is None:
        radius = math.acosh(fill * a * epsilon / core_length)
    ell, R = float(core_length), float(radius)
    c = 2 * math.pi * ell

    def rho(s):
        s = np.asarray(s, dtype=float)
        return R - s if reverse else s

    def w(s):
        r = rho(s)
        return c * np.sinh(r) * np.cosh(r)

    def dw(s):
        return (-1.0 if reverse else 1.0) * c * np.cosh(2 * rho(s))

    return Segment("tube", R, w, dw, {"core_length": ell, "radius": R, "reverse": reverse})


def cusp_segment(area: float, rho_max: float = 8.0, reverse: bool = False) -> Segment:
    """Horospherical density ``area * e^{-2 rho}``; the truncated end is a Neumann end."""
    if area <= 0 or rho_max <= 0:
        raise ValueError("cusp area and depth must be positive")
    A, L = float(area), float(rho_max)

    def depth(s):
        s = np.asarray(s, dtype=float)
        return L - s if reverse else s

    def w(s):
        return A * np.exp(-2.0 * depth(s))

    def dw(s):
        return (2.0 if reverse else -2.0) * w(s)

    return Segment("cusp", L, w, dw, {"area": A, "rho_max": L, "reverse": reverse})


def collar_segment(width: float, left: tuple[float, float], right: tuple[float, float]) -> Segment:
    """C^1 cubic Hermite density with prescribed (value, slope) at both ends."""
    (w0, s0), (w1, s1) = left, right
    W = float(width)

    def basis(s):
        t = np.asarray(s, dtype=float) / W
        return t, t * t, t * t * t

    def w(s):
        t, t2, t3 = basis(s)
        return ((2 * t3 - 3 * t2 + 1) * w0 + (t3 - 2 * t2 + t) * W * s0
                + (-2 * t3 + 3 * t2) * w1 + (t3 - t2) * W * s1)

    def dw(s):
        t, t2, _ = basis(s)
        return ((6 * t2 - 6 * t) * w0 + (3 * t2 - 4 * t + 1) * W * s0
                + (-6 * t2 + 6 * t) * w1 + (3 * t2 - 2 * t) * W * s1) / W

    return Segment("collar", W, w, dw, {"width": W, "left": [w0, s0], "right": [w1, s1]})


@dataclass
class RadialManifold:
    segments: list[Segment]
    collar_width: float = DEFAULT_COLLAR
    spec: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self):
        kinds = [s.kind for s in self.segments]
        if kinds.count("collar") != 1:
            raise ValueError("a model needs exactly one collar (thick) segment")
        self.offsets = np.concatenate([[0.0], np.cumsum([s.length for s in self.segments])])
        for i in range(len(self.segments) - 1):
            a = float(self.segments[i].weight(self.segments[i].length))
            b = float(self.segments[i + 1].weight(0.0))
            if abs(a - b) > 1e-9 * max(1.0, abs(a)):
                raise ValueError(f"weight jumps at junction {i} ({a:.12g} vs {b:.12g})")
        probe = self.edges(32)
        mids = 0.5 * (probe[:-1] + probe[1:])
        if np.any(self.weight(mids) <= 0):
            raise ValueError("weight must be positive inside the model")

    @property
    def length(self) -> float:
        return float(self.offsets[-1])

    @property
    def collar_index(self) -> int:
        return [s.kind for s in self.segments].index("collar")

    @property
    def collar_interval(self) -> tuple[float, float]:
        i = self.collar_index
        return float(self.offsets[i]), float(self.offsets[i + 1])

    def thin_junctions(self) -> list[float]:
        """Positions where the collar meets a thin segment."""
        i = self.collar_index
        out = []
        if i > 0:
            out.append(float(self.offsets[i]))
        if i < len(self.segments) - 1:
            out.append(float(self.offsets[i + 1]))
        return out

    def weight(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.offsets, x, side="right") - 1, 0, len(self.segments) - 1)
        out = np.empty_like(x)
        for i, seg in enumerate(self.segments):
            m = idx == i
            if np.any(m):
                out[m] = seg.weight(x[m] - self.offsets[i])
        return out

    def edges(self, per_unit: int, lo: float | None = None, hi: float | None = None) -> np.ndarray:
        """Piecewise-uniform grid with nodes at every junction and at unit distance inside the collar."""
        lo = 0.0 if lo is None else lo
        hi = self.length if hi is None else hi
        c0, c1 = self.collar_interval
        brk = {lo, hi, *[float(o) for o in self.offsets]}
        for j in self.thin_junctions():
            brk.update({j + 1.0, j - 1.0})
        pts = sorted(b for b in brk if lo - 1e-12 <= b <= hi + 1e-12)
        out = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            n = max(MIN_SEGMENT_CELLS // 8, int(math.ceil((b - a) * per_unit)))
            out.extend(np.linspace(a, b, n + 1)[1:])
        e = np.array(out)
        # each segment gets at least MIN_SEGMENT_CELLS cells
        for i in range(len(self.segments)):
            a, b = self.offsets[i], self.offsets[i + 1]
            if a < lo - 1e-12 or b > hi + 1e-12:
                continue
            k = int(np.count_nonzero((e > a + 1e-12) & (e <= b + 1e-12)))
            if k < MIN_SEGMENT_CELLS:
                return self.edges(int(math.ceil(per_unit * MIN_SEGMENT_CELLS / max(k, 1))) + 1, lo, hi)
        return e

    def volumes(self) -> dict[str, float]:
        from .numerics import gauss_legendre

        x, w = gauss_legendre(0.0, self.length, 16, self.offsets[1:-1])
        total = float(w @ self.weight(x))
        c0, c1 = self.collar_interval
        xc, wc = gauss_legendre(c0, c1, 16, np.linspace(c0, c1, 33)[1:-1])
        thick = float(wc @ self.weight(xc))
        thin_closed = sum(s.closed_volume() for s in self.segments if s.thin)
        return {"total": total, "thick": thick, "thin": total - thick, "thin_closed": thin_closed}

    def operator(self, lo: float | None = None, hi: float | None = None) -> RadialOperator:
        lo = 0.0 if lo is None else lo
        hi = self.length if hi is None else hi
        return RadialOperator(self.weight, lo, hi, None, NEUMANN, NEUMANN)

    def to_dict(self) -> dict[str, Any]:
        return {"segments": self.spec, "collar_width": self.collar_width, "length": self.length}


def assemble(segments: list[dict[str, Any]], collar_width: float = DEFAULT_COLLAR) -> RadialManifold:
    """Build a model from segment specs.

    Spec kinds: ``{"kind": "tube", "core_length", "radius" | "fill"}``,
    ``{"kind": "collar", "width"?, "end_value"?, "left_value"?, "right_value"?}``
    and ``{"kind": "cusp", "area", "rho_max"?}``. A tube after the collar is
    reversed (core at the far end), a cusp before it runs toward the left.
    The collar matches the values and slopes of its neighbours; a free collar
    end gets slope 0 and value ``end_value``.
    """
    kinds = [s.get("kind") for s in segments]
    if kinds.count("collar") != 1:
        raise ValueError("a model needs exactly one collar segment")
    ci = kinds.index("collar")
    built: list[Segment | None] = [None] * len(segments)
    for i, s in enumerate(segments):
        after = i > ci
        if s["kind"] == "tube":
            built[i] = tube_segment(s["core_length"], s.get("radius"), s.get("fill", 1.0), reverse=after)
        elif s["kind"] == "cusp":
            built[i] = cusp_segment(s["area"], s.get("rho_max", 8.0), reverse=not after)
        elif s["kind"] != "collar":
            raise ValueError(f"unknown segment kind {s['kind']!r}")
    c = segments[ci]
    width = float(c.get("width", collar_width))
    if width < 1:
        raise ValueError("collar width must be at least 1")
    end_value = c.get("end_value")

    def end(neighbour: Segment | None, at_start: bool, given: float | None):
        if neighbour is None:
            v = end_value if end_value is not None else 1.0
            return (float(given if given is not None else v), 0.0)
        s = 0.0 if at_start else neighbour.length
        v, d = float(neighbour.weight(s)), float(neighbour.slope(s))
        return (float(given) if given is not None else v, d)

    left = end(built[ci - 1] if ci > 0 else None, False, c.get("left_value"))
    right = end(built[ci + 1] if ci + 1 < len(segments) else None, True, c.get("right_value"))
    built[ci] = collar_segment(width, left, right)
    return RadialManifold(built, width, [dict(s) for s in segments])


@dataclass
class RadialSpectrumPair:
    full: np.ndarray
    full_err: np.ndarray
    thick: np.ndarray
    thick_err: np.ndarray
    cells: tuple[int, int]
    flags: list[str]

    def to_dict(self) -> dict[str, Any]:
        return {"lambda_M": self.full.tolist(), "lambda_M_err": self.full_err.tolist(),
                "lambda_thick": self.thick.tolist(), "lambda_thick_err": self.thick_err.tolist(),
                "cells": list(self.cells), "flags": list(self.flags)}


def _halve(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[:-1] + edges[1:])
    out = np.empty(2 * edges.size - 1)
    out[0::2], out[1::2] = edges, mids
    return out


def _pair(op: RadialOperator, edges: np.ndarray, k: int):
    coarse = sl_solve(op, edges, k)
    fine = sl_solve(op, _halve(edges), k)
    vals, errs = richardson(coarse.values, fine.values)
    vals[0], errs[0] = 0.0, 0.0
    return vals, errs, coarse, fine


def radial_spectrum(m: RadialManifold, k: int = 8, per_unit: int = 16) -> RadialSpectrumPair:
    """Lowest ``k`` Neumann eigenvalues of the model and of its collar, Richardson over (N, 2N)."""
    e_full = m.edges(per_unit)
    c0, c1 = m.collar_interval
    e_thick = e_full[(e_full >= c0 - 1e-12) & (e_full <= c1 + 1e-12)]
    full, ferr, *_ = _pair(m.operator(), e_full, k)
    thick, terr, *_ = _pair(m.operator(c0, c1), e_thick, k)
    flags = []
    for name, v, e in (("M", full, ferr), ("thick", thick, terr)):
        bad = [i for i in range(1, k) if e[i] > 1e-4 * abs(v[i])]
        if bad:
            flags.append(f"{name}: error bar above 1e-4 relative for k={bad}")
    return RadialSpectrumPair(full, ferr, thick, terr, (e_full.size - 1, 2 * (e_full.size - 1)), flags)


def verify_lower_bound(m: RadialManifold, k_max: int = 8, pair: RadialSpectrumPair | None = None) -> list[dict[str, Any]]:
    """Margins ``lambda_k(M) - min(lambda_k(thick)/3, 1/12)`` for every ``k`` with ``lambda_k(M) < 1/12``."""
    pair = pair or radial_spectrum(m, k_max + 1)
    rows = []
    for k in range(min(k_max + 1, pair.full.size)):
        lam = pair.full[k]
        if lam >= LOWER_BOUND_THRESHOLD:
            continue
        bound = min(pair.thick[k] / 3.0, LOWER_BOUND_THRESHOLD)
        err = pair.full_err[k] + pair.thick_err[k] / 3.0
        margin = lam - bound
        rows.append({"k": k, "lambda_M": lam, "lambda_thick": pair.thick[k], "bound": bound,
                     "margin": margin, "error_bar": err, "ok": margin >= -err})
    return rows


def _region_mass(sol, lo: float, hi: float) -> np.ndarray:
    """Per-eigenvector ``int f^2`` over cells whose centers lie in [lo, hi]."""
    x = sol.system.points
    sel = (x >= lo) & (x <= hi)
    return (sol.system.mass[sel, None] * sol.vectors[sel] ** 2).sum(axis=0)


def thick_mass_check(m: RadialManifold, f: np.ndarray | None = None, per_unit: int = 16,
                  k: int = 8, seed: int | None = None) -> list[dict[str, Any]]:
    """``int_thick f^2 - (1/3) int_M f^2`` for eigenfunctions (or random low-energy combinations).

    Without ``f`` every eigenfunction of the model with eigenvalue below
    ``1/12`` is tested; with ``seed`` a random combination of them is added.
    The Rayleigh hypothesis is re-verified on the grid function itself.
    """
    c0, c1 = m.collar_interval
    edges = m.edges(per_unit)
    rows = []
    for e in (edges, _halve(edges)):
        sol = sl_solve(m.operator(), e, k)
        low = sol.vectors[:, sol.values < LOWER_BOUND_THRESHOLD]
        cols = [low[:, i] for i in range(low.shape[1])]
        if seed is not None and low.shape[1] > 0:
            rng = np.random.default_rng(seed)
            cols.append(low @ rng.normal(size=low.shape[1]))
        if f is not None:
            cols = [np.asarray(f(sol.system.points), dtype=float)]
        out = []
        for u in cols:
            ray = float(sol.system.rayleigh(u[:, None])[0])
            tot = float(sol.system.sq_norm(u[:, None])[0])
            sel = (sol.system.points >= c0) & (sol.system.points <= c1)
            thick = float((sol.system.mass[sel] * u[sel] ** 2).sum())
            ok = ray < LOWER_BOUND_THRESHOLD
            out.append({"rayleigh": ray, "hypothesis_ok": ok, "margin": (thick - tot / 3.0) / tot if ok else None})
        rows.append(out)
    res = []
    for a, b in zip(*rows):
        r = dict(b)
        if a["margin"] is not None and b["margin"] is not None:
            r["margin"], r["error_bar"] = (float(x) for x in richardson(a["margin"], b["margin"]))
        res.append(r)
    return res


def strip_mass_check(m: RadialManifold, c: float = 32.0, per_unit: int = 16, k: int = 8) -> list[dict[str, Any]]:
    """``(1/c) int_thick f^2 - int_N f^2`` for collar eigenfunctions with ``lambda <= 1/(3c)``.

    ``N`` is the union of unit strips inside the collar at its thin junctions.
    """
    if m.collar_width < 3 * c:
        raise ValueError(f"collar width must be at least {3 * c}")
    c0, c1 = m.collar_interval
    edges = m.edges(per_unit, c0, c1)
    rows = []
    for e in (edges, _halve(edges)):
        sol = sl_solve(m.operator(c0, c1), e, k)
        tot = sol.system.sq_norm(sol.vectors)
        strip = np.zeros_like(tot)
        for j in m.thin_junctions():
            lo, hi = (j, j + 1.0) if abs(j - c0) < 1e-12 else (j - 1.0, j)
            strip += _region_mass(sol, lo, hi)
        rows.append((sol.values, (tot / c - strip) / tot))
    (v0, m0), (v1, m1) = rows
    out = []
    for i in range(v1.size):
        if v1[i] > 1.0 / (3 * c):
            continue
        val, err = richardson(m0[i], m1[i])
        out.append({"k": i, "lambda": float(v1[i]), "margin": float(val), "error_bar": float(err),
                    "ok": bool(val >= -1e-8 - err)})
    return out


def verify_upper_bound(models: list[RadialManifold], k_max: int = 8,
                pairs: list[RadialSpectrumPair] | None = None) -> dict[str, Any]:
    """Fit one ``q4`` with ``lambda_k(M)/lambda_k(thick) <= 3 + q4 log vol(M_thin)`` over a family."""
    from .fitting import fit_constant

    table = []
    needs = []
    groups = []
    for idx, m in enumerate(models):
        pair = pairs[idx] if pairs else radial_spectrum(m, k_max + 1)
        vol_thin = m.volumes()["thin_closed"]
        logv = math.log(vol_thin) if vol_thin > 0 else -math.inf
        for k in range(1, min(k_max + 1, pair.thick.size)):
            if pair.thick[k] >= UPPER_BOUND_ADMISSIBLE:
                continue
            ratio = pair.full[k] / pair.thick[k]
            table.append({"model": idx, "k": k, "lambda_M": pair.full[k], "lambda_thick": pair.thick[k],
                          "ratio": ratio, "log_vol_thin": logv})
            needs.append((ratio - 3.0, logv))
            groups.append(idx)
    if not needs:
        return {"q4": 0.0, "stability": 1.0, "rows": [], "binding": [], "ok": True}
    fit = fit_constant(needs, groups)
    for row in table:
        row["ok"] = row["ratio"] <= 3.0 + fit["constant"] * row["log_vol_thin"] + 1e-9
    return {"q4": fit["constant"], "stability": fit["stability"], "rows": table,
            "binding": fit["binding"], "ok": all(r["ok"] for r in table)}


def standard_family(n: int = 20) -> list[dict[str, Any]]:
    """Default 20 glued configurations: tube/collar, tube/collar/cusp, cusp/collar and collar/tube."""
    ells = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
    configs = []
    for i, ell in enumerate(ells):
        configs.append({"segments": [{"kind": "tube", "core_length": ell},
                                     {"kind": "collar", "end_value": 40.0}]})
        configs.append({"segments": [{"kind": "tube", "core_length": ell},
                                     {"kind": "collar", "width": 128.0},
                                     {"kind": "cusp", "area": 2.0 + i, "rho_max": 8.0}]})
        configs.append({"segments": [{"kind": "cusp", "area": 0.5 * (i + 1), "rho_max": 6.0 + i},
                                     {"kind": "collar", "width": 96.0},
                                     {"kind": "tube", "core_length": ell, "fill": 0.6}]})
        configs.append({"segments": [{"kind": "tube", "core_length": ell, "fill": 0.8},
                                     {"kind": "collar", "width": 112.0, "end_value": 10.0 * (i + 1)}]})
    return configs[:n]


def segment_spectrum(seg: Segment, k: int = 6, cells: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """Neumann spectrum of one segment on its own, Richardson over (cells, 2 cells)."""
    op = RadialOperator(seg.weight, 0.0, seg.length, None, NEUMANN, NEUMANN)
    vals, errs, *_ = _pair(op, np.linspace(0.0, seg.length, cells + 1), k)
    return vals, errs
