"""Numerical kernels: dense/tridiagonal symmetric eigensolvers, finite-volume
Sturm-Liouville discretization, fixed-step RK4 and Richardson extrapolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numba import njit
import scipy.linalg
from scipy.linalg import eigh_tridiagonal

NEUMANN = "neumann"
DIRICHLET = "dirichlet"
_BCS = (NEUMANN, DIRICHLET)


class EigenSolverError(RuntimeError):
    """Raised when an eigensolver fails; ``partial`` holds whatever converged."""

    def __init__(self, message: str, partial: np.ndarray | None = None):
        super().__init__(message)
        self.partial = partial
        self.valid = False


class BlowUpError(FloatingPointError):
    def __init__(self, t: float, message: str = ""):
        super().__init__(message or f"non-finite state at t={t:.6g}")
        self.t = t


@dataclass(frozen=True)
class SymTridiag:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float)
        e = np.asarray(self.offdiag, dtype=float)
        if d.ndim != 1 or e.ndim != 1 or e.size != max(d.size - 1, 0):
            raise ValueError("offdiag must have length len(diag) - 1")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("SymTridiag entries must be finite")
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        a = np.diag(self.diag)
        if self.n > 1:
            a += np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        return a

    def norm(self) -> float:
        """Cheap upper bound on the spectral norm (Gershgorin)."""
        if self.n == 0:
            return 0.0
        r = np.abs(self.diag).copy()
        r[:-1] += np.abs(self.offdiag)
        r[1:] += np.abs(self.offdiag)
        return float(r.max())


@dataclass(frozen=True)
class GridSpec:
    a: float
    b: float
    count: int = 1024
    placement: str = "cell"

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"grid interval must satisfy a < b, got [{self.a}, {self.b}]")
        if self.count < 8:
            raise ValueError("grid count must be >= 8")
        if self.placement not in ("cell", "node"):
            raise ValueError("placement must be 'cell' or 'node'")

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.count

    def edges(self) -> np.ndarray:
        return np.linspace(self.a, self.b, self.count + 1)

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.a, self.b, self.count * factor, self.placement)


@dataclass(frozen=True)
class RadialOperator:
    """-(1/w)(w u')' + V u on [a, b] with endpoint conditions."""

    weight: Callable[[np.ndarray], np.ndarray]
    a: float
    b: float
    potential: Callable[[np.ndarray], np.ndarray] | None = None
    left: str = NEUMANN
    right: str = NEUMANN

    def __post_init__(self):
        if self.left not in _BCS or self.right not in _BCS:
            raise ValueError(f"boundary conditions must be one of {_BCS}")
        if not self.a < self.b:
            raise ValueError("operator interval must satisfy a < b")

    def V(self, x: np.ndarray) -> np.ndarray:
        if self.potential is None:
            return np.zeros_like(x)
        return np.broadcast_to(np.asarray(self.potential(x), dtype=float), x.shape).copy()


@dataclass
class FVSystem:
    """Finite-volume data for K u = lambda M u, with K = G^T C G + boundary + V M."""

    points: np.ndarray
    mass: np.ndarray
    conductance: np.ndarray  # interior faces, length n - 1
    boundary: tuple[float, float]  # Dirichlet ghost terms on the first/last diagonal
    potential_mass: np.ndarray
    matrix: SymTridiag = field(init=False)

    def __post_init__(self):
        n = self.points.size
        k = self.potential_mass.copy()
        k[:-1] += self.conductance
        k[1:] += self.conductance
        k[0] += self.boundary[0]
        k[-1] += self.boundary[1]
        s = np.sqrt(self.mass)
        diag = k / self.mass
        off = -self.conductance / (s[:-1] * s[1:]) if n > 1 else np.empty(0)
        self.matrix = SymTridiag(diag, off)

    def energy(self, u: np.ndarray) -> np.ndarray:
        """Discrete Dirichlet form per column of ``u``, as a sum of nonnegative terms."""
        u = u.reshape(self.points.size, -1)
        du = np.diff(u, axis=0)
        e = (self.conductance[:, None] * du**2).sum(axis=0)
        e += self.boundary[0] * u[0] ** 2 + self.boundary[1] * u[-1] ** 2
        e += (self.potential_mass[:, None] * u**2).sum(axis=0)
        return e

    def sq_norm(self, u: np.ndarray) -> np.ndarray:
        u = u.reshape(self.points.size, -1)
        return (self.mass[:, None] * u**2).sum(axis=0)

    def rayleigh(self, u: np.ndarray) -> np.ndarray:
        return self.energy(u) / self.sq_norm(u)


def _control_volumes(edges: np.ndarray, placement: str, left: str, right: str):
    """Points, volume bounds and face positions for cell- or node-centered grids."""
    if placement == "cell":
        pts = 0.5 * (edges[:-1] + edges[1:])
        lo, hi = edges[:-1], edges[1:]
        faces = edges[1:-1]
        return pts, lo, hi, faces, (edges[0], edges[-1])
    # node-centered: Dirichlet endpoints are eliminated
    nodes = edges
    mid = 0.5 * (nodes[:-1] + nodes[1:])
    lo = np.concatenate([[nodes[0]], mid])
    hi = np.concatenate([mid, [nodes[-1]]])
    keep = np.ones(nodes.size, dtype=bool)
    if left == DIRICHLET:
        keep[0] = False
    if right == DIRICHLET:
        keep[-1] = False
    idx = np.flatnonzero(keep)
    return nodes[idx], lo[idx], hi[idx], mid[idx[0]: idx[-1]], (nodes[0], nodes[-1])


def fv_system(op: RadialOperator, edges: Sequence[float] | np.ndarray, placement: str = "cell") -> FVSystem:
    """Assemble the finite-volume system of ``op`` on the given edges (possibly nonuniform)."""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 3 or np.any(np.diff(edges) <= 0):
        raise ValueError("edges must be strictly increasing with at least two cells")
    if not (np.isclose(edges[0], op.a) and np.isclose(edges[-1], op.b)):
        raise ValueError("grid edges do not span the operator interval")
    pts, lo, hi, faces, (xa, xb) = _control_volumes(edges, placement, op.left, op.right)
    vol_mid = 0.5 * (lo + hi)
    w_mid = np.asarray(op.weight(vol_mid), dtype=float)
    w_face = np.asarray(op.weight(faces), dtype=float) if faces.size else np.empty(0)
    if np.any(~np.isfinite(w_mid)) or np.any(w_mid <= 0) or np.any(w_face <= 0):
        raise ValueError("weight must be positive at every quadrature node")
    mass = w_mid * (hi - lo)
    conductance = w_face / np.diff(pts)
    bl = br = 0.0
    if placement == "cell":
        # flux w u / (distance to the wall), the wall value being zero
        if op.left == DIRICHLET:
            bl = float(op.weight(np.array([xa]))[0]) / (pts[0] - xa)
        if op.right == DIRICHLET:
            br = float(op.weight(np.array([xb]))[0]) / (xb - pts[-1])
    else:
        if op.left == DIRICHLET:
            f = 0.5 * (xa + pts[0])
            bl = float(op.weight(np.array([f]))[0]) / (pts[0] - xa)
        if op.right == DIRICHLET:
            f = 0.5 * (xb + pts[-1])
            br = float(op.weight(np.array([f]))[0]) / (xb - pts[-1])
    V = op.V(pts)
    if not np.all(np.isfinite(V)):
        raise ValueError("potential must be finite on grid points")
    return FVSystem(pts, mass, conductance, (bl, br), V * mass)


def sl_discretize(op: RadialOperator, grid: GridSpec) -> SymTridiag:
    """Symmetric tridiagonal matrix whose eigenvalues approximate the spectrum of ``op``."""
    return fv_system(op, grid.edges(), grid.placement).matrix


def _check_symmetric(a: np.ndarray) -> None:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.abs(a).max(), 1e-300)
    if np.abs(a - a.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")


def symmetric_eigs(a: np.ndarray, k: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns) of a dense symmetric matrix."""
    a = np.asarray(a, dtype=float)
    _check_symmetric(a)
    n = a.shape[0]
    k = n if k is None else k
    if not 0 < k <= n:
        raise ValueError(f"k must be in 1..{n}")
    try:
        if k == n:
            w, v = np.linalg.eigh(0.5 * (a + a.T))
        else:
            w, v = scipy.linalg.eigh(0.5 * (a + a.T), subset_by_index=(0, k - 1))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenSolverError(str(exc)) from exc
    # infinity norm bounds the spectral norm of a symmetric matrix
    anorm = max(float(np.abs(a).sum(axis=1).max()), 1e-300)
    resid = np.linalg.norm(a @ v - v * w, axis=0)
    if np.any(resid > 1e-9 * anorm) or np.abs(v.T @ v - np.eye(k)).max() > 1e-9:
        raise EigenSolverError("eigenpair residual check failed", partial=w)
    return w, v


@njit(cache=True)
def _tql_values(d, e, max_iter):  # pragma: no cover - compiled
    # Implicit-shift QL on a symmetric tridiagonal matrix (eigenvalues only).
    n = d.size
    d = d.copy()
    ee = np.zeros(n)
    ee[: n - 1] = e
    status = 0
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(ee[m]) <= 2.2e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            if it == max_iter:
                status = l + 1
                return d, status
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * ee[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + ee[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f = s * ee[i]
                b = c * ee[i]
                r = np.hypot(f, g)
                ee[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    ee[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            ee[l] = g
            ee[m] = 0.0
    return d, status


def tridiag_eigs(t: SymTridiag, k: int | None = None, max_iter: int = 60) -> np.ndarray:
    """Smallest ``k`` eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL."""
    n = t.n
    k = n if k is None else k
    if not 0 < k <= n:
        raise ValueError(f"k must be in 1..{n}")
    if n == 1:
        return t.diag.copy()
    vals, status = _tql_values(t.diag, t.offdiag, max_iter)
    if status:
        raise EigenSolverError(
            f"QL did not converge for eigenvalue {status - 1} within {max_iter} iterations",
            partial=np.sort(vals[: status - 1]),
        )
    return np.sort(vals)[:k]


@dataclass
class SLSolution:
    values: np.ndarray
    vectors: np.ndarray  # mass-normalized grid functions, one column per eigenvalue
    system: FVSystem


def sl_solve(op: RadialOperator, edges: Sequence[float] | np.ndarray, k: int, placement: str = "cell") -> SLSolution:
    """Lowest ``k`` eigenpairs of ``op``.

    Eigenvectors come from LAPACK; each eigenvalue is then recomputed as the
    Rayleigh quotient of the energy form, which keeps tiny eigenvalues
    accurate in the relative sense.
    """
    sys_ = fv_system(op, edges, placement)
    n = sys_.points.size
    k = min(k, n)
    t = sys_.matrix
    _, v = eigh_tridiagonal(t.diag, t.offdiag, select="i", select_range=(0, k - 1))
    u = v / np.sqrt(sys_.mass)[:, None]
    vals = sys_.rayleigh(u)
    order = np.argsort(vals, kind="stable")
    u = u[:, order] / np.sqrt(sys_.sq_norm(u[:, order]))
    return SLSolution(vals[order], u, sys_)


def richardson(coarse, fine, order: int = 2):
    """Extrapolate a (h, h/2) pair; returns (value, error estimate)."""
    coarse = np.asarray(coarse, dtype=float)
    fine = np.asarray(fine, dtype=float)
    f = 2.0**order
    value = (f * fine - coarse) / (f - 1.0)
    err = np.abs(fine - coarse) / (f - 1.0)
    return value, err


def ode_rk4(f: Callable[[float, np.ndarray], np.ndarray], y0, interval: tuple[float, float], steps: int):
    """Classical fixed-step RK4; returns (t, Y) with Y[i] the state at t[i]."""
    if steps < 16:
        raise ValueError("steps must be >= 16")
    t0, t1 = map(float, interval)
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    h = (t1 - t0) / steps
    ts = t0 + h * np.arange(steps + 1)
    ys = np.empty((steps + 1, y.size))
    ys[0] = y
    for i in range(steps):
        t = ts[i]
        k1 = f(t, y)
        k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise BlowUpError(float(ts[i + 1]))
        ys[i + 1] = y
    return ts, ys


def gauss_legendre(a: float, b: float, n: int = 32, breaks: Sequence[float] = ()):
    """Composite Gauss-Legendre nodes/weights on [a, b], split at ``breaks``."""
    x, w = np.polynomial.legendre.leggauss(n)
    pts = sorted({a, b, *[c for c in breaks if a < c < b]})
    xs, ws = [], []
    for lo, hi in zip(pts[:-1], pts[1:]):
        xs.append(0.5 * (hi - lo) * x + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * w)
    return np.concatenate(xs), np.concatenate(ws)
