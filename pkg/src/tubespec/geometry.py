"""Closed-form geometry of Margulis tubes, cusps, flat boundary tori and shells."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any

import numpy as np

DEFAULT_A = 4.0
DEFAULT_NU = 2.0
DEFAULT_EPSILON = 0.1


def _default_constants(a: float = DEFAULT_A, epsilon: float = DEFAULT_EPSILON) -> dict[str, float]:
    return {
        "q1": math.log(math.pi * a * epsilon),
        "q2": 1.0,
        "q3": 1.0,
        "q4": 1.0,
        "a": a,
        "nu": DEFAULT_NU,
        "c2": 1.0,
    }


@dataclass(frozen=True)
class ManifoldParams:
    """Dimension, pinching bound, Margulis constant and the named positive constants.

    ``q1`` defaults to ``log(pi * a * epsilon)``; it may be nonpositive for small
    ``a * epsilon`` so it is exempt from the positivity check.
    """

    n: int = 3
    b: float = 1.0
    epsilon: float = DEFAULT_EPSILON
    constants: dict[str, float] = field(default_factory=_default_constants)
    min_radius: float = 3.0

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("dimension n must be >= 3")
        if self.b < 1:
            raise ValueError("pinching bound b must be >= 1")
        if self.epsilon <= 0:
            raise ValueError("Margulis constant must be positive")
        merged = _default_constants(self.constants.get("a", DEFAULT_A), self.epsilon)
        merged.update(self.constants)
        for name, value in merged.items():
            if name != "q1" and not value > 0:
                raise ValueError(f"constant {name} must be positive, got {value}")
        object.__setattr__(self, "constants", merged)

    @property
    def a(self) -> float:
        return self.constants["a"]

    @property
    def nu(self) -> float:
        return self.constants["nu"]

    @property
    def q1(self) -> float:
        return self.constants["q1"]

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "ManifoldParams":
        return cls(**{f.name: d[f.name] for f in fields(cls) if f.name in d})


@dataclass(frozen=True)
class TorusLattice:
    """Flat torus R^2 / L with L generated by the rows of ``basis``."""

    basis: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.shape != (2, 2) or not np.all(np.isfinite(b)):
            raise ValueError("basis must be two finite 2-vectors")
        object.__setattr__(self, "basis", tuple(map(tuple, b.tolist())))
        if not self.area > 0:
            raise ValueError("lattice basis is degenerate")

    @property
    def matrix(self) -> np.ndarray:
        return np.asarray(self.basis, dtype=float)

    @property
    def area(self) -> float:
        return abs(float(np.linalg.det(self.matrix)))

    @property
    def dual(self) -> np.ndarray:
        """Rows are the dual basis: <dual_i, basis_j> = delta_ij."""
        return np.linalg.inv(self.matrix).T

    def dual_vector(self, m: int, k: int) -> np.ndarray:
        return m * self.dual[0] + k * self.dual[1]

    def reduced_basis(self) -> np.ndarray:
        """Lagrange-Gauss reduced basis; its first row is a shortest nonzero vector."""
        u, v = self.matrix[0].copy(), self.matrix[1].copy()
        if u @ u > v @ v:
            u, v = v, u
        while True:
            mu = round(float(u @ v) / float(u @ u))
            v = v - mu * u
            if v @ v >= u @ u:
                return np.array([u, v])
            u, v = v, u

    def shortest_vector(self) -> float:
        return float(np.linalg.norm(self.reduced_basis()[0]))

    @property
    def injectivity_radius(self) -> float:
        return 0.5 * self.shortest_vector()

    def to_dict(self) -> dict[str, Any]:
        return {"basis": [list(v) for v in self.basis]}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TorusLattice":
        return cls(tuple(map(tuple, d["basis"])))

    @classmethod
    def rectangle(cls, width: float, height: float) -> "TorusLattice":
        return cls(((width, 0.0), (0.0, height)))


@dataclass(frozen=True)
class MargulisTube:
    """Hyperbolic solid torus around a core geodesic of length ``core_length``.

    Metric ``d rho^2 + cosh^2 rho ds^2 + sinh^2 rho d sigma^2`` on
    ``rho <= radius``; the deck generator is ``(sigma, s) -> (sigma + twist, s + core_length)``.
    """

    core_length: float
    radius: float
    twist: float = 0.0
    params: ManifoldParams = field(default_factory=ManifoldParams)
    n: int = 3

    def __post_init__(self):
        ell, R, p = self.core_length, self.radius, self.params
        if not (ell > 0 and R > 0):
            raise ValueError("core length and radius must be positive")
        if ell >= 2 * p.epsilon:
            raise ValueError(f"core length {ell} must be < 2*epsilon = {2 * p.epsilon}")
        if ell * math.cosh(R) > p.a * p.epsilon * (1 + 1e-12):
            raise ValueError(f"tube violates l*cosh(R) <= a*epsilon ({ell * math.cosh(R):.6g} > {p.a * p.epsilon:.6g})")
        if R < min_radius_bound(ell, p) - 1e-9:
            raise ValueError("tube radius below -log(l) - nu")
        if self.n != 3:
            raise ValueError("spectral tube model is three-dimensional")

    @classmethod
    def from_core_length(cls, ell: float, params: ManifoldParams | None = None, twist: float = 0.0,
                         fill: float = 1.0) -> "MargulisTube":
        """Tube with ``l cosh R = fill * a * epsilon`` (``fill = 1`` is the extremal radius)."""
        params = params or ManifoldParams()
        if not (ell > 0 and fill > 0) or fill * params.a * params.epsilon / ell <= 1.0:
            raise ValueError(f"no tube radius solves l cosh R = {fill} * a * epsilon for l = {ell}")
        R = math.acosh(fill * params.a * params.epsilon / ell)
        return cls(ell, R, twist, params)

    @property
    def boundary_lattice(self) -> TorusLattice:
        R, ell = self.radius, self.core_length
        return TorusLattice(((2 * math.pi * math.sinh(R), 0.0), (self.twist * math.sinh(R), ell * math.cosh(R))))

    def to_dict(self) -> dict[str, Any]:
        return {"core_length": self.core_length, "radius": self.radius, "twist": self.twist,
                "params": self.params.to_dict(), "n": self.n}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MargulisTube":
        params = ManifoldParams.from_dict(d["params"]) if "params" in d else ManifoldParams()
        return cls(d["core_length"], d["radius"], d.get("twist", 0.0), params, d.get("n", 3))


@dataclass(frozen=True)
class CuspModel:
    """Cusp ``N x [0, rho_max]`` with boundary torus ``N`` at ``rho = 0`` and area density ``e^{-2 rho}``."""

    cross_section: TorusLattice
    rho_max: float = 8.0

    def __post_init__(self):
        if self.rho_max < 5:
            raise ValueError("cusp truncation rho_max must be >= 5")

    @property
    def volume(self) -> float:
        return 0.5 * self.cross_section.area * (1.0 - math.exp(-2.0 * self.rho_max))

    def to_dict(self) -> dict[str, Any]:
        return {"cross_section": self.cross_section.to_dict(), "rho_max": self.rho_max}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CuspModel":
        return cls(TorusLattice.from_dict(d["cross_section"]), d.get("rho_max", 8.0))


@dataclass(frozen=True)
class Shell:
    """Shell ``V x [0, k]`` whose slice ``V x {t}`` has area ``base_area * growth(t)``.

    For ``geometry='tube'`` the shell occupies ``rho in [R_outer - k, R_outer]``
    of a hyperbolic tube; for ``'cusp'`` it is a horospherical shell whose
    slices grow like ``e^{2t}`` towards the cusp boundary.
    """

    base_area: float
    height: float
    geometry: str = "cusp"
    R_outer: float | None = None

    def __post_init__(self):
        if self.base_area <= 0:
            raise ValueError("base area must be positive")
        if self.height < 2:
            raise ValueError("shell height must be >= 2")
        if self.geometry not in ("tube", "cusp"):
            raise ValueError("geometry must be 'tube' or 'cusp'")
        if self.geometry == "tube" and (self.R_outer is None or self.R_outer - self.height <= 0):
            raise ValueError("tube shells need R_outer > height")

    def area(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.geometry == "cusp":
            return self.base_area * np.exp(2.0 * t)
        r0 = self.R_outer - self.height
        r = r0 + t
        return self.base_area * (np.sinh(r) * np.cosh(r)) / (math.sinh(r0) * math.cosh(r0))

    def growth_rate(self, t: np.ndarray) -> np.ndarray:
        """Logarithmic derivative ``c(t)`` of the slice area."""
        t = np.asarray(t, dtype=float)
        if self.geometry == "cusp":
            return np.full_like(t, 2.0)
        r = self.R_outer - self.height + t
        return (np.cosh(r) ** 2 + np.sinh(r) ** 2) / (np.sinh(r) * np.cosh(r))

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Shell":
        return cls(**d)


def tube_boundary_volume(t: MargulisTube) -> float:
    return 2.0 * math.pi * t.core_length * math.sinh(t.radius) * math.cosh(t.radius)


def tube_volume(t: MargulisTube) -> float:
    return math.pi * t.core_length * math.sinh(t.radius) ** 2


def radius_lower_bound(boundary_area: float, params: ManifoldParams) -> float:
    if boundary_area <= 0:
        raise ValueError("boundary area must be positive")
    return math.log(boundary_area) - params.q1


def min_radius_bound(ell: float, params: ManifoldParams) -> float:
    if not 0 < ell < 2 * params.epsilon:
        raise ValueError("core length must lie in (0, 2*epsilon)")
    return -math.log(ell) - params.nu


def essential_spectrum_floor(n: int) -> float:
    if n < 3:
        raise ValueError("n must be >= 3")
    return (n - 1) ** 2 / 4.0


def eigenvalue_threshold(n: int) -> float:
    if n < 3:
        raise ValueError("n must be >= 3")
    return (n - 2) ** 2 / 12.0


def extension_theta(t: MargulisTube) -> float:
    """Inner cutoff radius of the boundary-function extension."""
    return t.radius - math.log(tube_boundary_volume(t)) + t.params.q1 + 1.0
