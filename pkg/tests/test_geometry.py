import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tubespec.geometry import (
    CuspModel, ManifoldParams, MargulisTube, Shell, TorusLattice, essential_spectrum_floor, extension_theta,
    eigenvalue_threshold, tube_boundary_volume, tube_volume,
)


def test_default_params_and_roundtrip():
    p = ManifoldParams()
    assert p.n == 3 and p.a * p.epsilon == pytest.approx(0.4)
    assert ManifoldParams.from_dict(p.to_dict()) == p


@pytest.mark.parametrize("bad", [{"n": 2}, {"b": 0.5}, {"epsilon": 0.0}, {"constants": {"q2": -1.0}}])
def test_params_rejected(bad):
    with pytest.raises(ValueError):
        ManifoldParams(**bad)


def test_extremal_tube_saturates_radius_condition():
    t = MargulisTube.from_core_length(1e-4)
    assert t.core_length * math.cosh(t.radius) == pytest.approx(0.4, rel=1e-12)
    assert MargulisTube.from_dict(t.to_dict()) == t


def test_tube_constraints():
    with pytest.raises(ValueError):
        MargulisTube(0.3, 1.0)  # core too long
    with pytest.raises(ValueError):
        MargulisTube(1e-3, 8.0)  # l cosh R too large
    with pytest.raises(ValueError):
        MargulisTube(1e-3, 1.0)  # radius below -log l - nu
    with pytest.raises(ValueError):
        MargulisTube.from_core_length(0.5)


def test_tube_volumes_are_consistent():
    t = MargulisTube.from_core_length(1e-3)
    # d vol / dR = boundary area
    h = 1e-6
    t2 = MargulisTube(t.core_length, t.radius - h)
    assert (tube_volume(t) - tube_volume(t2)) / h == pytest.approx(tube_boundary_volume(t), rel=1e-5)
    assert t.boundary_lattice.area == pytest.approx(tube_boundary_volume(t), rel=1e-12)


def test_extension_theta_value():
    t = MargulisTube.from_core_length(1e-4)
    assert t.radius - extension_theta(t) >= 3


def test_square_lattice_basics():
    lat = TorusLattice.rectangle(2.0, 3.0)
    assert lat.area == 6.0 and lat.shortest_vector() == 2.0 and lat.injectivity_radius == 1.0
    assert np.allclose(lat.dual @ lat.matrix.T, np.eye(2))
    with pytest.raises(ValueError):
        TorusLattice(((1.0, 0.0), (2.0, 0.0)))


@given(st.floats(0.1, 5), st.floats(-3, 3), st.floats(0.1, 5), st.integers(-4, 4))
def test_reduced_basis_is_shortest(a, x, y, shear):
    lat = TorusLattice(((a, 0.0), (x + shear * a, y)))
    r = lat.reduced_basis()
    assert abs(abs(np.linalg.det(r)) - lat.area) <= 1e-9 * lat.area
    best = min(np.linalg.norm(i * lat.matrix[0] + j * lat.matrix[1])
               for i in range(-12, 13) for j in range(-12, 13) if (i, j) != (0, 0))
    assert lat.shortest_vector() <= best * (1 + 1e-12)


def test_cusp_and_shell_models():
    c = CuspModel(TorusLattice.rectangle(1.0, 2.0))
    assert c.volume == pytest.approx(1.0 * (1 - math.exp(-16)))
    with pytest.raises(ValueError):
        CuspModel(TorusLattice.rectangle(1.0, 1.0), 4.0)
    sh = Shell(1.5, 3.0)
    assert sh.area(1.0) == pytest.approx(1.5 * math.e**2)
    assert Shell.from_dict(sh.to_dict()) == sh
    with pytest.raises(ValueError):
        Shell(1.0, 3.0, "tube", 2.0)


def test_thresholds():
    assert essential_spectrum_floor(3) == 1.0
    assert eigenvalue_threshold(3) == pytest.approx(1 / 12)
