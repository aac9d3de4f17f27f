import math

import numpy as np
import pytest

from isacsim.errors import DegenerateGeometryError
from isacsim.geometry import (AnglePair, MotionState, UlaConfig,
                              angles_and_distance, element_displacement,
                              propagate, unit_direction, wrap_azimuth)


def test_wrap_azimuth():
    assert wrap_azimuth(0.0) == 0.0
    assert wrap_azimuth(math.pi) == pytest.approx(math.pi)
    assert wrap_azimuth(-math.pi) == pytest.approx(math.pi)
    assert wrap_azimuth(3 * math.pi) == pytest.approx(math.pi)
    assert wrap_azimuth(2 * math.pi + 0.1) == pytest.approx(0.1)
    assert wrap_azimuth(-0.3) == pytest.approx(-0.3)


def test_angle_pair_validation():
    a = AnglePair(azimuth=7.0, elevation=0.2)
    assert -math.pi < a.azimuth <= math.pi
    with pytest.raises(ValueError):
        AnglePair(azimuth=0.0, elevation=2.0)


def test_motion_velocity():
    m = MotionState(speed=3.0, heading=math.pi / 2)
    np.testing.assert_allclose(m.velocity, [0.0, 3.0, 0.0], atol=1e-12)
    assert MotionState().velocity @ MotionState().velocity == 0.0
    with pytest.raises(ValueError):
        MotionState(speed=-1.0)


def test_element_displacement_scalar_oracle():
    # Independent scalar expansion: offset of element i along the array
    # axis is ((M - 2i + 1)/2) * delta * [cos(phi)cos(psi),
    # cos(phi)sin(psi), sin(phi)].
    delta = 0.005357
    psi, phi = math.pi / 3, math.pi / 4
    ula = UlaConfig(element_count=4, spacing=delta,
                    azimuth_orientation=psi, elevation_orientation=phi)
    coeff = (4 - 2 * 2 + 1) / 2.0  # index 2 -> +1/2
    expected = coeff * delta * np.array([
        math.cos(phi) * math.cos(psi),
        math.cos(phi) * math.sin(psi),
        math.sin(phi)])
    np.testing.assert_allclose(
        element_displacement(ula, 2), expected, rtol=0, atol=1e-15)


def test_element_displacements_centered():
    ula = UlaConfig(element_count=5, spacing=0.01,
                    azimuth_orientation=0.7, elevation_orientation=-0.2)
    d = np.array([element_displacement(ula, i) for i in range(1, 6)])
    np.testing.assert_allclose(d.sum(axis=0), np.zeros(3), atol=1e-15)
    np.testing.assert_allclose(d, ula.displacements(), atol=0)
    # adjacent spacing is exactly delta
    gaps = np.linalg.norm(np.diff(d, axis=0), axis=1)
    np.testing.assert_allclose(gaps, 0.01, rtol=1e-12)


def test_element_displacement_index_range():
    ula = UlaConfig(element_count=3, spacing=0.01)
    with pytest.raises(ValueError):
        element_displacement(ula, 0)
    with pytest.raises(ValueError):
        element_displacement(ula, 4)


def test_unit_direction_roundtrip():
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = rng.uniform(-100, 100, 3)
        q = rng.uniform(-100, 100, 3)
        angles, dist = angles_and_distance(p, q)
        np.testing.assert_allclose(
            p + dist * unit_direction(angles), q, atol=1e-9)
        assert np.linalg.norm(unit_direction(angles)) == pytest.approx(1.0)


def test_angles_vertical_convention():
    up, d = angles_and_distance(np.zeros(3), np.array([0.0, 0.0, 7.0]))
    assert up.azimuth == 0.0
    assert up.elevation == pytest.approx(math.pi / 2)
    assert d == pytest.approx(7.0)
    down, _ = angles_and_distance(np.zeros(3), np.array([0.0, 0.0, -1.0]))
    assert down.elevation == pytest.approx(-math.pi / 2)


def test_angles_coincident_raises():
    p = np.array([1.0, 2.0, 3.0])
    with pytest.raises(DegenerateGeometryError):
        angles_and_distance(p, p.copy())


def test_propagate():
    m = MotionState(speed=2.0, heading=0.0)
    np.testing.assert_allclose(
        propagate(np.array([1.0, 1.0, 5.0]), m, 3.0), [7.0, 1.0, 5.0])
    with pytest.raises(ValueError):
        propagate(np.zeros(3), m, -1.0)
    # motion never changes z
    m2 = MotionState(speed=9.0, heading=2.1)
    assert propagate(np.array([0.0, 0.0, 4.0]), m2, 10.0)[2] == 4.0
