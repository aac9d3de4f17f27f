"""Pure geometric primitives: ULA element displacements, direction vectors,
angle/distance extraction from Cartesian positions, and rigid horizontal
motion.

All positions are 3D Cartesian in meters, all angles are radians.  Azimuth
is measured in the x-y plane from the +x axis and wrapped into (-pi, pi];
elevation is measured from the horizontal plane into [-pi/2, pi/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError

Vec3 = np.ndarray  # shape (3,), float64


def vec3(x: float, y: float, z: float) -> Vec3:
    return np.array([x, y, z], dtype=float)


def wrap_azimuth(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    a = math.fmod(angle, 2.0 * math.pi)
    if a > math.pi:
        a -= 2.0 * math.pi
    elif a <= -math.pi:
        a += 2.0 * math.pi
    return a


@dataclass(frozen=True)
class AnglePair:
    """Azimuth/elevation pair, azimuth in (-pi, pi], elevation in
    [-pi/2, pi/2]."""

    azimuth: float
    elevation: float

    def __post_init__(self):
        object.__setattr__(self, "azimuth", wrap_azimuth(self.azimuth))
        if not -math.pi / 2 <= self.elevation <= math.pi / 2:
            raise ValueError(
                f"elevation {self.elevation} outside [-pi/2, pi/2]")


@dataclass(frozen=True)
class MotionState:
    """Horizontal constant-velocity motion: speed in m/s, heading in
    radians from the +x axis.  The velocity vector always has a zero
    z-component."""

    speed: float = 0.0
    heading: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError("speed must be >= 0")

    @property
    def velocity(self) -> Vec3:
        return self.speed * np.array(
            [math.cos(self.heading), math.sin(self.heading), 0.0])


@dataclass(frozen=True)
class UlaConfig:
    """Uniform linear array: element count, element spacing in meters,
    azimuth/elevation orientation of the array axis, and phase-center
    position."""

    element_count: int
    spacing: float
    azimuth_orientation: float = 0.0
    elevation_orientation: float = 0.0
    phase_center: Vec3 = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        if self.element_count < 1:
            raise ValueError("element_count must be >= 1")
        if self.spacing <= 0:
            raise ValueError("spacing must be > 0")
        object.__setattr__(
            self, "phase_center", np.asarray(self.phase_center, dtype=float))

    @property
    def axis(self) -> Vec3:
        """Unit vector along the array axis."""
        cphi = math.cos(self.elevation_orientation)
        return np.array([
            cphi * math.cos(self.azimuth_orientation),
            cphi * math.sin(self.azimuth_orientation),
            math.sin(self.elevation_orientation),
        ])

    def displacements(self) -> np.ndarray:
        """Displacements of all elements from the phase center,
        shape (element_count, 3)."""
        coeff = (self.element_count - 2 * np.arange(
            1, self.element_count + 1) + 1) / 2.0
        return coeff[:, None] * self.spacing * self.axis[None, :]


def element_displacement(ula: UlaConfig, index: int) -> Vec3:
    """Displacement vector from the ULA phase center to the element with
    1-based ``index``.

    The displacement is ((M - 2*index + 1)/2) * spacing along the array
    axis; summed over all elements the displacements cancel (centered
    array).
    """
    if not 1 <= index <= ula.element_count:
        raise ValueError(
            f"element index {index} out of range 1..{ula.element_count}")
    coeff = (ula.element_count - 2 * index + 1) / 2.0
    return coeff * ula.spacing * ula.axis


def unit_direction(angles: AnglePair) -> Vec3:
    """Unit direction vector [cos(el)cos(az), cos(el)sin(az), sin(el)]."""
    cb = math.cos(angles.elevation)
    return np.array([
        cb * math.cos(angles.azimuth),
        cb * math.sin(angles.azimuth),
        math.sin(angles.elevation),
    ])


def angles_and_distance(from_: Vec3, to: Vec3) -> tuple[AnglePair, float]:
    """Extract (azimuth, elevation) and distance of ``to`` as seen from
    ``from_``.

    Inverse of :func:`unit_direction` scaled by distance.  A point
    directly above/below maps to azimuth 0 and elevation +-pi/2 by
    convention.
    """
    d = np.asarray(to, dtype=float) - np.asarray(from_, dtype=float)
    dist = float(np.linalg.norm(d))
    if dist == 0.0:
        raise DegenerateGeometryError(
            "cannot extract angles between coincident points")
    horiz = math.hypot(d[0], d[1])
    if horiz == 0.0:
        azimuth = 0.0
        elevation = math.copysign(math.pi / 2, d[2])
    else:
        azimuth = math.atan2(d[1], d[0])
        elevation = math.atan2(d[2], horiz)
    return AnglePair(azimuth, elevation), dist


def propagate(position0: Vec3, motion: MotionState, t: float) -> Vec3:
    """Position after moving for ``t`` seconds at constant horizontal
    velocity."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return np.asarray(position0, dtype=float) + t * motion.velocity
