"""Simulation scenario: carrier, node layout, target/cluster sets, RCS
registry, RNG seeding, validation, and the JSON config boundary.

Internally everything is SI (meters, seconds, radians).  The JSON scenario
file uses degrees for angles; the loader converts.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ScenarioConfigError, UnknownRcsTypeError
from .geometry import MotionState, UlaConfig, Vec3

# Propagation speed used throughout; kept at the round value the model
# formulas were published with, overridable per scenario.
DEFAULT_SPEED_OF_LIGHT = 3.0e8

SENSING_TARGET = "sensing_target"
COMM_CLUSTER = "comm_cluster"

# Typical radar cross sections in m^2.
DEFAULT_RCS_TABLE: dict[str, float] = {
    "automobile": 100.0,
    "pickup_truck": 200.0,
    "adult": 1.0,
    "bird": 0.01,
    "insect": 1e-5,
    "missile": 0.5,
    "jumbo_jet_airliner": 100.0,
    "large_bomber": 40.0,
    "small_fighter_aircraft": 2.0,
}


@dataclass(frozen=True)
class CarrierConfig:
    """Carrier frequency, per-cluster ray count, and propagation speed."""

    frequency: float
    ray_count: int
    speed_of_light: float = DEFAULT_SPEED_OF_LIGHT

    def __post_init__(self):
        if self.frequency <= 0:
            raise ScenarioConfigError("carrier frequency must be > 0")
        if self.ray_count < 1:
            raise ScenarioConfigError("ray_count must be >= 1")
        if self.speed_of_light <= 0:
            raise ScenarioConfigError("speed_of_light must be > 0")

    @property
    def wavelength(self) -> float:
        return self.speed_of_light / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class RcsRegistry:
    """Lookup table target-type-name -> RCS in m^2, with overrides."""

    overrides: dict[str, float] = field(default_factory=dict)

    def lookup(self, type_name: str) -> float:
        key = type_name.strip().lower().replace(" ", "_")
        if key in self.overrides:
            return self.overrides[key]
        if key in DEFAULT_RCS_TABLE:
            return DEFAULT_RCS_TABLE[key]
        raise UnknownRcsTypeError(type_name)


def lookup_rcs(registry: RcsRegistry, type_name: str) -> float:
    return registry.lookup(type_name)


@dataclass(frozen=True)
class Scatterer:
    """A sensing target and/or communication cluster.

    A shared cluster is a single Scatterer carrying both roles; both
    channels then read the identical centroid geometry.
    """

    id: str
    position: Vec3
    motion: MotionState = MotionState()
    rcs: float | None = None
    cluster_power_weight: float | None = None
    ray_extent: float | None = None
    roles: frozenset[str] = frozenset({SENSING_TARGET})

    def __post_init__(self):
        object.__setattr__(
            self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "roles", frozenset(self.roles))
        bad = self.roles - {SENSING_TARGET, COMM_CLUSTER}
        if bad or not self.roles:
            raise ScenarioConfigError(f"invalid roles for {self.id!r}: {bad}")

    @property
    def is_static(self) -> bool:
        return self.motion.speed == 0.0

    @property
    def is_shared(self) -> bool:
        return SENSING_TARGET in self.roles and COMM_CLUSTER in self.roles


class SensingMode(str, Enum):
    MONOSTATIC = "monostatic"
    BISTATIC = "bistatic"


@dataclass(frozen=True)
class NodeLayout:
    """BS transmit array, echo receive array, mobile communication
    receiver array with its motion, and the terminal RCS."""

    bs_tx: UlaConfig
    echo_rx: UlaConfig
    comm_rx: UlaConfig
    comm_rx_motion: MotionState
    terminal_rcs: float


@dataclass(frozen=True)
class Scenario:
    carrier: CarrierConfig
    nodes: NodeLayout
    sensing_mode: SensingMode
    scatterers: tuple[Scatterer, ...]
    rcs_registry: RcsRegistry = RcsRegistry()
    seed: int = 0
    normalize_cluster_powers: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(self.scatterers))

    # -- role / mobility partitions ------------------------------------

    @property
    def sensing_targets(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.scatterers if SENSING_TARGET in s.roles)

    @property
    def comm_clusters(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.scatterers if COMM_CLUSTER in s.roles)

    @property
    def static_targets(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.sensing_targets if s.is_static)

    @property
    def mobile_targets(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.sensing_targets if not s.is_static)

    @property
    def static_clusters(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.comm_clusters if s.is_static)

    @property
    def mobile_clusters(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.comm_clusters if not s.is_static)

    @property
    def shared_clusters(self) -> tuple[Scatterer, ...]:
        return tuple(s for s in self.scatterers if s.is_shared)

    def cluster_power(self, scatterer: Scatterer) -> float:
        """Power of one NLoS cluster; weights are normalized to sum to 1
        across all communication clusters unless disabled."""
        if scatterer.cluster_power_weight is None:
            raise ScenarioConfigError(
                f"cluster {scatterer.id!r} has no power weight")
        if not self.normalize_cluster_powers:
            return scatterer.cluster_power_weight
        total = sum(s.cluster_power_weight or 0.0 for s in self.comm_clusters)
        if total <= 0:
            return 0.0
        return scatterer.cluster_power_weight / total

    def find_scatterer(self, scatterer_id: str) -> Scatterer:
        for s in self.scatterers:
            if s.id == scatterer_id:
                return s
        raise KeyError(scatterer_id)


# ---------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------

def validate(scenario: Scenario) -> list[str]:
    """Check all scenario invariants; returns a list of violation codes
    (empty iff valid)."""
    v: list[str] = []
    nodes = scenario.nodes

    if nodes.bs_tx.phase_center[2] <= 0:
        v.append("nonpositive-height")
    if not np.array_equal(nodes.bs_tx.phase_center[:2], [0.0, 0.0]):
        v.append("bs-off-origin")
    # Coordinate frame: the comm receiver starts on the +x axis.
    crx = nodes.comm_rx.phase_center
    if crx[0] <= 0 or crx[1] != 0.0 or crx[2] != 0.0:
        v.append("comm-rx-off-axis")
    if nodes.terminal_rcs <= 0:
        v.append("bad-terminal-rcs")

    if scenario.sensing_mode is SensingMode.MONOSTATIC:
        tx, rx = nodes.bs_tx, nodes.echo_rx
        if not np.array_equal(tx.phase_center, rx.phase_center):
            v.append("monostatic-position-mismatch")
        if (rx.element_count != tx.element_count
                or rx.spacing != tx.spacing
                or rx.azimuth_orientation != tx.azimuth_orientation
                or rx.elevation_orientation != tx.elevation_orientation):
            v.append("monostatic-array-mismatch")

    seen: set[str] = set()
    for s in scenario.scatterers:
        if s.id in seen:
            v.append(f"duplicate-scatterer-id:{s.id}")
        seen.add(s.id)
        if SENSING_TARGET in s.roles and (s.rcs is None or s.rcs <= 0):
            v.append(f"missing-rcs:{s.id}")
        if COMM_CLUSTER in s.roles:
            if s.cluster_power_weight is None or s.cluster_power_weight < 0:
                v.append(f"missing-cluster-power:{s.id}")
            if s.ray_extent is None or s.ray_extent < 0:
                v.append(f"missing-ray-extent:{s.id}")

    for name, sigma in scenario.rcs_registry.overrides.items():
        if sigma <= 0:
            v.append(f"bad-rcs-value:{name}")

    return v


# ---------------------------------------------------------------------
# Seeded randomness
# ---------------------------------------------------------------------

def derive_rng(root_seed: int, *tags) -> np.random.Generator:
    """Independent RNG stream keyed by (root seed, tags) via stable
    hashing, so results do not depend on iteration order."""
    key = "|".join([str(root_seed)] + [str(t) for t in tags])
    digest = hashlib.blake2b(key.encode(), digest_size=16).digest()
    return np.random.default_rng(int.from_bytes(digest, "little"))


def realize_rays(scatterer: Scatterer, carrier: CarrierConfig,
                 rng_seed: int) -> np.ndarray:
    """Draw the fixed sub-scatterer positions of one cluster: ray_count
    points uniform in the ball of radius ray_extent around the cluster's
    initial position, deterministic in (rng_seed, scatterer id).

    Returns shape (ray_count, 3).  The points co-move rigidly with the
    cluster, so callers should treat (point - centroid) as a constant
    offset.
    """
    if COMM_CLUSTER not in scatterer.roles:
        raise ScenarioConfigError(
            f"scatterer {scatterer.id!r} is not a communication cluster")
    if scatterer.ray_extent is None:
        raise ScenarioConfigError(
            f"cluster {scatterer.id!r} has no ray_extent")
    count = carrier.ray_count
    if scatterer.ray_extent == 0.0:
        return np.tile(scatterer.position, (count, 1))
    rng = derive_rng(rng_seed, scatterer.id, "rays")
    directions = rng.standard_normal((count, 3))
    norms = np.linalg.norm(directions, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = scatterer.ray_extent * rng.random(count) ** (1.0 / 3.0)
    return scatterer.position + radii[:, None] * directions / norms


# ---------------------------------------------------------------------
# JSON boundary
# ---------------------------------------------------------------------

def _ula_from_json(obj: dict, wavelength: float,
                   position: np.ndarray) -> UlaConfig:
    if "spacing_m" in obj:
        spacing = float(obj["spacing_m"])
    else:
        spacing = float(obj["spacing_wavelengths"]) * wavelength
    return UlaConfig(
        element_count=int(obj["element_count"]),
        spacing=spacing,
        azimuth_orientation=math.radians(
            float(obj.get("azimuth_orientation_deg", 0.0))),
        elevation_orientation=math.radians(
            float(obj.get("elevation_orientation_deg", 0.0))),
        phase_center=position,
    )


def _motion_from_json(obj: dict) -> MotionState:
    return MotionState(
        speed=float(obj.get("speed_mps", 0.0)),
        heading=math.radians(float(obj.get("heading_deg", 0.0))),
    )


def _scatterer_from_json(obj: dict, registry: RcsRegistry,
                         roles: frozenset[str]) -> Scatterer:
    rcs = None
    if "rcs_m2" in obj:
        rcs = float(obj["rcs_m2"])
    elif "rcs_type" in obj:
        rcs = registry.lookup(obj["rcs_type"])
    weight = obj.get("power_weight")
    extent = obj.get("ray_extent_m")
    return Scatterer(
        id=str(obj["id"]),
        position=np.asarray(obj["position_m"], dtype=float),
        motion=_motion_from_json(obj),
        rcs=rcs,
        cluster_power_weight=None if weight is None else float(weight),
        ray_extent=None if extent is None else float(extent),
        roles=roles,
    )


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from the parsed JSON document."""
    cobj = doc["carrier"]
    carrier = CarrierConfig(
        frequency=float(cobj["frequency_hz"]),
        ray_count=int(cobj.get("ray_count", 1)),
        speed_of_light=float(
            cobj.get("speed_of_light_mps", DEFAULT_SPEED_OF_LIGHT)),
    )
    lam = carrier.wavelength
    registry = RcsRegistry(overrides={
        k.strip().lower().replace(" ", "_"): float(sigma)
        for k, sigma in doc.get("rcs_overrides", {}).items()})

    nobj = doc["nodes"]
    bs_obj = nobj["bs_tx"]
    bs_pos = np.array([0.0, 0.0, float(bs_obj["height_m"])])
    bs_tx = _ula_from_json(bs_obj, lam, bs_pos)

    mode = SensingMode(doc.get("sensing_mode", "bistatic"))
    if "echo_rx" in nobj:
        eobj = nobj["echo_rx"]
        echo_rx = _ula_from_json(
            eobj, lam, np.asarray(eobj["position_m"], dtype=float))
    elif mode is SensingMode.MONOSTATIC:
        echo_rx = bs_tx
    else:
        raise ScenarioConfigError("bistatic scenario requires nodes.echo_rx")

    crx_obj = nobj["comm_rx"]
    crx_pos = np.array([float(crx_obj["range_m"]), 0.0, 0.0])
    comm_rx = _ula_from_json(crx_obj, lam, crx_pos)
    comm_motion = _motion_from_json(crx_obj)

    if "terminal_rcs_m2" in nobj:
        terminal_rcs = float(nobj["terminal_rcs_m2"])
    else:
        terminal_rcs = registry.lookup(nobj["terminal_rcs_type"])

    scatterers: list[Scatterer] = []
    for obj in doc.get("targets", []):
        scatterers.append(_scatterer_from_json(
            obj, registry, frozenset({SENSING_TARGET})))
    for obj in doc.get("clusters", []):
        scatterers.append(_scatterer_from_json(
            obj, registry, frozenset({COMM_CLUSTER})))
    for obj in doc.get("shared", []):
        scatterers.append(_scatterer_from_json(
            obj, registry, frozenset({SENSING_TARGET, COMM_CLUSTER})))

    return Scenario(
        carrier=carrier,
        nodes=NodeLayout(
            bs_tx=bs_tx, echo_rx=echo_rx, comm_rx=comm_rx,
            comm_rx_motion=comm_motion, terminal_rcs=terminal_rcs),
        sensing_mode=mode,
        scatterers=tuple(scatterers),
        rcs_registry=registry,
        seed=int(doc.get("seed", 0)),
        normalize_cluster_powers=bool(
            doc.get("normalize_cluster_powers", True)),
    )


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def bundled_scenario_path() -> Path:
    """Path to the scenario JSON shipped with the package (28 GHz
    bistatic vehicular layout with example target/cluster placements)."""
    return Path(resources.files("isacsim.data") / "vehicular_28ghz.json")
