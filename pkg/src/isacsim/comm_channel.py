"""Communication channel: LoS tap plus per-cluster ray-sum taps with
Friis-style gains and frozen uniform random ray phases.

Shared clusters are the same Scatterer objects the sensing channel reads,
so both channels see identical centroid geometry at every instant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _terms
from ._terms import RaySet
from .errors import DegenerateGeometryError
from .geometry import element_displacement
from .scenario import Scatterer, Scenario, derive_rng, realize_rays
from .sensing_channel import Tap

__all__ = [
    "RaySet", "CommCir", "friis_gain", "cluster_gain", "draw_raysets",
    "los_tap", "static_cluster_tap", "mobile_cluster_tap", "comm_cir",
]


@dataclass(frozen=True)
class CommCir:
    """Communication CIR at one time instant for one realization;
    taps[p-1][q-1] lists 1 + L3 + L4 taps (one aggregated tap per
    cluster: the I rays share the centroid delay)."""

    t: float
    taps: tuple
    realization_seed: int

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.taps), len(self.taps[0])


def friis_gain(wavelength: float, xi: float) -> float:
    """One-way free-space power gain lambda^2 / ((4pi)^2 xi^2)."""
    if xi <= 0:
        raise DegenerateGeometryError("propagation distance must be > 0")
    return wavelength ** 2 / (_terms.FOUR_PI ** 2 * xi ** 2)


def cluster_gain(wavelength: float, power: float, xi_t: float,
                 xi_r: float) -> float:
    """NLoS cluster power gain; the legs add (single bounce), unlike the
    radar equation where they multiply."""
    if power < 0:
        raise ValueError("cluster power must be >= 0")
    if xi_t + xi_r <= 0:
        raise DegenerateGeometryError("propagation legs must sum > 0")
    return wavelength ** 2 * power / (_terms.FOUR_PI ** 2 * (xi_t + xi_r) ** 2)


def draw_raysets(scenario: Scenario, realization_seed: int,
                 redraw_placement: bool = False) -> list[RaySet]:
    """One RaySet per communication cluster.  Ray placements come from
    the scenario seed (frozen geometry) unless ``redraw_placement``;
    phases are always drawn from the realization seed.  Deterministic in
    its arguments and independent of iteration order."""
    placement_seed = realization_seed if redraw_placement else scenario.seed
    raysets = []
    for s in scenario.comm_clusters:
        points = realize_rays(s, scenario.carrier, placement_seed)
        phases = derive_rng(realization_seed, s.id, "phases").uniform(
            0.0, 2.0 * np.pi, scenario.carrier.ray_count)
        raysets.append(RaySet(cluster_id=s.id,
                              offsets=points - s.position,
                              phases=phases))
    return raysets


def _tap_from_block(scenario: Scenario, block: _terms.TermBlock,
                    p: int, q: int, source: str) -> Tap:
    k = scenario.carrier.wavenumber
    d_p = element_displacement(scenario.nodes.bs_tx, p)
    d_q = element_displacement(scenario.nodes.comm_rx, q)
    amp = _terms.tap_amplitudes(block, k, d_p, d_q)[0, 0]
    return Tap(complex(amp), float(block.delay[0, 0]), source)


def los_tap(scenario: Scenario, t: float, p: int, q: int) -> Tap:
    block = _terms.los_terms(scenario, t)
    return _tap_from_block(scenario, block, p, q, "los")


def _cluster_tap(scenario: Scenario, rayset: RaySet, t: float,
                 p: int, q: int) -> Tap:
    cluster = scenario.find_scatterer(rayset.cluster_id)
    block = _terms.cluster_terms(scenario, t, cluster, rayset)
    return _tap_from_block(scenario, block, p, q, cluster.id)


def static_cluster_tap(scenario: Scenario, rayset: RaySet, t: float,
                       p: int, q: int) -> Tap:
    """Aggregated ray-sum tap of a static cluster."""
    return _cluster_tap(scenario, rayset, t, p, q)


def mobile_cluster_tap(scenario: Scenario, rayset: RaySet, t: float,
                       p: int, q: int) -> Tap:
    """Aggregated ray-sum tap of a mobile cluster; identical code path as
    the static form, which it degenerates to at zero cluster velocity."""
    return _cluster_tap(scenario, rayset, t, p, q)


def comm_cir(scenario: Scenario, realization_seed: int,
             t: float) -> CommCir:
    """Full communication CIR for one phase realization: LoS tap followed
    by one tap per static then mobile cluster."""
    raysets = {r.cluster_id: r
               for r in draw_raysets(scenario, realization_seed)}
    blocks = [_terms.los_terms(scenario, t)]
    order = ["los"]
    for s in list(scenario.static_clusters) + list(scenario.mobile_clusters):
        blocks.append(_terms.cluster_terms(scenario, t, s, raysets[s.id]))
        order.append(s.id)
    block = _terms.concat_blocks(blocks, _terms._as_times(t))

    k = scenario.carrier.wavenumber
    m_t = scenario.nodes.bs_tx.element_count
    m_r = scenario.nodes.comm_rx.element_count
    taps = []
    for p in range(1, m_t + 1):
        d_p = element_displacement(scenario.nodes.bs_tx, p)
        row = []
        for q in range(1, m_r + 1):
            d_q = element_displacement(scenario.nodes.comm_rx, q)
            amps = _terms.tap_amplitudes(block, k, d_p, d_q)[0]
            row.append(tuple(
                Tap(complex(amps[g]),
                    float(block.delay[0, block.group == g][0]),
                    order[g])
                for g in range(len(order))))
        taps.append(tuple(row))
    return CommCir(t=float(t), taps=tuple(taps),
                   realization_seed=int(realization_seed))
