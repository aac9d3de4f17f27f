"""Sensing channel: tapped-delay-line echo CIRs BS -> targets -> echo
receiver with radar-equation amplitudes.

The channel is fully deterministic: no random numbers are consumed
anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _terms
from .errors import DegenerateGeometryError, ScenarioConfigError
from .geometry import element_displacement
from .scenario import Scatterer, Scenario


@dataclass(frozen=True)
class Tap:
    """One resolvable path: complex amplitude (path loss included),
    absolute delay in seconds, and a provenance label."""

    amplitude: complex
    delay: float
    source: str


@dataclass(frozen=True)
class SensingCir:
    """Echo CIR at one time instant; taps[p-1][q-1] lists the taps of the
    (p-th transmit, q-th echo receive) antenna pair."""

    t: float
    taps: tuple  # (M_T, M_Re) nested tuples of tuple[Tap, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.taps), len(self.taps[0])


def radar_gain(wavelength: float, rcs: float, xi_t: float,
               xi_r: float) -> float:
    """Two-way path power gain lambda^2*sigma / ((4pi)^3 (xi_t*xi_r)^2)."""
    if rcs <= 0:
        raise ValueError("rcs must be > 0")
    if xi_t <= 0 or xi_r <= 0:
        raise DegenerateGeometryError("propagation legs must be > 0")
    return wavelength ** 2 * rcs / (_terms.FOUR_PI ** 3 * (xi_t * xi_r) ** 2)


def _taps_from_block(scenario: Scenario, block: _terms.TermBlock,
                     p: int, q: int) -> list[Tap]:
    k = scenario.carrier.wavenumber
    d_p = element_displacement(scenario.nodes.bs_tx, p)
    d_q = element_displacement(scenario.nodes.echo_rx, q)
    amps = _terms.tap_amplitudes(block, k, d_p, d_q)[0]
    return [Tap(complex(amps[g]), float(block.delay[0, block.group == g][0]),
                block.source[int(np.argmax(block.group == g))])
            for g in range(amps.shape[0])]


def target_tap(scenario: Scenario, scatterer: Scatterer, t: float,
               p: int, q: int) -> Tap:
    """Echo tap of a single target at time t; static targets are the
    zero-velocity case of the same formula."""
    if scatterer.rcs is None:
        raise ScenarioConfigError(f"target {scatterer.id!r} has no RCS")
    block = _terms.echo_terms(scenario, t, [(scatterer, scatterer.rcs)])
    return _taps_from_block(scenario, block, p, q)[0]


def terminal_tap(scenario: Scenario, t: float, p: int, q: int) -> Tap:
    """Echo tap of the terminal target MR (always present)."""
    block = _terms.echo_terms(
        scenario, t, [(None, scenario.nodes.terminal_rcs)])
    return _taps_from_block(scenario, block, p, q)[0]


def static_target_taps(scenario: Scenario, p: int, q: int) -> list[Tap]:
    """Time-invariant taps of the static target set."""
    return [target_tap(scenario, s, 0.0, p, q)
            for s in scenario.static_targets]


def mobile_target_taps(scenario: Scenario, t: float, p: int,
                       q: int) -> list[Tap]:
    """Taps of the mobile target set with positions propagated to t."""
    return [target_tap(scenario, s, t, p, q)
            for s in scenario.mobile_targets]


def sensing_cir(scenario: Scenario, t: float) -> SensingCir:
    """Full echo CIR: terminal + static + mobile taps for every antenna
    pair (1 + L1 + L2 taps per pair)."""
    entries = [(None, scenario.nodes.terminal_rcs)]
    for s in scenario.static_targets:
        if s.rcs is None:
            raise ScenarioConfigError(f"target {s.id!r} has no RCS")
        entries.append((s, s.rcs))
    for s in scenario.mobile_targets:
        if s.rcs is None:
            raise ScenarioConfigError(f"target {s.id!r} has no RCS")
        entries.append((s, s.rcs))
    block = _terms.echo_terms(scenario, t, entries)
    m_t = scenario.nodes.bs_tx.element_count
    m_r = scenario.nodes.echo_rx.element_count
    taps = tuple(
        tuple(tuple(_taps_from_block(scenario, block, p, q))
              for q in range(1, m_r + 1))
        for p in range(1, m_t + 1))
    return SensingCir(t=float(t), taps=taps)
