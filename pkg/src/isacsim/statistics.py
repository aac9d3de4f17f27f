"""Channel statistics: time-varying spatial CCF, temporal ACF, frequency
responses, and the cross-channel correlation exposed by the shared
clusters.

Where the channel is random (communication ray phases and, optionally,
ray placements) expectations are seeded Monte Carlo averages; the sensing
channel is deterministic and its expectations collapse to a single
evaluation.  Numerator and denominator terms are averaged separately and
combined afterwards, and per-realization results are reduced in a fixed
order so outputs are byte-stable across worker counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _terms
from .comm_channel import draw_raysets
from .errors import UndefinedCorrelationError
from .geometry import element_displacement
from .scenario import (COMM_CLUSTER, Scatterer, Scenario, derive_rng,
                       realize_rays)

SENSING_SELECTORS = ("sensing_terminal", "sensing_static",
                     "sensing_mobile", "sensing_total")
COMM_SELECTORS = ("comm_los", "comm_static", "comm_mobile", "comm_total")
SELECTORS = SENSING_SELECTORS + COMM_SELECTORS


def is_sensing(selector: str) -> bool:
    if selector not in SELECTORS:
        raise ValueError(f"unknown component selector {selector!r}")
    return selector.startswith("sensing")


@dataclass(frozen=True)
class CorrelationSeries:
    """Sampled correlation values over a lag grid.

    For a spatial CCF the lags are (dp, dq) in carrier wavelengths; for a
    temporal ACF they are dt in seconds (dp/dq stay None)."""

    t: float
    selector: str
    lags: np.ndarray
    values: np.ndarray
    standard_errors: np.ndarray
    n_mc: int
    kind: str  # "ccf" | "acf"
    dp: np.ndarray | None = None
    dq: np.ndarray | None = None


@dataclass(frozen=True)
class FrequencyResponse:
    t: float
    frequencies: np.ndarray
    values: np.ndarray  # (M_T, M_R, F)


@dataclass(frozen=True)
class CrossChannelCorrelation:
    t: float
    value: complex
    standard_error: float
    n_mc: int


# ---------------------------------------------------------------------
# Component selection
# ---------------------------------------------------------------------

def _selector_block(scenario: Scenario, selector: str, times: np.ndarray,
                    raysets: dict | None) -> _terms.TermBlock:
    blocks: list[_terms.TermBlock] = []
    if selector in ("sensing_terminal", "sensing_total"):
        blocks.append(_terms.echo_terms(
            scenario, times, [(None, scenario.nodes.terminal_rcs)]))
    if selector in ("sensing_static", "sensing_total"):
        entries = [(s, s.rcs) for s in scenario.static_targets]
        if entries:
            blocks.append(_terms.echo_terms(scenario, times, entries))
    if selector in ("sensing_mobile", "sensing_total"):
        entries = [(s, s.rcs) for s in scenario.mobile_targets]
        if entries:
            blocks.append(_terms.echo_terms(scenario, times, entries))
    if selector in ("comm_los", "comm_total"):
        blocks.append(_terms.los_terms(scenario, times))
    if selector in ("comm_static", "comm_total"):
        for i, s in enumerate(scenario.static_clusters):
            blocks.append(_terms.cluster_terms(
                scenario, times, s, raysets[s.id], group=i))
    if selector in ("comm_mobile", "comm_total"):
        for i, s in enumerate(scenario.mobile_clusters):
            blocks.append(_terms.cluster_terms(
                scenario, times, s, raysets[s.id], group=i))
    block = _terms.concat_blocks(blocks, times)
    if block.n_terms == 0:
        raise UndefinedCorrelationError(
            f"component {selector!r} is empty in this scenario")
    return block


def _needs_rays(selector: str) -> bool:
    return selector in ("comm_static", "comm_mobile", "comm_total")


def _realization_seed(seed: int, r: int) -> int:
    # Stable per-realization sub-seed; independent of iteration order.
    return int(derive_rng(seed, "mc", r).integers(0, 2 ** 63))


def _run_realizations(n_mc: int, workers: int, fn) -> None:
    """Invoke fn(r) for r in 0..n_mc-1; results are written by index so
    the later reduction order is identical for any worker count."""
    if workers <= 1:
        for r in range(n_mc):
            fn(r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fn, range(n_mc)))


def _deterministic_ratio(g_ref: np.ndarray, g_lag: np.ndarray):
    """Closed-form expectation for deterministic channels: distinct taps
    carry independent implicit scattering phases, so cross-tap terms
    vanish and the correlation is the per-tap diagonal sum.

    g_ref: (K,) per-tap amplitudes of the reference link
    g_lag: (L, K) per-tap amplitudes across the lag grid
    """
    num = (np.conj(g_ref)[None, :] * g_lag).sum(axis=1)
    den = np.sqrt((np.abs(g_ref) ** 2).sum()
                  * (np.abs(g_lag) ** 2).sum(axis=1))
    return num / den, np.zeros(g_lag.shape[0])


def _ratio_and_se(h_ref: np.ndarray, h_lag: np.ndarray):
    """Eq.-style normalized correlation: sample means of numerator and of
    each denominator power, combined after averaging."""
    n = h_ref.shape[0]
    z = np.conj(h_ref)[:, None] * h_lag                      # (N, L)
    num = z.mean(axis=0)
    den = np.sqrt((np.abs(h_ref) ** 2).mean()
                  * (np.abs(h_lag) ** 2).mean(axis=0))
    rho = num / den
    if n > 1:
        se = np.sqrt((np.abs(z - num[None, :]) ** 2).sum(axis=0)
                     / (n - 1) / n) / den
    else:
        se = np.zeros_like(den)
    return rho, se


# ---------------------------------------------------------------------
# Spatial CCF
# ---------------------------------------------------------------------

def spatial_ccf(scenario: Scenario, selector: str, t: float,
                dp, dq, n_mc: int, seed: int,
                ensemble: str = "phases", workers: int = 1
                ) -> CorrelationSeries:
    """Normalized spatial cross-correlation versus antenna displacement.

    ``dp``/``dq`` are transmit/receive displacements in carrier
    wavelengths, broadcast to a common lag grid and applied as virtual
    element offsets along the respective array axes.  The reference link
    is the (phase-center, phase-center) virtual pair, so the zero lag is
    exactly 1.  Deterministic (sensing) selectors collapse to one
    evaluation.
    """
    if ensemble not in ("phases", "full"):
        raise ValueError("ensemble must be 'phases' or 'full'")
    dp, dq = np.broadcast_arrays(np.atleast_1d(np.asarray(dp, float)),
                                 np.atleast_1d(np.asarray(dq, float)))
    deterministic = is_sensing(selector) or selector == "comm_los"
    if deterministic:
        n_mc = 1
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")

    u_tx = scenario.nodes.bs_tx.axis
    u_rx = (scenario.nodes.echo_rx.axis if is_sensing(selector)
            else scenario.nodes.comm_rx.axis)
    times = np.array([float(t)])

    n_lag = dp.shape[0]

    if deterministic:
        block = _selector_block(scenario, selector, times, None)
        amp = block.amp[0]
        a = block.e_tx[0] @ u_tx
        b = block.e_rx[0] @ u_rx
        # k * displacement = 2*pi * lag, for lags in wavelengths.
        phase = 2.0 * math.pi * (dp[:, None] * a[None, :]
                                 + dq[:, None] * b[None, :])
        weighted = amp[None, :] * np.exp(1j * phase)      # (L, K)
        n_groups = int(block.group.max()) + 1
        g_lag = np.zeros((n_lag, n_groups), dtype=complex)
        g_ref = np.zeros(n_groups, dtype=complex)
        for g in range(n_groups):
            sel = block.group == g
            g_lag[:, g] = weighted[:, sel].sum(axis=1)
            g_ref[g] = amp[sel].sum()
        rho, se = _deterministic_ratio(g_ref, g_lag)
    else:
        h_ref = np.empty(n_mc, dtype=complex)
        h_lag = np.empty((n_mc, n_lag), dtype=complex)

        def one(r: int) -> None:
            raysets = None
            if _needs_rays(selector):
                rs = draw_raysets(scenario, _realization_seed(seed, r),
                                  redraw_placement=(ensemble == "full"))
                raysets = {x.cluster_id: x for x in rs}
            block = _selector_block(scenario, selector, times, raysets)
            amp = block.amp[0]
            a = block.e_tx[0] @ u_tx
            b = block.e_rx[0] @ u_rx
            h_ref[r] = amp.sum()
            phase = 2.0 * math.pi * (dp[:, None] * a[None, :]
                                     + dq[:, None] * b[None, :])
            h_lag[r] = (amp[None, :] * np.exp(1j * phase)).sum(axis=1)

        _run_realizations(n_mc, workers, one)
        rho, se = _ratio_and_se(h_ref, h_lag)
    lags = np.hypot(dp, dq)
    return CorrelationSeries(
        t=float(t), selector=selector, lags=lags, values=rho,
        standard_errors=se, n_mc=n_mc, kind="ccf", dp=dp, dq=dq)


# ---------------------------------------------------------------------
# Temporal ACF
# ---------------------------------------------------------------------

def temporal_acf(scenario: Scenario, selector: str, t: float,
                 dt, n_mc: int, seed: int,
                 ensemble: str = "phases", workers: int = 1,
                 p: int = 1, q: int = 1) -> CorrelationSeries:
    """Normalized temporal auto-correlation of one antenna pair between
    t and t + dt, sharing phases and rays within each realization."""
    if ensemble not in ("phases", "full"):
        raise ValueError("ensemble must be 'phases' or 'full'")
    dt = np.atleast_1d(np.asarray(dt, dtype=float))
    deterministic = is_sensing(selector) or selector == "comm_los"
    if deterministic:
        n_mc = 1
    if n_mc < 1:
        raise ValueError("n_mc must be >= 1")

    k = scenario.carrier.wavenumber
    d_p = element_displacement(scenario.nodes.bs_tx, p)
    rx_ula = (scenario.nodes.echo_rx if is_sensing(selector)
              else scenario.nodes.comm_rx)
    d_q = element_displacement(rx_ula, q)
    times = np.concatenate(([float(t)], float(t) + dt))

    if deterministic:
        block = _selector_block(scenario, selector, times, None)
        g = _terms.tap_amplitudes(block, k, d_p, d_q)    # (1 + L, groups)
        rho, se = _deterministic_ratio(g[0], g[1:])
    else:
        h_ref = np.empty(n_mc, dtype=complex)
        h_lag = np.empty((n_mc, dt.shape[0]), dtype=complex)

        def one(r: int) -> None:
            raysets = None
            if _needs_rays(selector):
                rs = draw_raysets(scenario, _realization_seed(seed, r),
                                  redraw_placement=(ensemble == "full"))
                raysets = {x.cluster_id: x for x in rs}
            block = _selector_block(scenario, selector, times, raysets)
            h = _terms.gains_at_elements(block, k, d_p, d_q)
            h_ref[r] = h[0]
            h_lag[r] = h[1:]

        _run_realizations(n_mc, workers, one)
        rho, se = _ratio_and_se(h_ref, h_lag)
    return CorrelationSeries(
        t=float(t), selector=selector, lags=dt, values=rho,
        standard_errors=se, n_mc=n_mc, kind="acf")


# ---------------------------------------------------------------------
# Frequency response and narrowband reduction
# ---------------------------------------------------------------------

def frequency_response(cir, f_grid) -> FrequencyResponse:
    """Exact tapped-delay-line transform H(t, f) = sum_k a_k
    exp(-j 2 pi f tau_k), per antenna pair."""
    f = np.atleast_1d(np.asarray(f_grid, dtype=float))
    m_t, m_r = cir.shape
    values = np.zeros((m_t, m_r, f.shape[0]), dtype=complex)
    for i in range(m_t):
        for j in range(m_r):
            for tap in cir.taps[i][j]:
                values[i, j] += tap.amplitude * np.exp(
                    -2j * math.pi * f * tap.delay)
    return FrequencyResponse(t=cir.t, frequencies=f, values=values)


def narrowband_gains(cir) -> np.ndarray:
    """Per-pair complex gain with delays dropped (frequency response at
    f = 0)."""
    m_t, m_r = cir.shape
    out = np.zeros((m_t, m_r), dtype=complex)
    for i in range(m_t):
        for j in range(m_r):
            out[i, j] = sum(tap.amplitude for tap in cir.taps[i][j])
    return out


# ---------------------------------------------------------------------
# Cross-channel correlation via shared clusters
# ---------------------------------------------------------------------

def cross_channel_correlation(scenario: Scenario, t: float, n_mc: int,
                              seed: int,
                              sensing_sources: list[str] | None = None,
                              comm_sources: list[str] | None = None
                              ) -> CrossChannelCorrelation:
    """Normalized correlation between the sensing and communication
    responses of designated scatterers on the (1, 1) antenna pairs.

    A scatterer shared by both channels is the same physical reflector,
    so both channels see the same ray decomposition: per realization the
    random ray phases are keyed by scatterer id and reused on whichever
    side the scatterer appears.  A shared cluster therefore correlates
    the two channels, while disjoint source sets use independent phase
    draws (or, for plain targets, no randomness at all) and decorrelate
    to 0 within estimator noise.

    Defaults to the scenario's shared clusters on both sides; explicit
    source ids override.  Sensing sources without a ray decomposition
    contribute their deterministic echo tap.
    """
    if sensing_sources is None or comm_sources is None:
        shared = scenario.shared_clusters
        if not shared:
            raise UndefinedCorrelationError(
                "scenario has no shared clusters")
        if sensing_sources is None:
            sensing_sources = [s.id for s in shared]
        if comm_sources is None:
            comm_sources = [s.id for s in shared]
    sens = [scenario.find_scatterer(i) for i in sensing_sources]
    comm = [scenario.find_scatterer(i) for i in comm_sources]
    if not sens or not comm:
        raise UndefinedCorrelationError("empty correlation source set")
    for s in comm:
        if COMM_CLUSTER not in s.roles:
            raise ValueError(
                f"{s.id!r} is not a communication cluster")

    k = scenario.carrier.wavenumber
    d_p_tx = element_displacement(scenario.nodes.bs_tx, 1)
    d_q_echo = element_displacement(scenario.nodes.echo_rx, 1)
    d_q_comm = element_displacement(scenario.nodes.comm_rx, 1)
    times = np.array([float(t)])

    # Ray placements are frozen geometry (scenario seed); phases are the
    # Monte Carlo ensemble, one draw per scatterer id per realization.
    ray_ids = sorted({s.id for s in sens if s.ray_extent is not None}
                     | {s.id for s in comm})
    offsets = {}
    for sid in ray_ids:
        s = scenario.find_scatterer(sid)
        points = realize_rays(s, scenario.carrier, scenario.seed)
        offsets[sid] = points - s.position

    # Deterministic part of the sensing side (plain targets, no rays).
    det_entries = [(s, s.rcs) for s in sens if s.ray_extent is None]
    h_e_det = 0.0 + 0.0j
    if det_entries:
        block = _terms.echo_terms(scenario, times, det_entries)
        h_e_det = _terms.gains_at_elements(block, k, d_p_tx, d_q_echo)[0]

    h_e = np.empty(n_mc, dtype=complex)
    h_c = np.empty(n_mc, dtype=complex)
    for r in range(n_mc):
        rs = _realization_seed(seed, r)
        raysets = {
            sid: _terms.RaySet(
                cluster_id=sid, offsets=offsets[sid],
                phases=derive_rng(rs, sid, "phases").uniform(
                    0.0, 2.0 * math.pi, scenario.carrier.ray_count))
            for sid in ray_ids}

        blocks = [_terms.echo_cluster_terms(
                      scenario, times, s, raysets[s.id], group=i)
                  for i, s in enumerate(sens) if s.ray_extent is not None]
        h = h_e_det
        if blocks:
            block_e = _terms.concat_blocks(blocks, times)
            h = h + _terms.gains_at_elements(block_e, k, d_p_tx,
                                             d_q_echo)[0]
        h_e[r] = h

        blocks = [_terms.cluster_terms(
                      scenario, times, s, raysets[s.id], group=i)
                  for i, s in enumerate(comm)]
        block_c = _terms.concat_blocks(blocks, times)
        h_c[r] = _terms.gains_at_elements(block_c, k, d_p_tx, d_q_comm)[0]

    rho, se = _ratio_and_se(h_e, h_c[:, None])
    return CrossChannelCorrelation(
        t=float(t), value=complex(rho[0]),
        standard_error=float(se[0]), n_mc=n_mc)
