"""Internal path-term engine shared by the channel and statistics modules.

Each propagation path (terminal echo, target echo, LoS, or one cluster
ray) is reduced to a term

    h_pq(t) = amp(t) * exp(j*k*<e_tx(t), d_p>) * exp(j*k*<e_rx(t), d_q>)

where ``amp`` folds the path gain, the carrier phase of the initial
propagation distance, and the Doppler factors.  The carrier phase is
anchored at the initial (t=0) distances with the literal Doppler factors
supplying the motion-induced phase; delays, gains, and direction vectors
always come from the exact geometry at time t.  Array factors are kept
out of ``amp`` so taps, steering sweeps, and fractional antenna
displacements all reuse the same terms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError
from .scenario import Scatterer, Scenario

FOUR_PI = 4.0 * np.pi

SENSING_COMPONENTS = ("sensing_terminal", "sensing_static", "sensing_mobile")
COMM_COMPONENTS = ("comm_los", "comm_static", "comm_mobile")


@dataclass
class RaySet:
    """Frozen per-cluster ray realization: rigid offsets from the cluster
    centroid and the random ray phases.  Both are path properties, shared
    by every antenna pair and every time instant of one realization."""

    cluster_id: str
    offsets: np.ndarray  # (I, 3)
    phases: np.ndarray   # (I,)


@dataclass
class TermBlock:
    """Vectorized path terms for a batch of time instants.

    amp:   (T, K) complex amplitudes excluding array factors
    e_tx:  (T, K, 3) direction dotted with the transmit element offset
    e_rx:  (T, K, 3) direction dotted with the receive element offset
    delay: (T, K) absolute path delay in seconds
    source: (K,) provenance labels
    group: (K,) tap-group index; rays of one cluster share a group
    """

    amp: np.ndarray
    e_tx: np.ndarray
    e_rx: np.ndarray
    delay: np.ndarray
    source: list[str]
    group: np.ndarray

    @property
    def n_times(self) -> int:
        return self.amp.shape[0]

    @property
    def n_terms(self) -> int:
        return self.amp.shape[1]


def _as_times(t) -> np.ndarray:
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if times.ndim != 1:
        raise ValueError("t must be scalar or 1-D")
    return times


def _legs(points: np.ndarray, anchor: np.ndarray):
    """Distances and unit directions from ``anchor`` to ``points``
    (leading shape preserved)."""
    diff = points - anchor
    dist = np.linalg.norm(diff, axis=-1)
    if np.any(dist == 0.0):
        raise DegenerateGeometryError(
            "scatterer coincides with an array phase center")
    return dist, diff / dist[..., None]


def _doppler(k: float, displacement: np.ndarray,
             direction: np.ndarray) -> np.ndarray:
    """exp(j*k*<displacement, direction>) with matching leading shapes."""
    return np.exp(1j * k * np.sum(displacement * direction, axis=-1))


def empty_block(times: np.ndarray) -> TermBlock:
    n = len(times)
    return TermBlock(
        amp=np.zeros((n, 0), dtype=complex),
        e_tx=np.zeros((n, 0, 3)),
        e_rx=np.zeros((n, 0, 3)),
        delay=np.zeros((n, 0)),
        source=[],
        group=np.zeros(0, dtype=int),
    )


def concat_blocks(blocks: list[TermBlock], times: np.ndarray) -> TermBlock:
    blocks = [b for b in blocks if b.n_terms > 0]
    if not blocks:
        return empty_block(times)
    offset = 0
    groups = []
    for b in blocks:
        groups.append(b.group + offset)
        if len(b.group):
            offset += b.group.max() + 1
    return TermBlock(
        amp=np.concatenate([b.amp for b in blocks], axis=1),
        e_tx=np.concatenate([b.e_tx for b in blocks], axis=1),
        e_rx=np.concatenate([b.e_rx for b in blocks], axis=1),
        delay=np.concatenate([b.delay for b in blocks], axis=1),
        source=sum((b.source for b in blocks), []),
        group=np.concatenate(groups),
    )


# ---------------------------------------------------------------------
# Sensing-channel terms (deterministic, no RNG anywhere)
# ---------------------------------------------------------------------

def echo_terms(scenario: Scenario, t,
               targets: list[tuple[Scatterer | None, float]]) -> TermBlock:
    """Two-way echo terms BS -> target -> echo receiver.

    ``targets`` is a list of (scatterer-or-None, rcs); None stands for
    the terminal target MR, which moves with the receiver's motion.
    """
    times = _as_times(t)
    scn = scenario
    lam = scn.carrier.wavelength
    k = scn.carrier.wavenumber
    c = scn.carrier.speed_of_light
    bs = scn.nodes.bs_tx.phase_center
    echo = scn.nodes.echo_rx.phase_center

    pos0 = np.empty((len(targets), 3))
    vel = np.empty((len(targets), 3))
    sigma = np.empty(len(targets))
    source = []
    for i, (s, rcs) in enumerate(targets):
        if s is None:
            pos0[i] = scn.nodes.comm_rx.phase_center
            vel[i] = scn.nodes.comm_rx_motion.velocity
            source.append("terminal")
        else:
            pos0[i] = s.position
            vel[i] = s.motion.velocity
            source.append(s.id)
        sigma[i] = rcs

    disp = times[:, None, None] * vel[None, :, :]       # (T, K, 3)
    pos = pos0[None, :, :] + disp                       # (T, K, 3)

    xi_t0, _ = _legs(pos0, bs)                          # (K,)
    xi_r0, _ = _legs(pos0, echo)
    xi_t, e_t = _legs(pos, bs)                          # (T, K), (T, K, 3)
    xi_r, e_r = _legs(pos, echo)

    gain = lam ** 2 * sigma[None, :] / (FOUR_PI ** 3 * (xi_t * xi_r) ** 2)
    amp = (np.sqrt(gain)
           * np.exp(-1j * k * (xi_t0 + xi_r0))[None, :]
           * _doppler(k, -disp, e_t)
           * _doppler(k, -disp, e_r))
    return TermBlock(
        amp=amp,
        e_tx=e_t,
        e_rx=e_r,
        delay=(xi_t + xi_r) / c,
        source=source,
        group=np.arange(len(targets)),
    )


def echo_cluster_terms(scenario: Scenario, t, cluster: Scatterer,
                       rayset: RaySet, group: int = 0) -> TermBlock:
    """Ray-resolved echo terms BS -> cluster rays -> echo receiver for a
    scatterer that carries a ray decomposition (a cluster shared with the
    communication channel).  Radar-equation gain from the centroid legs,
    split evenly over the I rays."""
    times = _as_times(t)
    scn = scenario
    lam = scn.carrier.wavelength
    k = scn.carrier.wavenumber
    c = scn.carrier.speed_of_light
    bs = scn.nodes.bs_tx.phase_center
    echo = scn.nodes.echo_rx.phase_center

    n_rays = rayset.offsets.shape[0]
    disp_c = times[:, None] * cluster.motion.velocity[None, :]  # (T, 3)
    centroid = cluster.position[None, :] + disp_c
    rays = centroid[:, None, :] + rayset.offsets[None, :, :]    # (T, I, 3)
    rays0 = cluster.position[None, :] + rayset.offsets          # (I, 3)

    xi_t0, _ = _legs(rays0, bs)
    xi_r0, _ = _legs(rays0, echo)
    _, e_t = _legs(rays, bs)
    _, e_r = _legs(rays, echo)

    xi_tc, _ = _legs(centroid, bs)                              # (T,)
    xi_rc, _ = _legs(centroid, echo)
    gain = lam ** 2 * cluster.rcs / (FOUR_PI ** 3 * (xi_tc * xi_rc) ** 2)

    amp = (np.sqrt(gain)[:, None] / np.sqrt(n_rays)
           * np.exp(1j * (rayset.phases - k * (xi_t0 + xi_r0)))[None, :]
           * _doppler(k, -disp_c[:, None, :], e_t)
           * _doppler(k, -disp_c[:, None, :], e_r))
    delay = np.broadcast_to(
        ((xi_tc + xi_rc) / c)[:, None], amp.shape).copy()
    return TermBlock(
        amp=amp,
        e_tx=e_t,
        e_rx=e_r,
        delay=delay,
        source=[cluster.id] * n_rays,
        group=np.full(n_rays, group, dtype=int),
    )


# ---------------------------------------------------------------------
# Communication-channel terms
# ---------------------------------------------------------------------

def los_terms(scenario: Scenario, t) -> TermBlock:
    times = _as_times(t)
    scn = scenario
    lam = scn.carrier.wavelength
    k = scn.carrier.wavenumber
    c = scn.carrier.speed_of_light
    bs = scn.nodes.bs_tx.phase_center

    pos0 = scn.nodes.comm_rx.phase_center
    disp = times[:, None] * scn.nodes.comm_rx_motion.velocity[None, :]
    pos = pos0[None, :] + disp                          # (T, 3)

    xi0, _ = _legs(pos0, bs)
    xi, e_t = _legs(pos, bs)                            # (T,), (T, 3)

    gain = lam ** 2 / (FOUR_PI ** 2 * xi ** 2)
    amp = (np.sqrt(gain)
           * np.exp(-1j * k * xi0)
           * _doppler(k, disp, -e_t))
    return TermBlock(
        amp=amp[:, None],
        e_tx=e_t[:, None, :],
        e_rx=-e_t[:, None, :],
        delay=(xi / c)[:, None],
        source=["los"],
        group=np.zeros(1, dtype=int),
    )


def cluster_terms(scenario: Scenario, t, cluster: Scatterer,
                  rayset: RaySet, group: int = 0) -> TermBlock:
    """Ray terms of one NLoS cluster; handles static clusters as the
    zero-velocity case of the mobile-cluster form."""
    times = _as_times(t)
    scn = scenario
    lam = scn.carrier.wavelength
    k = scn.carrier.wavenumber
    c = scn.carrier.speed_of_light
    bs = scn.nodes.bs_tx.phase_center

    n_rays = rayset.offsets.shape[0]
    v_c = cluster.motion.velocity
    v_r = scn.nodes.comm_rx_motion.velocity

    disp_c = times[:, None] * v_c[None, :]              # (T, 3)
    disp_r = times[:, None] * v_r[None, :]
    centroid = cluster.position[None, :] + disp_c       # (T, 3)
    rays = centroid[:, None, :] + rayset.offsets[None, :, :]  # (T, I, 3)
    rays0 = cluster.position[None, :] + rayset.offsets  # (I, 3)
    mr = scn.nodes.comm_rx.phase_center[None, :] + disp_r     # (T, 3)
    mr0 = scn.nodes.comm_rx.phase_center

    xi_t0, _ = _legs(rays0, bs)                         # (I,)
    xi_r0, _ = _legs(rays0, mr0)
    _, e_t = _legs(rays, bs)                            # (T, I, 3)
    _, e_r = _legs(rays, mr[:, None, :])

    # Centroid legs drive the tap delay and the cluster gain.
    xi_tc, _ = _legs(centroid, bs)                      # (T,)
    xi_rc, _ = _legs(centroid, mr)
    power = scn.cluster_power(cluster)
    gain = lam ** 2 * power / (FOUR_PI ** 2 * (xi_tc + xi_rc) ** 2)

    amp = (np.sqrt(gain)[:, None] / np.sqrt(n_rays)
           * np.exp(1j * (rayset.phases - k * (xi_t0 + xi_r0)))[None, :]
           * _doppler(k, -disp_c[:, None, :], e_t)
           * _doppler(k, (disp_r - disp_c)[:, None, :], e_r))
    delay = np.broadcast_to(
        ((xi_tc + xi_rc) / c)[:, None], amp.shape).copy()
    return TermBlock(
        amp=amp,
        e_tx=e_t,
        e_rx=e_r,
        delay=delay,
        source=[cluster.id] * n_rays,
        group=np.full(n_rays, group, dtype=int),
    )


# ---------------------------------------------------------------------
# Array-factor application
# ---------------------------------------------------------------------

def gains_at_elements(block: TermBlock, k: float, d_tx: np.ndarray,
                      d_rx: np.ndarray) -> np.ndarray:
    """Narrowband gain h(t) = sum of terms with array factors for fixed
    element offsets ``d_tx``/``d_rx`` (3-vectors); returns (T,)."""
    phase = (block.e_tx @ d_tx) + (block.e_rx @ d_rx)
    return np.sum(block.amp * np.exp(1j * k * phase), axis=1)


def tap_amplitudes(block: TermBlock, k: float, d_tx: np.ndarray,
                   d_rx: np.ndarray) -> np.ndarray:
    """Per-tap complex amplitudes at one antenna pair: terms summed
    within each tap group; returns (T, n_groups)."""
    phase = (block.e_tx @ d_tx) + (block.e_rx @ d_rx)
    weighted = block.amp * np.exp(1j * k * phase)
    n_groups = int(block.group.max()) + 1 if block.n_terms else 0
    out = np.zeros((block.n_times, n_groups), dtype=complex)
    for g in range(n_groups):
        out[:, g] = weighted[:, block.group == g].sum(axis=1)
    return out
