"""End-to-end acceptance gate.

One test per acceptance criterion; each prints a single pass/fail line.
All checks run against the bundled scenario or small purpose-built
configurations derived from it.
"""

import dataclasses
import hashlib
import math

import numpy as np

from isacsim import cli
from isacsim import comm_channel as cc
from isacsim import sensing_channel as sc
from isacsim import statistics as st
from isacsim.geometry import angles_and_distance, propagate
from isacsim.scenario import derive_rng, realize_rays, scenario_from_dict


def _report(num, name, ok):
    print(f"[criterion {num:02d}] {name}: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed"


def test_criterion_01_zero_lag_normalization(bundled):
    worst = 0.0
    zero = np.array([0.0])
    for t in (0.0, 2.0, 5.0):
        for sel in st.SELECTORS:
            s = st.spatial_ccf(bundled, sel, t, zero, zero, 100, 3)
            a = st.temporal_acf(bundled, sel, t, zero, 100, 3)
            worst = max(worst, abs(abs(s.values[0]) - 1.0),
                        abs(abs(a.values[0]) - 1.0))
    _report(1, "zero-lag normalization", worst < 1e-9)


def test_criterion_02_boundedness(bundled):
    dq = np.linspace(0.0, 2.0, 21)
    dt = np.linspace(0.0, 0.05, 26)
    excess = -np.inf
    for sel in st.SELECTORS:
        s = st.spatial_ccf(bundled, sel, 2.0, np.zeros_like(dq), dq,
                           2000, 13)
        a = st.temporal_acf(bundled, sel, 2.0, dt, 2000, 13)
        excess = max(excess,
                     np.max(np.abs(s.values) - 1 - 5 * s.standard_errors),
                     np.max(np.abs(a.values) - 1 - 5 * a.standard_errors))
    _report(2, "correlation boundedness", excess <= 1e-12)


def test_criterion_03_degeneration_equivalences(bundled, doc):
    # a mobile cluster at zero speed runs through the mobile code path
    # but must reproduce the static form bitwise
    raysets = {r.cluster_id: r for r in cc.draw_raysets(bundled, 77)}
    mob = bundled.mobile_clusters[0]
    frozen = dataclasses.replace(
        mob, motion=dataclasses.replace(mob.motion, speed=0.0))
    scn = dataclasses.replace(bundled, scatterers=tuple(
        frozen if s.id == mob.id else s for s in bundled.scatterers))
    a = cc.mobile_cluster_tap(scn, raysets[mob.id], 2.0, 1, 1)
    b = cc.static_cluster_tap(scn, raysets[mob.id], 2.0, 1, 1)
    cluster_ok = (a.amplitude == b.amplitude and a.delay == b.delay)

    # a mobile target at zero speed must match the static (t=0) geometry
    tgt = bundled.mobile_targets[0]
    still = dataclasses.replace(
        tgt, motion=dataclasses.replace(tgt.motion, speed=0.0))
    scn2 = dataclasses.replace(bundled, scatterers=tuple(
        still if s.id == tgt.id else s for s in bundled.scatterers))
    u = sc.target_tap(scn2, still, 3.0, 1, 1)
    v = sc.target_tap(scn2, still, 0.0, 1, 1)
    target_ok = (u.amplitude == v.amplitude and u.delay == v.delay)

    # monostatic mode: departure and echo-arrival angles coincide
    doc["sensing_mode"] = "monostatic"
    del doc["nodes"]["echo_rx"]
    mono = scenario_from_dict(doc)
    angle_err = 0.0
    for s in mono.sensing_targets:
        p = propagate(s.position, s.motion, 3.0)
        a_t, _ = angles_and_distance(mono.nodes.bs_tx.phase_center, p)
        a_r, _ = angles_and_distance(mono.nodes.echo_rx.phase_center, p)
        angle_err = max(angle_err, abs(a_t.azimuth - a_r.azimuth),
                        abs(a_t.elevation - a_r.elevation))
    _report(3, "degeneration equivalences",
            cluster_ok and target_ok and angle_err <= 1e-12)


def test_criterion_04_doppler_oracle(doc):
    # monostatic, receiver at array height moving directly away from the
    # base station: the terminal echo phase must rotate at 2 v_R / lambda
    doc["sensing_mode"] = "monostatic"
    del doc["nodes"]["echo_rx"]
    doc["nodes"]["bs_tx"]["height_m"] = 0.0
    doc["nodes"]["comm_rx"]["speed_mps"] = 5.0
    doc["nodes"]["comm_rx"]["heading_deg"] = 0.0
    scn = scenario_from_dict(doc)
    expected = 2.0 * 5.0 / scn.carrier.wavelength  # 933.33 Hz
    dt = 1e-6
    worst = 0.0
    for t in (0.0, 1.0, 4.0):
        a = sc.terminal_tap(scn, t, 1, 1).amplitude
        b = sc.terminal_tap(scn, t + dt, 1, 1).amplitude
        f = abs(np.angle(b / a)) / (2 * math.pi * dt)
        worst = max(worst, abs(f - expected) / expected)
    _report(4, "terminal Doppler rate 2v/lambda", worst < 0.005)


def test_criterion_05_power_laws():
    lam = 3.0e8 / 28e9
    radar_ok = (sc.radar_gain(lam, 100.0, 2 * 152.97, 2 * 152.97)
                == sc.radar_gain(lam, 100.0, 152.97, 152.97) / 16.0)
    friis_ok = (cc.friis_gain(lam, 2 * 77.0)
                == cc.friis_gain(lam, 77.0) / 4.0)
    cluster_ok = (cc.cluster_gain(lam, 1.0, 60.0, 60.0)
                  == cc.friis_gain(lam, 120.0))
    _report(5, "radar/Friis/cluster power laws",
            radar_ok and friis_ok and cluster_ok)


def test_criterion_06_time_invariance(doc):
    doc["nodes"]["comm_rx"]["speed_mps"] = 0.0
    for grp in ("targets", "clusters", "shared"):
        for x in doc[grp]:
            x["speed_mps"] = 0.0
    frozen = scenario_from_dict(doc)
    dt = np.linspace(0.0, 0.05, 11)
    flat = True
    for sel in ("sensing_total", "comm_total"):
        a = st.temporal_acf(frozen, sel, 0.0, dt, 200, 3)
        flat &= bool(np.all(np.abs(np.abs(a.values) - 1.0) < 1e-9))

    def taps_equal(x, y):
        return all(ta.amplitude == tb.amplitude and ta.delay == tb.delay
                   for rx, ry in zip(x, y) for qx, qy in zip(rx, ry)
                   for ta, tb in zip(qx, qy))

    s_ok = taps_equal(sc.sensing_cir(frozen, 0.0).taps,
                      sc.sensing_cir(frozen, 3.7).taps)
    c_ok = taps_equal(cc.comm_cir(frozen, 9, 0.0).taps,
                      cc.comm_cir(frozen, 9, 3.7).taps)
    _report(6, "zero-velocity time invariance", flat and s_ok and c_ok)


def test_criterion_07_ray_sum_statistics(bundled):
    n, rays = 20000, bundled.carrier.ray_count
    sums = np.empty(n, dtype=complex)
    for r in range(n):
        phases = derive_rng(4242, "raysum", r).uniform(0, 2 * np.pi, rays)
        sums[r] = np.exp(1j * phases).sum() / math.sqrt(rays)
    power = np.abs(sums) ** 2
    mean_tol = 3 * math.sqrt(power.mean() / n)        # 3 sigma of 0
    power_tol = 3 * power.std(ddof=1) / math.sqrt(n)
    _report(7, "zero-mean unit-power ray sums",
            abs(sums.mean()) < mean_tol
            and abs(power.mean() - 1.0) < power_tol)


def test_criterion_08_figure_shapes(bundled):
    n_mc = 5000
    dq = np.linspace(0.0, 0.5, 11)
    mono_ok = True
    for sel in ("comm_static", "comm_mobile",
                "sensing_static", "sensing_mobile"):
        s = st.spatial_ccf(bundled, sel, 2.0, np.zeros_like(dq), dq,
                           n_mc, 7, workers=4)
        mag, se = np.abs(s.values), s.standard_errors
        drops = -np.diff(mag) + 3 * (se[:-1] + se[1:])
        mono_ok &= bool(np.all(drops >= 0))

    dt = np.array([0.4e-3, 0.6e-3, 0.8e-3, 1.0e-3, 1.2e-3])
    curves = {}
    for sel in ("comm_static", "comm_mobile", "sensing_mobile"):
        a = st.temporal_acf(bundled, sel, 5.0, dt, n_mc, 7, workers=4)
        curves[sel] = (np.abs(a.values), a.standard_errors)
    cs, cs_se = curves["comm_static"]
    cm, cm_se = curves["comm_mobile"]
    sm, sm_se = curves["sensing_mobile"]
    slack = 3 * (cs_se + cm_se)
    mobile_faster = bool(np.all(cm < cs - slack))
    sensing_lowest = bool(np.all(sm < cm - 3 * (cm_se + sm_se))
                          and np.all(sm < cs - 3 * (cs_se + sm_se)))
    _report(8, "figure-shape checks",
            mono_ok and mobile_faster and sensing_lowest)


def test_criterion_09_oracle_equivalence(bundled):
    # frequency response against a brute-force reimplementation
    cir = cc.comm_cir(bundled, 3, 2.0)
    f = np.linspace(-100e6, 100e6, 7)
    resp = st.frequency_response(cir, f)
    rel = 0.0
    for i in range(cir.shape[0]):
        for j in range(cir.shape[1]):
            for m, fk in enumerate(f):
                brute = sum(
                    tap.amplitude * np.exp(-2j * np.pi * fk * tap.delay)
                    for tap in cir.taps[i][j])
                rel = max(rel, abs(resp.values[i, j, m] - brute)
                          / max(abs(brute), 1e-30))
    freq_ok = rel <= 1e-12

    # spatial CCF against a from-scratch naive Monte Carlo on a single
    # static cluster (own loop, own phase draws, no engine calls)
    from conftest import minimal_doc
    doc = minimal_doc()
    doc["targets"] = []
    scn = scenario_from_dict(doc)
    dq = np.array([0.0, 0.3, 0.7])
    n_mc = 2000
    pkg = st.spatial_ccf(scn, "comm_static", 0.0, np.zeros(3), dq,
                         n_mc, 21)

    cluster = scn.comm_clusters[0]
    lam = scn.carrier.wavelength
    k = scn.carrier.wavenumber
    bs = scn.nodes.bs_tx.phase_center
    mr = scn.nodes.comm_rx.phase_center
    u_rx = scn.nodes.comm_rx.axis
    rays = realize_rays(cluster, scn.carrier, scn.seed)
    xi_t = np.linalg.norm(rays - bs, axis=1)
    xi_r = np.linalg.norm(rays - mr, axis=1)
    e_r = (rays - mr) / xi_r[:, None]
    xi_tc = np.linalg.norm(cluster.position - bs)
    xi_rc = np.linalg.norm(cluster.position - mr)
    gain = lam ** 2 / ((4 * np.pi) ** 2 * (xi_tc + xi_rc) ** 2)
    geom = (math.sqrt(gain / len(rays))
            * np.exp(-1j * k * (xi_t + xi_r)))
    steer = np.exp(2j * np.pi * dq[:, None] * (e_r @ u_rx)[None, :])
    rng = np.random.default_rng(777)
    h0 = np.empty(n_mc, dtype=complex)
    hq = np.empty((n_mc, dq.shape[0]), dtype=complex)
    for r in range(n_mc):
        ph = np.exp(1j * rng.uniform(0, 2 * np.pi, len(rays)))
        terms = geom * ph
        h0[r] = terms.sum()
        hq[r] = (terms[None, :] * steer).sum(axis=1)
    z = np.conj(h0)[:, None] * hq
    num = z.mean(axis=0)
    den = np.sqrt((np.abs(h0) ** 2).mean()
                  * (np.abs(hq) ** 2).mean(axis=0))
    naive = num / den
    naive_se = np.sqrt((np.abs(z - num) ** 2).sum(axis=0)
                       / (n_mc - 1) / n_mc) / den
    diff = np.abs(np.abs(naive) - np.abs(pkg.values))
    ccf_ok = bool(np.all(
        diff <= 3 * (naive_se + pkg.standard_errors) + 1e-12))
    _report(9, "oracle equivalence", freq_ok and ccf_ok)


def test_criterion_10_byte_determinism(tmp_path):
    def digest(path):
        return hashlib.sha256(path.read_bytes()).hexdigest()

    hashes = []
    for name, workers in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / name
        cli.main(["ccf", "--out", str(out), "--t", "2", "--N-mc", "300",
                  "--seed", "5", "--workers", str(workers),
                  "--dq-steps", "6"])
        cli.main(["acf", "--out", str(out), "--t", "2", "--N-mc", "300",
                  "--seed", "5", "--workers", str(workers),
                  "--dt-steps", "6", "--component", "comm_total"])
        hashes.append((digest(out / "ccf.csv"), digest(out / "acf.csv")))
    _report(10, "byte-identical CSV reruns",
            hashes[0] == hashes[1] == hashes[2])
