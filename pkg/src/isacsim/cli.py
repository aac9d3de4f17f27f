"""Command-line front end: scenario validation, CIR dumps, CCF/ACF
sweeps, frequency responses, cross-channel correlation, and the preset
bundled-scenario experiments.

All outputs are CSV with full-precision floats; a fixed (scenario file,
arguments) pair produces byte-identical files across runs and worker
counts.

Exit codes: 0 success, 2 scenario parse failure, 3 validation failure,
4 degenerate geometry, 5 undefined correlation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import comm_channel, scenario as scn_mod, sensing_channel, statistics
from .errors import (DegenerateGeometryError, ScenarioConfigError,
                     UndefinedCorrelationError)

EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_GEOMETRY = 4
EXIT_CORRELATION = 5

FIG2_COMPONENTS = ("comm_static", "comm_mobile",
                   "sensing_static", "sensing_mobile")
FIG3_COMPONENTS = ("comm_static", "comm_mobile", "sensing_mobile")


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: Path, header: list[str], rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _correlation_rows(lag_values, series_list):
    for i, lag in enumerate(lag_values):
        row = [_fmt(lag)]
        for s in series_list:
            v = s.values[i]
            row += [_fmt(v.real), _fmt(v.imag), _fmt(abs(v)),
                    _fmt(s.standard_errors[i])]
        yield row


def _correlation_header(lag_name: str, components) -> list[str]:
    header = [lag_name]
    for c in components:
        header += [f"{c}_re", f"{c}_im", f"{c}_abs", f"{c}_se"]
    return header


def _load(args) -> scn_mod.Scenario:
    path = args.scenario or scn_mod.bundled_scenario_path()
    try:
        scenario = scn_mod.load_scenario(path)
    except (json.JSONDecodeError, OSError, KeyError, ValueError,
            ScenarioConfigError) as exc:
        print(f"error: cannot parse scenario {path}: {exc}",
              file=sys.stderr)
        raise SystemExit(EXIT_PARSE)
    violations = scn_mod.validate(scenario)
    if violations:
        for v in violations:
            print(f"violation: {v}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)
    return scenario


def _run_ccf(scenario, args, components, t, out_name):
    dq = np.linspace(0.0, args.dq_max, args.dq_steps)
    dp = np.zeros_like(dq)
    series = [statistics.spatial_ccf(
        scenario, c, t, dp, dq, args.n_mc, args.seed,
        ensemble=args.ensemble, workers=args.workers)
        for c in components]
    _write_csv(Path(args.out) / out_name,
               _correlation_header("lag_dq_wavelengths", components),
               _correlation_rows(dq, series))


def _run_acf(scenario, args, components, t, out_name):
    dt = np.linspace(0.0, args.dt_max, args.dt_steps)
    series = [statistics.temporal_acf(
        scenario, c, t, dt, args.n_mc, args.seed,
        ensemble=args.ensemble, workers=args.workers)
        for c in components]
    _write_csv(Path(args.out) / out_name,
               _correlation_header("lag_dt_seconds", components),
               _correlation_rows(dt, series))


def _cmd_validate(args) -> None:
    _load(args)
    print("scenario valid")


def _cmd_cir(args) -> None:
    scenario = _load(args)
    rows_s = []
    cir_s = sensing_channel.sensing_cir(scenario, args.t)
    for p in range(cir_s.shape[0]):
        for q in range(cir_s.shape[1]):
            for tap in cir_s.taps[p][q]:
                rows_s.append([str(p + 1), str(q + 1), tap.source,
                               _fmt(tap.delay), _fmt(tap.amplitude.real),
                               _fmt(tap.amplitude.imag)])
    _write_csv(Path(args.out) / "cir_sensing.csv",
               ["p", "q", "source", "delay_s", "re", "im"], rows_s)

    rows_c = []
    cir_c = comm_channel.comm_cir(scenario, args.seed, args.t)
    for p in range(cir_c.shape[0]):
        for q in range(cir_c.shape[1]):
            for tap in cir_c.taps[p][q]:
                rows_c.append([str(p + 1), str(q + 1), tap.source,
                               _fmt(tap.delay), _fmt(tap.amplitude.real),
                               _fmt(tap.amplitude.imag)])
    _write_csv(Path(args.out) / "cir_comm.csv",
               ["p", "q", "source", "delay_s", "re", "im"], rows_c)


def _cmd_ccf(args) -> None:
    scenario = _load(args)
    _run_ccf(scenario, args, args.component, args.t, "ccf.csv")


def _cmd_acf(args) -> None:
    scenario = _load(args)
    _run_acf(scenario, args, args.component, args.t, "acf.csv")


def _cmd_freq(args) -> None:
    scenario = _load(args)
    f = np.linspace(-args.f_max, args.f_max, args.f_steps)
    if args.channel == "sensing":
        cir = sensing_channel.sensing_cir(scenario, args.t)
    else:
        cir = comm_channel.comm_cir(scenario, args.seed, args.t)
    resp = statistics.frequency_response(cir, f)
    rows = []
    for i in range(resp.values.shape[0]):
        for j in range(resp.values.shape[1]):
            for k, fk in enumerate(f):
                v = resp.values[i, j, k]
                rows.append([_fmt(fk), str(i + 1), str(j + 1),
                             _fmt(v.real), _fmt(v.imag)])
    _write_csv(Path(args.out) / f"freq_{args.channel}.csv",
               ["f_hz", "p", "q", "re", "im"], rows)


def _cmd_xcorr(args) -> None:
    scenario = _load(args)
    result = statistics.cross_channel_correlation(
        scenario, args.t, args.n_mc, args.seed)
    _write_csv(Path(args.out) / "xcorr.csv",
               ["t_s", "re", "im", "abs", "se"],
               [[_fmt(result.t), _fmt(result.value.real),
                 _fmt(result.value.imag), _fmt(abs(result.value)),
                 _fmt(result.standard_error)]])


def _cmd_fig2(args) -> None:
    scenario = _load(args)
    _run_ccf(scenario, args, FIG2_COMPONENTS, 2.0, "fig2_ccf.csv")


def _cmd_fig3(args) -> None:
    scenario = _load(args)
    _run_acf(scenario, args, FIG3_COMPONENTS, 5.0, "fig3_acf.csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacsim",
        description="Vehicular ISAC channel simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, mc_default=1000):
        p.add_argument("--scenario", type=Path, default=None,
                       help="scenario JSON (default: bundled scenario)")
        p.add_argument("--out", type=Path, default=Path("out"))
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--N-mc", dest="n_mc", type=int, default=mc_default)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--ensemble", choices=("phases", "full"),
                       default="phases")

    p = sub.add_parser("validate", help="validate a scenario file")
    p.add_argument("--scenario", type=Path, default=None)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("cir", help="dump sensing and comm CIR taps")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=_cmd_cir)

    p = sub.add_parser("ccf", help="spatial CCF sweep over Delta-q")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--dq-max", type=float, default=2.0,
                   help="max receive spacing in wavelengths")
    p.add_argument("--dq-steps", type=int, default=41)
    p.add_argument("--component", action="append",
                   choices=statistics.SELECTORS,
                   default=None)
    p.set_defaults(func=_cmd_ccf)

    p = sub.add_parser("acf", help="temporal ACF sweep over Delta-t")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--dt-max", type=float, default=0.05,
                   help="max time lag in seconds")
    p.add_argument("--dt-steps", type=int, default=51)
    p.add_argument("--component", action="append",
                   choices=statistics.SELECTORS,
                   default=None)
    p.set_defaults(func=_cmd_acf)

    p = sub.add_parser("freq", help="frequency response dump")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.add_argument("--channel", choices=("sensing", "comm"),
                   default="sensing")
    p.add_argument("--f-max", type=float, default=100e6)
    p.add_argument("--f-steps", type=int, default=101)
    p.set_defaults(func=_cmd_freq)

    p = sub.add_parser("xcorr",
                       help="sensing/communication cross-correlation")
    common(p)
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=_cmd_xcorr)

    p = sub.add_parser("fig2", help="preset spatial CCF experiment (t=2 s)")
    common(p, mc_default=5000)
    p.add_argument("--dq-max", type=float, default=2.0)
    p.add_argument("--dq-steps", type=int, default=41)
    p.set_defaults(func=_cmd_fig2)

    p = sub.add_parser("fig3", help="preset temporal ACF experiment (t=5 s)")
    common(p, mc_default=5000)
    p.add_argument("--dt-max", type=float, default=0.05)
    p.add_argument("--dt-steps", type=int, default=51)
    p.set_defaults(func=_cmd_fig3)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "component", "x") is None:
        args.component = ["comm_total", "sensing_total"]
    try:
        args.func(args)
    except SystemExit:
        raise
    except DegenerateGeometryError as exc:
        print(f"error: degenerate geometry: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except UndefinedCorrelationError as exc:
        print(f"error: undefined correlation: {exc}", file=sys.stderr)
        return EXIT_CORRELATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
