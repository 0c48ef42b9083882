"""Command-line front end.

Subcommands: simulate (closed-loop run), safeset (barrier scan), replay
(open-loop pressure playback), check (verification battery).

Exit codes: 0 success, 1 runtime fault or failed check, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from .checks import run_all
from .config import ConfigError, RunConfig, default_config, load_config
from .fileio import read_pressure_csv, write_safe_set_csv, write_trace_csv
from .material import scan_safe_set
from .sim import SimulationFault, replay, simulate
from .svgfig import line_chart, safe_set_figure, write_svg

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", metavar="PATH", help="JSON run configuration (defaults used if omitted)")
    sub.add_argument("--out", metavar="DIR", help="output directory (overrides config)")
    sub.add_argument("--plots", action="store_true", help="emit SVG figures next to the CSV output")
    sub.add_argument("--decimate", type=int, metavar="N", help="log every N-th step (overrides config)")
    sub.add_argument("--no-filter", action="store_true", help="disable the safety filter")


def _load(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else default_config()
    out = cfg.output
    if args.out is not None:
        out = dataclasses.replace(out, directory=args.out)
    if getattr(args, "plots", False):
        out = dataclasses.replace(out, plots=True)
    sim = cfg.simulation
    if args.decimate is not None:
        if args.decimate < 1:
            raise ConfigError("output.decimate", "must be >= 1")
        try:
            sim = dataclasses.replace(sim, log_stride=args.decimate)
        except ValueError as exc:
            raise ConfigError("simulation.log_stride", str(exc)) from exc
        out = dataclasses.replace(out, decimate=args.decimate)
    if getattr(args, "no_filter", False):
        sim = dataclasses.replace(sim, filter_enabled=False)
    return dataclasses.replace(cfg, simulation=sim, output=out)


def _out_dir(cfg: RunConfig) -> Path:
    path = Path(cfg.output.directory)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit_trace_plots(trace, out: Path) -> None:
    t = trace.t
    write_svg(
        line_chart(
            [("hoop", t, trace.lambda_theta), ("axial", t, trace.lambda_z)],
            "Principal stretches",
            "time [s]",
            "stretch [-]",
        ),
        out / "stretches.svg",
    )
    write_svg(
        line_chart(
            [("hoop", t, trace.dlambda_theta), ("axial", t, trace.dlambda_z)],
            "Stretch rates",
            "time [s]",
            "stretch rate [1/s]",
        ),
        out / "stretch_rates.svg",
    )
    write_svg(
        line_chart(
            [("nominal", t, trace.u_nom), ("safe", t, trace.u_safe)],
            "Pressure command",
            "time [s]",
            "pressure [Pa]",
        ),
        out / "pressures.svg",
    )
    write_svg(
        line_chart(
            [("h", t, trace.h)],
            "Barrier value",
            "time [s]",
            "h [J/m^3]",
            hline=0.0,
        ),
        out / "barrier.svg",
    )


def cmd_simulate(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    started = time.perf_counter()
    try:
        trace = simulate(cfg.simulation, cfg.safety, cfg.material, cfg.geometry)
    except SimulationFault as fault:
        if fault.trace is not None and len(fault.trace):
            write_trace_csv(fault.trace, out / "trace.csv")
            print(f"fault: {fault}; partial trace ({len(fault.trace)} rows) written to {out / 'trace.csv'}", file=sys.stderr)
        else:
            print(f"fault: {fault}", file=sys.stderr)
        return EXIT_RUNTIME
    elapsed = time.perf_counter() - started
    write_trace_csv(trace, out / "trace.csv")
    if cfg.output.plots:
        _emit_trace_plots(trace, out)
    print(
        f"simulate: {len(trace)} rows in {elapsed:.2f} s, min h = {trace.h.min():.6g} J/m^3, "
        f"filter active {int(trace.active.sum())} steps -> {out / 'trace.csv'}"
    )
    return EXIT_OK


def cmd_safeset(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    ss = cfg.safe_set
    grid = scan_safe_set(
        cfg.material,
        cfg.safety.w_safe,
        (ss.theta_min, ss.theta_max),
        (ss.z_min, ss.z_max),
        (ss.n_theta, ss.n_z),
    )
    write_safe_set_csv(grid, out / "safe_set.csv")
    if cfg.output.plots:
        write_svg(safe_set_figure(grid), out / "safe_set.svg")
    share = float((grid.h_values > 0).mean())
    print(
        f"safeset: {grid.h_values.shape[0]}x{grid.h_values.shape[1]} grid, "
        f"{share:.1%} safe -> {out / 'safe_set.csv'}"
    )
    return EXIT_OK


def cmd_replay(args) -> int:
    cfg = _load(args)
    out = _out_dir(cfg)
    try:
        times, pressures = read_pressure_csv(args.pressure_csv)
    except (FileNotFoundError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        trace = replay(
            cfg.simulation,
            cfg.safety,
            cfg.material,
            cfg.geometry,
            times,
            pressures,
            interpolation=args.interpolation,
        )
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SimulationFault as fault:
        if fault.trace is not None and len(fault.trace):
            write_trace_csv(fault.trace, out / "replay_trace.csv")
        print(f"fault: {fault}", file=sys.stderr)
        return EXIT_RUNTIME
    write_trace_csv(trace, out / "replay_trace.csv")
    if cfg.output.plots:
        _emit_trace_plots(trace, out)
    print(f"replay: {len(trace)} rows, min h = {trace.h.min():.6g} J/m^3 -> {out / 'replay_trace.csv'}")
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    perturbation = 1e-3 if args.inject_gradient_fault else 0.0
    results = run_all(cfg.material, cfg.geometry, cfg.safety, gradient_perturbation=perturbation)
    for res in results:
        print(res.line())
    failed = [r for r in results if not r.passed]
    print(f"check: {len(results) - len(failed)}/{len(results)} passed")
    return EXIT_OK if not failed else EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="strainsafe",
        description="Strain-energy safety filtering for a pressurized hyperelastic tube",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_sim = subs.add_parser("simulate", help="closed-loop simulation with the safety filter")
    _add_common_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_set = subs.add_parser("safeset", help="scan the material safe set on a stretch grid")
    _add_common_flags(p_set)
    p_set.set_defaults(func=cmd_safeset)

    p_rep = subs.add_parser("replay", help="open-loop playback of a recorded pressure history")
    p_rep.add_argument("pressure_csv", help="CSV with header t,pressure_pa")
    p_rep.add_argument(
        "--interpolation",
        choices=("hold", "linear"),
        default="hold",
        help="between-sample reconstruction (hold matches exported traces)",
    )
    _add_common_flags(p_rep)
    p_rep.set_defaults(func=cmd_replay)

    p_chk = subs.add_parser("check", help="run the verification battery")
    p_chk.add_argument("--inject-gradient-fault", action="store_true", help=argparse.SUPPRESS)
    _add_common_flags(p_chk)
    p_chk.set_defaults(func=cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
