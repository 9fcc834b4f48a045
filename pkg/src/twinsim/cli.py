"""Command line interface: run / sweep / replay."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .harness import export_results, run_case
from .scenario import ScenarioError, load_scenario


def load_trace(path: str | Path) -> list[tuple[float, float, float]]:
    """Read a teleop trace CSV of (t_seconds, v, omega); header optional."""
    rows: list[tuple[float, float, float]] = []
    with Path(path).open(newline="", encoding="utf-8") as f:
        for rec in csv.reader(f):
            if not rec:
                continue
            try:
                rows.append((float(rec[0]), float(rec[1]), float(rec[2])))
            except ValueError:
                continue  # header line
    return rows


def save_trace(path: str | Path, rows: list[tuple[float, float, float]]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(["t_seconds", "v", "omega"])
        for t, v, om in rows:
            w.writerow([repr(float(t)), repr(float(v)), repr(float(om))])


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scenario", required=True,
                   help="scenario file path or bundled scenario name")
    p.add_argument("--seed", type=int, default=None, help="override scenario seed")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--case-override", choices=["RO", "MT", "DT", "ST"], default=None)


def _overrides_for_seed(seed: int | None) -> dict:
    return {} if seed is None else {"seed": seed}


def cmd_run(args: argparse.Namespace) -> int:
    scn = load_scenario(args.scenario, case_override=args.case_override,
                        overrides=_overrides_for_seed(args.seed))
    trace = load_trace(args.trace) if args.trace else None
    if scn.case_id == "MT" and trace is None and args.serve is None:
        print("error: MT needs --trace (deterministic replay) or --serve (live session)",
              file=sys.stderr)
        return 2

    hooks = None
    server = None
    if args.serve is not None:
        from .bridge import BridgeHooks, BridgeServer

        server = BridgeServer(case_id=scn.case_id,
                              command_enabled=scn.case_id == "MT" and trace is None,
                              v_max=scn.dwa.v_max, omega_max=scn.dwa.omega_max,
                              port=args.serve)
        server.start()
        hooks = BridgeHooks(server, realtime=not args.no_realtime)

    try:
        report = run_case(scn, hooks=hooks, trace=trace)
    finally:
        if server is not None:
            server.stop()

    paths = export_results(report, args.out)
    if server is not None and server.trace_rows:
        save_trace(Path(args.out) / "trace.csv", server.trace_rows)
    status = report.mission_status
    print(f"case {report.case_id} finished: mission={status} "
          f"goals={sum(report.success)}/{len(report.success)} "
          f"collisions={report.collision_count} -> {paths['report']}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    values = [float(v) for v in args.values.split(",") if v != ""]
    if not values:
        print("error: --values must list at least one number", file=sys.stderr)
        return 2
    out_root = Path(args.out)
    out_root.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for value in values:
        overrides = _overrides_for_seed(args.seed)
        overrides[args.param] = value
        scn = load_scenario(args.scenario, case_override=args.case_override,
                            overrides=overrides)
        report = run_case(scn)
        run_dir = out_root / f"{args.param.replace('.', '_')}={value:g}"
        export_results(report, run_dir)
        summary_rows.append({
            "value": value,
            "mean_tracking_error": report.mean_tracking_error,
            "collision_count": report.collision_count,
            "goals_succeeded": sum(report.success),
            "mission_status": report.mission_status,
        })
        print(f"{args.param}={value:g}: tracking="
              f"{report.mean_tracking_error if report.mean_tracking_error is not None else 'n/a'}"
              f" collisions={report.collision_count}")
    with (out_root / "sweep_summary.csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.DictWriter(f, fieldnames=list(summary_rows[0].keys()))
        w.writeheader()
        w.writerows(summary_rows)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    args.trace = args.trace
    args.serve = None
    args.no_realtime = True
    if args.case_override is None:
        args.case_override = "MT"
    return cmd_run(args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twinsim",
                                     description="two-site simulation-twin experiment runner")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment case")
    _add_common(p_run)
    p_run.add_argument("--trace", default=None, help="teleop trace CSV for MT replay")
    p_run.add_argument("--serve", type=int, nargs="?", const=8700, default=None,
                       metavar="PORT", help="expose the live bridge endpoint")
    p_run.add_argument("--no-realtime", action="store_true",
                       help="with --serve: run at full speed instead of wall clock")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--param", required=True,
                         help="dotted scenario path, e.g. net.cmd_vel.base_delay")
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.set_defaults(func=cmd_sweep)

    p_replay = sub.add_parser("replay", help="replay a recorded teleop trace (MT)")
    _add_common(p_replay)
    p_replay.add_argument("--trace", required=True)
    p_replay.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
