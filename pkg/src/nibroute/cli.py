"""Command-line entry point: ``nibroute plan|eval|sweep``.

Exit codes: 0 success, 1 parse or validation error, 2 infeasible mission
or trajectory, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .errors import InfeasibleError, ScenarioError
from .evaluator import RateTimeline, evaluate_trajectory, snr_sweep
from .geometry import Position, Trajectory
from .planner import PlanResult, plan_rate_max, plan_uniform_shortest
from .scenario import Scenario, load_scenario, scenario_digest

STRATEGIES = ("rate_max", "shortest", "rate_max_cellular_only")
STRATEGY_FILTER = {"rate_max": None, "shortest": None, "rate_max_cellular_only": ("cellular",)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(v: float) -> str:
    return repr(float(v))


def parse_offsets(spec: str) -> list[float]:
    """``start:stop:step`` with ``stop`` inclusive."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"offsets must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UsageError(f"offsets must be numeric, got {spec!r}") from None
    if start == stop:
        return [start]
    if step <= 0 or stop < start:
        raise UsageError(f"offsets need stop >= start and step > 0, got {spec!r}")
    n = int((stop - start) / step + 1e-9) + 1
    return [start + i * step for i in range(n)]


def read_scenario(path: str) -> Scenario:
    text = Path(path).read_text(encoding="utf-8")
    return load_scenario(text)


def run_strategy(scenario: Scenario, strategy: str, threads: Optional[int]) -> PlanResult:
    if strategy == "shortest":
        return plan_uniform_shortest(scenario)
    return plan_rate_max(scenario, STRATEGY_FILTER[strategy], threads=threads)


def write_path(path: Path, traj: Trajectory) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "x_km", "y_km"])
        for t, p in traj.samples:
            w.writerow([_fmt(t), _fmt(p.x_km), _fmt(p.y_km)])


def read_path(path: Path) -> Trajectory:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t_s", "x_km", "y_km"]:
        raise UsageError(f"{path}: expected header t_s,x_km,y_km")
    times, positions = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            t, x, y = (float(c) for c in row)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: expected three numbers") from None
        times.append(t)
        positions.append(Position(x, y))
    try:
        return Trajectory.from_points(times, positions)
    except ValueError as exc:
        raise UsageError(f"{path}: {exc}") from None


def write_timeline(path: Path, tl: RateTimeline) -> None:
    ids = list(tl.per_network_bits)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_s", "chosen_network", *(f"rate_bps_{i}" for i in ids), "step_bits"])
        for st in tl.steps:
            rates = {s.network_id: s.rate_bps for s in st.samples}
            w.writerow([_fmt(st.t_end_s), st.chosen_id, *(_fmt(rates[i]) for i in ids), _fmt(st.step_bits)])


def write_summary(path: Path, tl: RateTimeline) -> None:
    ids = list(tl.per_network_bits)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["objective_bits", "average_rate_bps", *(f"bits_{i}" for i in ids), "effort_proxy"])
        w.writerow([_fmt(tl.total_bits), _fmt(tl.average_rate_bps),
                    *(_fmt(tl.per_network_bits[i]) for i in ids), _fmt(tl.effort_proxy)])


def write_report(prefix: str, scenario: Scenario, command: str, params: dict,
                 tl: RateTimeline, started: float) -> None:
    report = {
        "scenario_digest": scenario_digest(scenario),
        "command": command,
        "parameters": params,
        "total_bits": tl.total_bits,
        "per_network_bits": {str(k): v for k, v in tl.per_network_bits.items()},
        "effort_proxy": tl.effort_proxy,
        "wall_clock_s": time.perf_counter() - started,
    }
    Path(f"{prefix}.report.json").write_text(json.dumps(report, indent=2) + "\n")


def cmd_plan(args) -> int:
    started = time.perf_counter()
    scenario = read_scenario(args.scenario)
    result = run_strategy(scenario, args.strategy, args.threads)
    write_path(Path(f"{args.out}.path.csv"), result.trajectory)
    write_timeline(Path(f"{args.out}.timeline.csv"), result.timeline)
    write_summary(Path(f"{args.out}.summary.csv"), result.timeline)
    write_report(args.out, scenario, "plan", {"strategy": args.strategy}, result.timeline, started)
    return 0


def cmd_eval(args) -> int:
    started = time.perf_counter()
    scenario = read_scenario(args.scenario)
    traj = read_path(Path(args.path))
    tl = evaluate_trajectory(traj, scenario, STRATEGY_FILTER[args.strategy])
    write_timeline(Path(f"{args.out}.timeline.csv"), tl)
    write_summary(Path(f"{args.out}.summary.csv"), tl)
    write_report(args.out, scenario, "eval", {"path": args.path}, tl, started)
    return 0


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    offsets = parse_offsets(args.offsets)
    scenario = read_scenario(args.scenario)
    result = run_strategy(scenario, args.strategy, args.threads)
    net_filter = STRATEGY_FILTER[args.strategy]
    rows = snr_sweep(result.trajectory, scenario, offsets, net_filter)
    duration = scenario.total_time_s
    ids = list(result.timeline.per_network_bits)
    with open(f"{args.out}.sweep.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["offset_db", "total_bits", "average_rate_bps", *(f"bits_{i}" for i in ids)])
        for off, total, per in rows:
            w.writerow([_fmt(off), _fmt(total), _fmt(total / duration), *(_fmt(per[i]) for i in ids)])
    write_report(args.out, scenario, "sweep", {"strategy": args.strategy, "offsets": args.offsets},
                 result.timeline, started)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nibroute", description="Plan and score ship-fleet paths over maritime networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, strategy=True):
        p.add_argument("--scenario", required=True, help="scenario JSON file")
        p.add_argument("--out", required=True, help="output file prefix")
        if strategy:
            p.add_argument("--strategy", choices=STRATEGIES, default="rate_max")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="planner threads (results identical for any value)")

    p = sub.add_parser("plan", help="plan a trajectory and write path/timeline/summary CSVs")
    common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("eval", help="score a path CSV against a scenario")
    common(p)
    p.add_argument("--path", required=True, help="path CSV (t_s,x_km,y_km)")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="rate versus uniform SNR offset along a planned path")
    common(p)
    p.add_argument("--offsets", required=True, help="start:stop:step in dB, stop inclusive")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
