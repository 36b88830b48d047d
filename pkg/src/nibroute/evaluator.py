"""Scoring of trajectories: per-step serving network, data totals, sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import InfeasibleError
from .geometry import Position, Trajectory, distance, ferry_position_at, segment_speed_kmh, speed_ok
from .grid import CellGrid
from .link_budget import LinkSample, NetworkNode, pick_best, sample_link
from .scenario import Scenario

HORIZON_TOL_S = 1e-6


@dataclass(frozen=True)
class StepRecord:
    t_start_s: float
    t_end_s: float
    position: Position
    samples: tuple[LinkSample, ...]
    chosen_id: int
    step_bits: float

    @property
    def chosen(self) -> LinkSample:
        return next(s for s in self.samples if s.network_id == self.chosen_id)


@dataclass(frozen=True)
class RateTimeline:
    steps: tuple[StepRecord, ...]
    per_network_bits: dict[int, float]
    total_bits: float
    effort_proxy: float

    @property
    def duration_s(self) -> float:
        return self.steps[-1].t_end_s - self.steps[0].t_start_s if self.steps else 0.0

    @property
    def average_rate_bps(self) -> float:
        return self.total_bits / self.duration_s if self.steps else 0.0

    def portions(self) -> dict[int, float]:
        if self.total_bits == 0:
            return {k: 0.0 for k in self.per_network_bits}
        return {k: v / self.total_bits for k, v in self.per_network_bits.items()}


def check_kinematics(traj: Trajectory, scenario: Scenario) -> None:
    """Raise InfeasibleError unless the trajectory respects v_max and the horizon."""
    for (t0, p0), (t1, p1) in zip(traj.samples, traj.samples[1:]):
        if not speed_ok(p0, p1, t1 - t0, scenario.v_max_kmh):
            v = segment_speed_kmh(p0, p1, t1 - t0)
            raise InfeasibleError(
                f"speed {v:.3f} km/h between t={t0:g}s and t={t1:g}s exceeds "
                f"v_max {scenario.v_max_kmh:g} km/h")
    t_end = traj.samples[-1][0]
    if abs(t_end - scenario.total_time_s) > HORIZON_TOL_S:
        raise InfeasibleError(
            f"trajectory ends at t={t_end:g}s, mission horizon is {scenario.total_time_s:g}s")


def evaluate_trajectory(traj: Trajectory, scenario: Scenario,
                        network_filter: Optional[Iterable[str]] = None,
                        offset_db: float = 0.0) -> RateTimeline:
    """Serve each interval from the best network at its end point and midpoint time.

    ``offset_db`` raises every link's SNR uniformly before the rate is computed.
    """
    check_kinematics(traj, scenario)
    nodes = scenario.select(network_filter)
    steps = []
    effort = 0.0
    for (t0, p0), (t1, p1) in zip(traj.samples, traj.samples[1:]):
        t_mid = 0.5 * (t0 + t1)
        samples = tuple(sample_link(n, p1, t_mid, scenario.noise_figure_db, offset_db) for n in nodes)
        best = pick_best(samples)
        steps.append(StepRecord(t0, t1, p1, samples, best.network_id, (t1 - t0) * best.rate_bps))
        effort += (t1 - t0) * segment_speed_kmh(p0, p1, t1 - t0) ** 3
    per_network = {n.id: math.fsum(s.step_bits for s in steps if s.chosen_id == n.id) for n in nodes}
    total = math.fsum(per_network.values())
    return RateTimeline(tuple(steps), per_network, total, effort)


def snr_sweep(traj: Trajectory, scenario: Scenario, offsets_db: Sequence[float],
              network_filter: Optional[Iterable[str]] = None
              ) -> list[tuple[float, float, dict[int, float]]]:
    rows = []
    for off in offsets_db:
        tl = evaluate_trajectory(traj, scenario, network_filter, offset_db=off)
        rows.append((off, tl.total_bits, tl.per_network_bits))
    return rows


def time_within_range(traj: Trajectory, node: NetworkNode, range_km: Optional[float] = None) -> float:
    """Seconds of mission time the fleet spends within ``range_km`` of a ferry node.

    Each interval is judged at its end point and midpoint time, the same
    sampling the rate accounting uses. ``range_km`` defaults to the node's
    own cut-off.
    """
    if node.ferry_route is None:
        raise ValueError("node has no ferry route")
    rng = node.max_range_km if range_km is None else range_km
    if rng is None:
        raise ValueError("no range given and node has no max_range_km")
    total = 0.0
    for (t0, _), (t1, p1) in zip(traj.samples, traj.samples[1:]):
        if distance(p1, ferry_position_at(node.ferry_route, 0.5 * (t0 + t1))) <= rng:
            total += t1 - t0
    return total


def mission_violations(traj: Trajectory, scenario: Scenario) -> list[str]:
    """Everything wrong with ``traj`` as a mission plan; empty when compliant.

    Waypoints are matched in order by grid cell; each needs one contiguous
    stay of at least its dwell time, starting no earlier than the end of
    the previous waypoint's dwell.
    """
    problems = []
    try:
        check_kinematics(traj, scenario)
    except InfeasibleError as exc:
        problems.append(str(exc))
    grid = CellGrid.for_scenario(scenario)
    cells = [grid.cell_of(p) for p in traj.positions]
    times = traj.times
    if cells[0] != grid.cell_of(scenario.start):
        problems.append("does not start in the start cell")
    if cells[-1] != grid.cell_of(scenario.end):
        problems.append("does not end in the end cell")
    ptr = 0
    for k, wp in enumerate(scenario.waypoints):
        w = grid.cell_of(wp.position)
        done = None
        j = ptr
        while j < len(cells) and done is None:
            if cells[j] == w:
                e = j
                while e < len(cells) and cells[e] == w:
                    if times[e] - times[j] >= wp.dwell_s - 1e-9:
                        done = e
                        break
                    e += 1
                if done is None:
                    j = e
            else:
                j += 1
        if done is None:
            problems.append(f"waypoint {k}: no contiguous {wp.dwell_s:g}s dwell")
            break
        ptr = done
    return problems
