"""Trajectory planning over a space-time grid.

The rate-maximised planner runs an exact dynamic programme over states
``(cell, step, stage, dwell_progress)``. Stage counts completed waypoints;
dwell progress counts consecutive steps already spent in the pending
waypoint's cell. Rewards are the bits delivered during a step, evaluated
at the destination cell centre and the step's midpoint time.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

from . import _dp
from .errors import InfeasibleError, ProblemTooLarge
from .evaluator import RateTimeline, evaluate_trajectory
from .geometry import Position, Trajectory, distance, speed_ok
from .grid import CellGrid
from .link_budget import link_arrays
from .scenario import Scenario

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class PlanResult:
    trajectory: Trajectory
    timeline: RateTimeline
    objective_bits: float
    strategy: str = ""


def step_times(scenario: Scenario) -> list[float]:
    dt = scenario.grid.dt_s
    return [k * dt for k in range(scenario.n_steps + 1)]


def check_budget(scenario: Scenario) -> None:
    """Reject missions whose straight-line tour cannot fit in the horizon."""
    pts = [scenario.start, *(w.position for w in scenario.waypoints), scenario.end]
    length = sum(distance(a, b) for a, b in zip(pts, pts[1:]))
    travel = length / scenario.v_max_kmh * 3600.0
    dwell = sum(w.dwell_s for w in scenario.waypoints)
    if travel + dwell > scenario.total_time_s + 1e-9:
        raise InfeasibleError(
            f"time budget exceeded: tour of {length:.3f} km needs {travel:.1f}s at "
            f"{scenario.v_max_kmh:g} km/h plus {dwell:g}s dwell, "
            f"total_time_s is {scenario.total_time_s:g}s")


def reward_table(scenario: Scenario, grid: CellGrid,
                 network_filter: Optional[Iterable[str]] = None) -> np.ndarray:
    """Bits delivered by the best network during each step, per destination cell.

    Shape ``(n_steps, n_cells)``.
    """
    nodes = scenario.select(network_filter)
    xs, ys = grid.centers
    times = step_times(scenario)
    table = np.empty((scenario.n_steps, grid.n_cells))
    for k, (t0, t1) in enumerate(zip(times, times[1:])):
        t_mid = 0.5 * (t0 + t1)
        rates = [link_arrays(n, xs, ys, t_mid, scenario.noise_figure_db).rate_bps for n in nodes]
        table[k] = (t1 - t0) * np.maximum.reduce(rates)
    return table


@dataclass
class StateGraph:
    """Predecessor lists of the time-invariant transition graph, CSR by target."""

    indptr: np.ndarray
    preds: np.ndarray
    state_cell: np.ndarray
    initial: int
    terminal: int

    @property
    def n_states(self) -> int:
        return len(self.state_cell)


def build_state_graph(scenario: Scenario, grid: CellGrid) -> StateGraph:
    nc = grid.n_cells
    nx, ny = grid.nx, grid.ny
    wcells = [grid.cell_of(w.position) for w in scenario.waypoints]
    dwell = scenario.dwell_steps()
    n_wp = len(wcells)

    # dwell-progress states G(s, p), p = 1..D_s-1, follow the free states F(s, c)
    g_index: dict[tuple[int, int], int] = {}
    nxt = (n_wp + 1) * nc
    for s in range(n_wp):
        for p in range(1, dwell[s]):
            g_index[s, p] = nxt
            nxt += 1
    n_states = nxt

    # fnorm[s][c]: free state after arriving at c in stage s, zero-dwell
    # waypoints completing on arrival
    fnorm = np.empty((n_wp + 1, nc), dtype=np.int64)
    fnorm[n_wp] = n_wp * nc + np.arange(nc)
    for s in range(n_wp - 1, -1, -1):
        fnorm[s] = s * nc + np.arange(nc)
        if dwell[s] == 0:
            fnorm[s, wcells[s]] = fnorm[s + 1, wcells[s]]

    def stay_target(s: int, q: int) -> int:
        return int(fnorm[s + 1, wcells[s]]) if q == dwell[s] else g_index[s, q]

    stencil = grid.stencil(scenario.grid.dt_s, scenario.v_max_kmh)
    src_parts, tgt_parts = [], []
    ii = np.tile(np.arange(nx), ny)
    jj = np.repeat(np.arange(ny), nx)
    for di, dj in stencil:
        ok = (ii + di >= 0) & (ii + di < nx) & (jj + dj >= 0) & (jj + dj < ny)
        src = np.nonzero(ok)[0]
        tgt_cell = src + di + dj * nx
        for s in range(n_wp + 1):
            tgt = fnorm[s, tgt_cell].copy()
            if (di, dj) == (0, 0) and s < n_wp and dwell[s] > 0:
                tgt[src == wcells[s]] = stay_target(s, 1)
            src_parts.append(s * nc + src)
            tgt_parts.append(tgt)
    extra_src, extra_tgt = [], []
    for (s, p), g in g_index.items():
        w = wcells[s]
        wi, wj = w % nx, w // nx
        for di, dj in stencil:
            if not (0 <= wi + di < nx and 0 <= wj + dj < ny):
                continue
            extra_src.append(g)
            if (di, dj) == (0, 0):
                extra_tgt.append(stay_target(s, p + 1))
            else:
                extra_tgt.append(int(fnorm[s, w + di + dj * nx]))
    src_parts.append(np.asarray(extra_src, dtype=np.int64))
    tgt_parts.append(np.asarray(extra_tgt, dtype=np.int64))
    preds = np.concatenate(src_parts).astype(np.int64)
    targets = np.concatenate(tgt_parts).astype(np.int64)

    order = np.lexsort((preds, targets))
    preds, targets = preds[order], targets[order]
    indptr = np.searchsorted(targets, np.arange(n_states + 1)).astype(np.int64)

    state_cell = np.empty(n_states, dtype=np.int64)
    state_cell[: (n_wp + 1) * nc] = np.tile(np.arange(nc), n_wp + 1)
    for (s, _), g in g_index.items():
        state_cell[g] = wcells[s]
    return StateGraph(
        indptr=indptr,
        preds=np.ascontiguousarray(preds),
        state_cell=state_cell,
        initial=int(fnorm[0, grid.cell_of(scenario.start)]),
        terminal=int(fnorm[n_wp, grid.cell_of(scenario.end)]),
    )


def _trajectory_from_cells(scenario: Scenario, grid: CellGrid, cells: list[int]) -> Trajectory:
    return Trajectory.from_points(step_times(scenario), [grid.center(c) for c in cells])


def plan_rate_max(scenario: Scenario, network_filter: Optional[Iterable[str]] = None,
                  threads: Optional[int] = None, backend: Optional[str] = None) -> PlanResult:
    """Exact optimum of the discretised rate-maximisation problem."""
    scenario.select(network_filter)  # empty filter fails before any planning work
    check_budget(scenario)
    grid = CellGrid.for_scenario(scenario)
    table = reward_table(scenario, grid, network_filter)
    graph = build_state_graph(scenario, grid)
    kernel = _dp.get_backend(backend)
    nthreads = threads or os.cpu_count() or 1

    n_steps = scenario.n_steps
    values = np.full((n_steps + 1, graph.n_states), -np.inf)
    values[0, graph.initial] = 0.0
    for k in range(n_steps):
        reward = np.ascontiguousarray(table[k][graph.state_cell])
        kernel(values[k], graph.indptr, graph.preds, reward, values[k + 1], nthreads)

    objective = values[n_steps, graph.terminal]
    if not np.isfinite(objective):
        raise InfeasibleError(
            "no grid path reaches the end cell through all waypoint dwells within "
            f"total_time_s = {scenario.total_time_s:g}s at v_max = {scenario.v_max_kmh:g} km/h")

    # backtrack: first maximal predecessor, i.e. the lowest state index
    state = graph.terminal
    cells = [int(graph.state_cell[state])]
    for k in range(n_steps, 0, -1):
        cand = graph.preds[graph.indptr[state]: graph.indptr[state + 1]]
        state = int(cand[np.argmax(values[k - 1][cand])])
        cells.append(int(graph.state_cell[state]))
    cells.reverse()

    traj = _trajectory_from_cells(scenario, grid, cells)
    timeline = evaluate_trajectory(traj, scenario, network_filter)
    name = "rate_max" if network_filter is None else "rate_max[" + ",".join(sorted(network_filter)) + "]"
    return PlanResult(traj, timeline, float(objective), name)


def plan_uniform_shortest(scenario: Scenario) -> PlanResult:
    """Straight legs through the waypoints at the one speed that fills the horizon."""
    check_budget(scenario)
    pts = [scenario.start, *(w.position for w in scenario.waypoints), scenario.end]
    dwells = [0.0, *(w.dwell_s for w in scenario.waypoints)]
    legs = [distance(a, b) for a, b in zip(pts, pts[1:])]
    travel_time = scenario.total_time_s - sum(dwells)
    speed = sum(legs) / (travel_time / 3600.0)

    # phases: (t_begin, t_end, from, to); dwell phases have from == to
    phases = []
    t = 0.0
    for i, leg in enumerate(legs):
        if dwells[i] > 0:
            phases.append((t, t + dwells[i], pts[i], pts[i]))
            t += dwells[i]
        dur = leg / speed * 3600.0 if speed > 0 else 0.0
        if dur > 0:
            phases.append((t, t + dur, pts[i], pts[i + 1]))
            t += dur
    if not phases:
        phases.append((0.0, scenario.total_time_s, pts[0], pts[0]))

    def pos_at(tq: float) -> Position:
        for t0, t1, a, b in phases:
            if tq <= t1:
                f = 0.0 if t1 == t0 else min(max((tq - t0) / (t1 - t0), 0.0), 1.0)
                return Position(a.x_km + f * (b.x_km - a.x_km), a.y_km + f * (b.y_km - a.y_km))
        return pts[-1]

    grid_times = step_times(scenario)
    times = set(grid_times)
    for t0, _, _, _ in phases[1:]:
        if min(abs(t0 - g) for g in grid_times) > 1e-6:
            times.add(t0)
    times = sorted(times)
    positions = [pos_at(tq) for tq in times]
    positions[-1] = pts[-1]
    traj = Trajectory.from_points(times, positions)
    timeline = evaluate_trajectory(traj, scenario)
    return PlanResult(traj, timeline, timeline.total_bits, "shortest")


# --------------------------------------------------------------------------
# exhaustive oracle

def _neighbours(scenario: Scenario, grid: CellGrid) -> list[list[int]]:
    dt = scenario.grid.dt_s
    centres = [grid.center(c) for c in range(grid.n_cells)]
    return [[b for b in range(grid.n_cells) if speed_ok(centres[a], centres[b], dt, scenario.v_max_kmh)]
            for a in range(grid.n_cells)]


def count_paths(scenario: Scenario) -> int:
    """Number of cell sequences the oracle would enumerate."""
    grid = CellGrid.for_scenario(scenario)
    nbrs = _neighbours(scenario, grid)
    counts = [0] * grid.n_cells
    counts[grid.cell_of(scenario.start)] = 1
    for _ in range(scenario.n_steps):
        new = [0] * grid.n_cells
        for a, c in enumerate(counts):
            if c:
                for b in nbrs[a]:
                    new[b] += c
        counts = new
    return sum(counts)


def path_is_valid(cells: list[int], scenario: Scenario, grid: CellGrid) -> bool:
    """Ordered waypoint runs of dwell+1 equal cells, ending in the end cell."""
    n = len(cells) - 1
    ptr = 0
    for wp, d in zip(scenario.waypoints, scenario.dwell_steps()):
        w = grid.cell_of(wp.position)
        for j in range(ptr, n - d + 1):
            if all(cells[j + q] == w for q in range(d + 1)):
                ptr = j + d
                break
        else:
            return False
    return cells[-1] == grid.cell_of(scenario.end)


def enumerate_paths(scenario: Scenario, network_filter: Optional[Iterable[str]] = None
                    ) -> Iterator[tuple[list[int], float]]:
    """Yield every valid cell sequence with its objective, in DFS order."""
    n_paths = count_paths(scenario)
    if n_paths > BRUTE_FORCE_LIMIT:
        raise ProblemTooLarge(f"{n_paths} paths exceed the enumeration limit {BRUTE_FORCE_LIMIT}")
    grid = CellGrid.for_scenario(scenario)
    table = reward_table(scenario, grid, network_filter)
    nbrs = _neighbours(scenario, grid)
    n_steps = scenario.n_steps
    path = [grid.cell_of(scenario.start)]

    def walk(k: int) -> Iterator[tuple[list[int], float]]:
        if k == n_steps:
            if path_is_valid(path, scenario, grid):
                total = 0.0
                for step, c in enumerate(path[1:]):
                    total += table[step, c]
                yield list(path), float(total)
            return
        for b in nbrs[path[-1]]:
            path.append(b)
            yield from walk(k + 1)
            path.pop()

    yield from walk(0)


def brute_force_plan(scenario: Scenario, network_filter: Optional[Iterable[str]] = None) -> PlanResult:
    scenario.select(network_filter)
    best_cells, best = None, -math.inf
    for cells, value in enumerate_paths(scenario, network_filter):
        if value > best:
            best_cells, best = cells, value
    if best_cells is None:
        raise InfeasibleError("no valid path exists on the grid")
    grid = CellGrid.for_scenario(scenario)
    traj = _trajectory_from_cells(scenario, grid, best_cells)
    return PlanResult(traj, evaluate_trajectory(traj, scenario, network_filter), best, "brute_force")
