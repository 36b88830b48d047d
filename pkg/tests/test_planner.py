from dataclasses import replace

import numpy as np
import pytest

from conftest import random_small_scenario, single_network_scenario
from nibroute import _dp
from nibroute.errors import InfeasibleError, ProblemTooLarge, ScenarioError
from nibroute.evaluator import evaluate_trajectory, mission_violations
from nibroute.geometry import Position, Trajectory, segment_speed_kmh, trajectory_feasible
from nibroute.grid import CellGrid
from nibroute.link_budget import sample_link
from nibroute.planner import (BRUTE_FORCE_LIMIT, brute_force_plan, count_paths, enumerate_paths,
                              plan_rate_max, plan_uniform_shortest, reward_table, step_times)
from nibroute.scenario import PlanGrid, Region, Scenario, Waypoint, table_i_node

SAT = table_i_node("satellite", 0)
CELL = table_i_node("cellular", 1, position=Position(0.2, 3.7))


def small(nx, ny, n_steps, networks=(SAT, CELL), waypoints=(), start=(0.5, 0.5), end=None, dt=120.0):
    end = end or (nx - 0.5, ny - 0.5)
    return Scenario(Region(0, nx, 0, ny), tuple(networks), Position(*start), Position(*end),
                    tuple(waypoints), n_steps * dt, 30.0, grid=PlanGrid(1.0, dt))


def test_empty_filter_rejected_before_planning():
    with pytest.raises(ScenarioError):
        plan_rate_max(small(2, 2, 4, networks=(SAT,)), ["shipborne_wifi"])


def test_single_feasible_path_is_stationary():
    s = Scenario(Region(0, 1, 0, 1), (SAT,), Position(0.5, 0.5), Position(0.5, 0.5),
                 (Waypoint(Position(0.5, 0.5), 1200.0),), 3600.0, 30.0, grid=PlanGrid(1.0, 120.0))
    res = plan_rate_max(s)
    assert {p for p in res.trajectory.positions} == {Position(0.5, 0.5)}
    rate = sample_link(SAT, Position(0.5, 0.5), 0.0).rate_bps
    assert res.objective_bits == pytest.approx(rate * 3600.0, rel=1e-12)
    assert brute_force_plan(s).objective_bits == res.objective_bits


def test_four_by_four_matches_brute_force():
    s = small(4, 4, 8, waypoints=(Waypoint(Position(2.5, 0.5), 240.0),))
    dp = plan_rate_max(s)
    bf = brute_force_plan(s)
    assert dp.objective_bits == bf.objective_bits
    assert mission_violations(dp.trajectory, s) == []


def test_brute_force_single_cell():
    s = small(1, 1, 5, start=(0.5, 0.5), end=(0.5, 0.5))
    rate = sample_link(SAT, Position(0.5, 0.5), 0.0).rate_bps
    assert brute_force_plan(s, ["satellite"]).objective_bits == pytest.approx(rate * 600.0, rel=1e-12)


def test_brute_force_is_max_of_enumeration():
    s = small(3, 3, 6)
    values = [v for _, v in enumerate_paths(s)]
    assert len(values) > 1
    best = brute_force_plan(s).objective_bits
    assert all(best >= v for v in values)
    assert best in values


def test_brute_force_size_limit():
    s = small(4, 4, 40)
    assert count_paths(s) > BRUTE_FORCE_LIMIT
    with pytest.raises(ProblemTooLarge):
        brute_force_plan(s)


@pytest.mark.parametrize("seed", range(60, 80))
@pytest.mark.parametrize("backend", sorted(_dp.BACKENDS))
def test_random_instances_match_oracle(seed, backend):
    s = random_small_scenario(seed)
    try:
        bf = brute_force_plan(s)
    except InfeasibleError:
        with pytest.raises(InfeasibleError):
            plan_rate_max(s, backend=backend)
        return
    dp = plan_rate_max(s, backend=backend)
    assert dp.objective_bits == bf.objective_bits
    assert mission_violations(dp.trajectory, s) == []


def test_budget_infeasibility_named():
    s = replace(small(10, 1, 4), end=Position(9.5, 0.5))
    with pytest.raises(InfeasibleError, match="time budget"):
        plan_rate_max(s)
    with pytest.raises(InfeasibleError, match="time budget"):
        plan_uniform_shortest(s)


def test_grid_infeasibility_reported():
    # 60 s steps at 30 km/h cover 0.5 km: the fleet cannot leave a 1 km cell
    s = small(3, 1, 60, dt=60.0, start=(0.5, 0.5), end=(1.5, 0.5))
    with pytest.raises(InfeasibleError, match="no grid path"):
        plan_rate_max(s)


def test_reference_plan_constraints(reference):
    res = plan_rate_max(reference)
    assert trajectory_feasible(res.trajectory, reference.v_max_kmh)
    assert mission_violations(res.trajectory, reference) == []
    assert res.trajectory.times == step_times(reference)
    assert res.objective_bits == pytest.approx(res.timeline.total_bits, rel=1e-12)


def test_threads_and_backends_identical(reference):
    runs = [plan_rate_max(reference, threads=t, backend=b)
            for b in sorted(_dp.BACKENDS) for t in (1, 4)]
    for r in runs[1:]:
        assert r.trajectory == runs[0].trajectory
        assert r.objective_bits == runs[0].objective_bits


def test_superset_dominance(reference):
    full = plan_rate_max(reference).objective_bits
    for subset in (["cellular"], ["satellite"], ["satellite", "cellular"],
                   ["satellite", "shipborne_wifi"], ["shipborne_wifi"]):
        assert full >= plan_rate_max(reference, subset).objective_bits


def _random_feasible_walk(s: Scenario, rng) -> Trajectory:
    """Random walk on the grid that still reaches the end cell in time."""
    grid = CellGrid.for_scenario(s)
    centres = [grid.center(c) for c in range(grid.n_cells)]
    dt = s.grid.dt_s
    nbrs = [[b for b in range(grid.n_cells)
             if segment_speed_kmh(centres[a], centres[b], dt) <= s.v_max_kmh + 1e-9]
            for a in range(grid.n_cells)]
    end = grid.cell_of(s.end)
    hops = {end: 0}
    frontier = [end]
    while frontier:
        nxt = []
        for a in frontier:
            for b in nbrs[a]:
                if b not in hops:
                    hops[b] = hops[a] + 1
                    nxt.append(b)
        frontier = nxt
    cells = [grid.cell_of(s.start)]
    for k in range(s.n_steps):
        left = s.n_steps - k - 1
        options = [b for b in nbrs[cells[-1]] if hops[b] <= left]
        cells.append(int(rng.choice(options)))
    return Trajectory.from_points(step_times(s), [centres[c] for c in cells])


def test_optimum_dominates_random_walks():
    route = ((Position(0, 9), Position(9, 0)))
    from nibroute.geometry import FerryRoute
    wifi = replace(table_i_node("shipborne_wifi", 2, ferry_route=FerryRoute(route, 40.0)), max_range_km=2.0)
    s = replace(small(9, 9, 30, networks=(SAT, CELL, wifi)), end=Position(8.5, 4.5))
    best = plan_rate_max(s).objective_bits
    rng = np.random.default_rng(7)
    for _ in range(200):
        walk = _random_feasible_walk(s, rng)
        assert best >= evaluate_trajectory(walk, s).total_bits * (1 - 1e-12)


def test_optimum_dominates_shortest(reference):
    assert plan_rate_max(reference).objective_bits >= plan_uniform_shortest(reference).objective_bits


def test_reward_table_matches_scalar_link_budget(reference):
    grid = CellGrid.for_scenario(reference)
    table = reward_table(reference, grid)
    dt = reference.grid.dt_s
    for k, cell in [(0, 0), (20, 1234), (59, grid.n_cells - 1), (25, grid.cell_of(Position(8, 12)))]:
        t_mid = 0.5 * (k * dt + (k + 1) * dt)
        best = max(sample_link(n, grid.center(cell), t_mid).rate_bps for n in reference.networks)
        assert table[k, cell] == dt * best


def test_shortest_straight_line_speed():
    s = Scenario(Region(0, 40, 0, 10), (SAT,), Position(5, 5), Position(35, 5), (), 7200.0, 30.0,
                 grid=PlanGrid(1.0, 120.0))
    res = plan_uniform_shortest(s)
    samples = res.trajectory.samples
    speeds = [segment_speed_kmh(p0, p1, t1 - t0) for (t0, p0), (t1, p1) in zip(samples, samples[1:])]
    assert speeds == pytest.approx([15.0] * len(speeds), abs=1e-9)
    assert samples[-1] == (7200.0, Position(35, 5))


def test_shortest_dwells_are_contiguous_when_unaligned():
    # leg times of 1000 s do not fall on the 120 s step grid
    s = Scenario(Region(0, 20, 0, 10), (SAT,), Position(0, 5), Position(20, 5),
                 (Waypoint(Position(10, 5), 1200.0),), 3200.0, 40.0, grid=PlanGrid(1.0, 40.0))
    res = plan_uniform_shortest(s)
    assert mission_violations(res.trajectory, s) == []
    assert 1000.0 in res.trajectory.times and 2200.0 in res.trajectory.times


def test_shortest_on_reference(reference):
    res = plan_uniform_shortest(reference)
    assert mission_violations(res.trajectory, reference) == []
    portions = res.timeline.portions()
    assert sum(portions.values()) == pytest.approx(1.0, abs=1e-12)


def test_numpy_fallback_selected_without_extension(monkeypatch):
    import importlib
    import sys
    monkeypatch.setitem(sys.modules, "nibroute._dpcore", None)
    fallback = importlib.reload(_dp)
    try:
        assert fallback.DEFAULT_BACKEND == "numpy"
        assert sorted(fallback.BACKENDS) == ["numpy"]
        with pytest.raises(ValueError, match="unavailable"):
            fallback.get_backend("compiled")
    finally:
        monkeypatch.undo()
        importlib.reload(_dp)


def test_kernels_agree_on_empty_and_single_predecessor_rows():
    indptr = np.array([0, 0, 1, 3], dtype=np.int64)
    preds = np.array([2, 0, 1], dtype=np.int64)
    v_old = np.array([1.0, -np.inf, 5.0])
    reward = np.array([1.0, 2.0, 3.0])
    outs = []
    for kernel in _dp.BACKENDS.values():
        out = np.empty(3)
        kernel(v_old, indptr, preds, reward, out, 1)
        outs.append(out)
    for out in outs:
        np.testing.assert_array_equal(out, [-np.inf, 7.0, 4.0])
