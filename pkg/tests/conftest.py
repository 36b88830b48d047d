from dataclasses import replace

import numpy as np
import pytest

from nibroute.errors import InfeasibleError
from nibroute.geometry import FerryRoute, Position
from nibroute.planner import check_budget
from nibroute.scenario import PlanGrid, Region, Scenario, Waypoint, reference_scenario, table_i_node


@pytest.fixture(scope="session")
def reference():
    return reference_scenario()


def single_network_scenario(node, fleet=Position(5.0, 5.0), total_time_s=3600.0, **kw):
    """Stationary-friendly scenario with one network and no waypoints."""
    return Scenario(
        region=Region(0.0, 10.0, 0.0, 10.0),
        networks=(node,),
        start=fleet,
        end=fleet,
        waypoints=(),
        total_time_s=total_time_s,
        v_max_kmh=30.0,
        grid=PlanGrid(cell_km=1.0, dt_s=120.0),
        **kw,
    )


def _centre(rng, nx, ny):
    return Position(float(rng.integers(nx)) + 0.5, float(rng.integers(ny)) + 0.5)


def random_small_scenario(seed: int) -> Scenario:
    """Grid <= 4x4, <= 8 steps, <= 1 waypoint, 2-3 networks; mission points on cell centres."""
    rng = np.random.default_rng(seed)
    while True:
        nx, ny = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        diagonal = nx * ny <= 9 and rng.random() < 0.4
        dt = 180.0 if diagonal else 120.0
        n_steps = int(rng.integers(3, 6 if diagonal else 9))
        n_wp = int(rng.integers(0, 2))
        dwell_steps = int(rng.integers(0, 3))
        waypoints = tuple(Waypoint(_centre(rng, nx, ny), dwell_steps * dt) for _ in range(n_wp))
        if sum(w.dwell_s for w in waypoints) >= n_steps * dt:
            continue
        nets = [
            replace(table_i_node("satellite", 0), tx_power_dbm=float(rng.uniform(30, 50))),
            replace(table_i_node("cellular", 1, position=Position(*rng.uniform(-2, 6, 2))),
                    tx_power_dbm=float(rng.uniform(10, 43))),
        ]
        if rng.random() < 0.6:
            route = FerryRoute((Position(*rng.uniform(0, 4, 2)), Position(*rng.uniform(0, 4, 2))),
                               speed_kmh=float(rng.uniform(10, 40)), start_t_s=float(rng.uniform(0, 600)))
            nets.append(replace(table_i_node("shipborne_wifi", 2, ferry_route=route),
                                max_range_km=float(rng.uniform(0.5, 3))))
        s = Scenario(
            region=Region(0.0, float(nx), 0.0, float(ny)),
            networks=tuple(nets),
            start=_centre(rng, nx, ny),
            end=_centre(rng, nx, ny),
            waypoints=waypoints,
            total_time_s=n_steps * dt,
            v_max_kmh=30.0,
            grid=PlanGrid(cell_km=1.0, dt_s=dt),
        )
        try:
            check_budget(s)
        except InfeasibleError:
            continue
        return s


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
