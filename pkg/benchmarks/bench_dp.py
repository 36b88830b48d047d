"""Compare the compiled and numpy planner kernels.

    python benchmarks/bench_dp.py [--repeat 3] [--cell 0.25 0.125]

Reports wall time of the DP sweep alone (rewards and graph prebuilt) and
checks that both backends return identical value layers.
"""

import argparse
import time
from dataclasses import replace

import numpy as np

from nibroute import _dp
from nibroute.grid import CellGrid
from nibroute.planner import build_state_graph, reward_table
from nibroute.scenario import PlanGrid, reference_scenario


def run_layers(kernel, table, graph, n_steps, threads):
    values = np.full((n_steps + 1, graph.n_states), -np.inf)
    values[0, graph.initial] = 0.0
    for k in range(n_steps):
        reward = np.ascontiguousarray(table[k][graph.state_cell])
        kernel(values[k], graph.indptr, graph.preds, reward, values[k + 1], threads)
    return values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cell", type=float, nargs="+", default=[0.25, 0.125])
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    base = reference_scenario()
    print(f"backends available: {sorted(_dp.BACKENDS)}")
    for cell in args.cell:
        s = replace(base, grid=PlanGrid(cell_km=cell, dt_s=base.grid.dt_s))
        grid = CellGrid.for_scenario(s)
        table = reward_table(s, grid)
        graph = build_state_graph(s, grid)
        print(f"cell {cell} km: {graph.n_states} states, {len(graph.preds)} edges, {s.n_steps} steps")
        results = {}
        for name, kernel in sorted(_dp.BACKENDS.items()):
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                values = run_layers(kernel, table, graph, s.n_steps, args.threads)
                best = min(best, time.perf_counter() - t0)
            results[name] = values
            print(f"  {name:9s} {best * 1e3:9.1f} ms")
        layers = list(results.values())
        same = all(np.array_equal(layers[0], v) for v in layers[1:])
        print(f"  identical layers: {same}")


if __name__ == "__main__":
    main()
