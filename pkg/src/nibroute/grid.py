"""Uniform cell grid over a scenario region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import Position, speed_ok
from .scenario import Scenario


@dataclass(frozen=True)
class CellGrid:
    x0: float
    y0: float
    cell_km: float
    nx: int
    ny: int

    @classmethod
    def for_scenario(cls, s: Scenario) -> "CellGrid":
        r, c = s.region, s.grid.cell_km
        nx = max(1, math.ceil((r.x_max_km - r.x_min_km) / c - 1e-9))
        ny = max(1, math.ceil((r.y_max_km - r.y_min_km) / c - 1e-9))
        return cls(r.x_min_km, r.y_min_km, c, nx, ny)

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @cached_property
    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Centre coordinates of every cell, indexed ``j * nx + i``."""
        i = np.tile(np.arange(self.nx), self.ny)
        j = np.repeat(np.arange(self.ny), self.nx)
        return self.x0 + (i + 0.5) * self.cell_km, self.y0 + (j + 0.5) * self.cell_km

    def center(self, cell: int) -> Position:
        xs, ys = self.centers
        return Position(float(xs[cell]), float(ys[cell]))

    def cell_of(self, p: Position) -> int:
        i = min(max(int(math.floor((p.x_km - self.x0) / self.cell_km)), 0), self.nx - 1)
        j = min(max(int(math.floor((p.y_km - self.y0) / self.cell_km)), 0), self.ny - 1)
        return j * self.nx + i

    def stencil(self, dt_s: float, v_max_kmh: float) -> list[tuple[int, int]]:
        """Cell offsets reachable in one step, (0, 0) included."""
        reach = int(math.floor(v_max_kmh * dt_s / 3600.0 / self.cell_km)) + 1
        origin = Position(0.0, 0.0)
        out = []
        for dj in range(-reach, reach + 1):
            for di in range(-reach, reach + 1):
                p = Position(di * self.cell_km, dj * self.cell_km)
                if speed_ok(origin, p, dt_s, v_max_kmh):
                    out.append((di, dj))
        return out
