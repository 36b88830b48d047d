"""Planar kinematics: positions, trajectories and the ferry's route."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

SPEED_SLACK_KMH = 1e-9


@dataclass(frozen=True)
class Position:
    x_km: float
    y_km: float

    def __post_init__(self):
        if not (math.isfinite(self.x_km) and math.isfinite(self.y_km)):
            raise ValueError(f"non-finite position ({self.x_km}, {self.y_km})")


@dataclass(frozen=True)
class Trajectory:
    """Timestamped positions, first sample at t = 0 s."""

    samples: tuple[tuple[float, Position], ...]

    def __post_init__(self):
        if not self.samples:
            raise ValueError("trajectory has no samples")
        if self.samples[0][0] != 0.0:
            raise ValueError("trajectory must start at t = 0")
        for (t0, _), (t1, _) in zip(self.samples, self.samples[1:]):
            if not t1 > t0:
                raise ValueError(f"timestamps not strictly increasing at t = {t1}")

    @classmethod
    def from_points(cls, times: Iterable[float], positions: Iterable[Position]) -> "Trajectory":
        return cls(tuple((float(t), p) for t, p in zip(times, positions, strict=True)))

    @property
    def times(self) -> list[float]:
        return [t for t, _ in self.samples]

    @property
    def positions(self) -> list[Position]:
        return [p for _, p in self.samples]


@dataclass(frozen=True)
class FerryRoute:
    polyline: tuple[Position, ...]
    speed_kmh: float
    start_t_s: float = 0.0

    def __post_init__(self):
        if len(self.polyline) < 2:
            raise ValueError("ferry route needs at least two points")
        if not self.speed_kmh > 0:
            raise ValueError("ferry speed must be positive")


def distance(a: Position, b: Position) -> float:
    return math.hypot(b.x_km - a.x_km, b.y_km - a.y_km)


def ferry_position_at(route: FerryRoute, t_s: float) -> Position:
    """Position along the route at constant speed, clamped at both ends."""
    travelled = route.speed_kmh * max(t_s - route.start_t_s, 0.0) / 3600.0
    pts = route.polyline
    for a, b in zip(pts, pts[1:]):
        seg = distance(a, b)
        if travelled <= seg:
            if seg == 0.0:
                return a
            f = travelled / seg
            return Position(a.x_km + f * (b.x_km - a.x_km), a.y_km + f * (b.y_km - a.y_km))
        travelled -= seg
    return pts[-1]


def segment_speed_kmh(a: Position, b: Position, dt_s: float) -> float:
    return distance(a, b) / (dt_s / 3600.0)


def speed_ok(a: Position, b: Position, dt_s: float, v_max_kmh: float) -> bool:
    return segment_speed_kmh(a, b, dt_s) <= v_max_kmh + SPEED_SLACK_KMH


def samples_feasible(samples: Sequence[tuple[float, Position]], v_max_kmh: float) -> bool:
    return all(
        speed_ok(p0, p1, t1 - t0, v_max_kmh)
        for (t0, p0), (t1, p1) in zip(samples, samples[1:])
    )


def trajectory_feasible(traj: Trajectory, v_max_kmh: float) -> bool:
    return samples_feasible(traj.samples, v_max_kmh)
