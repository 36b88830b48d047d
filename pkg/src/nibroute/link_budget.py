"""Link budget, thermal noise, Shannon rate and serving-network selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .geometry import FerryRoute, Position, ferry_position_at
from .propagation import ChannelModel, FreeSpace, path_loss

KINDS = ("satellite", "cellular", "shipborne_wifi")
GEO_SLANT_RANGE_KM = 35786.0
THERMAL_NOISE_DBM_HZ = -174.0
NO_SIGNAL_DB = -np.inf


@dataclass(frozen=True)
class NetworkNode:
    id: int
    kind: str
    tx_power_dbm: float
    tx_gain_dbi: float
    rx_gain_dbi: float
    carrier_ghz: float
    bandwidth_hz: float
    channel: ChannelModel
    position: Optional[Position] = None
    ferry_route: Optional[FerryRoute] = None
    max_range_km: Optional[float] = None
    slant_range_km: float = GEO_SLANT_RANGE_KM
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown network kind {self.kind!r}")
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")
        if not self.carrier_ghz > 0:
            raise ValueError("carrier_ghz must be > 0")
        if self.max_range_km is not None and not self.max_range_km > 0:
            raise ValueError("max_range_km must be > 0")
        has_pos, has_route = self.position is not None, self.ferry_route is not None
        expected = {
            "satellite": (False, False),
            "cellular": (True, False),
            "shipborne_wifi": (False, True),
        }[self.kind]
        if (has_pos, has_route) != expected:
            raise ValueError(f"{self.kind} node has the wrong location form")
        if self.kind == "satellite" and not self.slant_range_km > 0:
            raise ValueError("slant_range_km must be > 0")


@dataclass(frozen=True)
class LinkSample:
    network_id: int
    distance_km: float
    path_loss_db: float
    prx_dbm: float
    noise_dbm: float
    snr_db: float
    rate_bps: float


def received_power(node: NetworkNode, pl_db, offset_db: float = 0.0):
    # offset folds into tx power so that a swept offset and a raised tx power
    # produce identical arithmetic
    return (node.tx_power_dbm + offset_db) + node.tx_gain_dbi + node.rx_gain_dbi - pl_db


def noise_power(bandwidth_hz: float, noise_figure_db: float = 0.0) -> float:
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    return THERMAL_NOISE_DBM_HZ + 10.0 * np.log10(bandwidth_hz) + noise_figure_db


def shannon_rate(bandwidth_hz: float, snr_db):
    if not bandwidth_hz > 0:
        raise ValueError("bandwidth must be positive")
    return bandwidth_hz * np.log2(1.0 + np.power(10.0, np.divide(snr_db, 10.0)))


class LinkArrays(NamedTuple):
    distance_km: np.ndarray
    path_loss_db: np.ndarray
    prx_dbm: np.ndarray
    noise_dbm: float
    snr_db: np.ndarray
    rate_bps: np.ndarray


def node_distance(node: NetworkNode, xs: np.ndarray, ys: np.ndarray, t_s: float) -> np.ndarray:
    if node.kind == "satellite":
        return np.full(np.shape(xs), node.slant_range_km, dtype=float)
    if node.kind == "cellular":
        anchor = node.position
    else:
        anchor = ferry_position_at(node.ferry_route, t_s)
    return np.hypot(xs - anchor.x_km, ys - anchor.y_km)


def link_arrays(node: NetworkNode, xs, ys, t_s: float, noise_figure_db: float = 0.0,
                offset_db: float = 0.0) -> LinkArrays:
    """Vectorised link budget for many fleet positions at one instant."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    d = node_distance(node, xs, ys, t_s)
    # co-located terminals sit inside any reference distance; the log-distance
    # model clamps there, free space needs a tiny positive floor
    floor = 1e-6 if isinstance(node.channel, FreeSpace) else node.channel.ref_distance_km
    pl = path_loss(node.channel, np.maximum(d, floor), node.carrier_ghz)
    prx = received_power(node, pl, offset_db)
    noise = noise_power(node.bandwidth_hz, noise_figure_db)
    if node.max_range_km is not None:
        prx = np.where(d > node.max_range_km, NO_SIGNAL_DB, prx)
    snr = prx - noise
    rate = shannon_rate(node.bandwidth_hz, snr)
    return LinkArrays(d, pl, prx, noise, snr, rate)


def sample_link(node: NetworkNode, fleet_pos: Position, t_s: float,
                noise_figure_db: float = 0.0, offset_db: float = 0.0) -> LinkSample:
    la = link_arrays(node, [fleet_pos.x_km], [fleet_pos.y_km], t_s, noise_figure_db, offset_db)
    return LinkSample(
        network_id=node.id,
        distance_km=float(la.distance_km[0]),
        path_loss_db=float(la.path_loss_db[0]),
        prx_dbm=float(la.prx_dbm[0]),
        noise_dbm=float(la.noise_dbm),
        snr_db=float(la.snr_db[0]),
        rate_bps=float(la.rate_bps[0]),
    )


def pick_best(samples: Sequence[LinkSample]) -> LinkSample:
    """Highest rate wins; ties go to the lowest network id."""
    return min(samples, key=lambda s: (-s.rate_bps, s.network_id))


def best_link(nodes: Sequence[NetworkNode], fleet_pos: Position, t_s: float,
              noise_figure_db: float = 0.0, offset_db: float = 0.0
              ) -> tuple[LinkSample, list[LinkSample]]:
    if not nodes:
        raise ValueError("best_link needs at least one network")
    samples = [sample_link(n, fleet_pos, t_s, noise_figure_db, offset_db) for n in nodes]
    return pick_best(samples), samples
