"""Scenario documents: JSON loading, validation, defaults and the reference case.

Schema (units fixed: km, s, dBm, dBi, GHz, Hz)::

    {
      "region": {"x_min_km": 0, "x_max_km": 20, "y_min_km": 0, "y_max_km": 20},
      "networks": [
        {"id": 0, "name": "geo", "kind": "satellite",
         "tx_power_dbm": 49, "tx_gain_dbi": 52, "rx_gain_dbi": 30,
         "carrier_ghz": 20, "bandwidth_hz": 5e6,
         "channel": {"variant": "FreeSpace"}},
        {"kind": "cellular", "position": [0.0, 12.0], ...,
         "channel": {"variant": "LogDistance", "exponent_n": 3.4, "ref_distance_km": 1}},
        {"kind": "shipborne_wifi",
         "ferry_route": {"polyline": [[0, 18], [20, 4]], "speed_kmh": 40, "start_t_s": 0},
         "max_range_km": 3, ...}
      ],
      "mission": {"start": [x, y], "end": [x, y],
                  "waypoints": [{"position": [x, y], "dwell_s": 1200}],
                  "total_time_s": 7200, "v_max_kmh": 30},
      "noise_figure_db": 0,
      "grid": {"cell_km": 1, "dt_s": 60},
      "geo_slant_range_km": 35786
    }

``id`` defaults to the list index, ``name`` to "", ``ref_distance_km`` to
1 km for cellular and 1 m for WiFi, ``max_range_km`` to unlimited.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from typing import Any, Iterable, Optional

from .errors import ScenarioError
from .geometry import FerryRoute, Position
from .link_budget import GEO_SLANT_RANGE_KM, KINDS, NetworkNode
from .propagation import ChannelModel, FreeSpace, LogDistance

DEFAULT_NOISE_FIGURE_DB = 0.0
DEFAULT_CELL_KM = 1.0
DEFAULT_DT_S = 60.0
DEFAULT_REF_DISTANCE_KM = {"satellite": 1.0, "cellular": 1.0, "shipborne_wifi": 0.001}

# Table I of the case study, one column per network class
TABLE_I = {
    "satellite": dict(tx_power_dbm=49.0, tx_gain_dbi=52.0, rx_gain_dbi=30.0,
                      carrier_ghz=20.0, bandwidth_hz=5e6, exponent_n=2.0),
    "cellular": dict(tx_power_dbm=43.0, tx_gain_dbi=15.0, rx_gain_dbi=0.0,
                     carrier_ghz=2.0, bandwidth_hz=5e6, exponent_n=3.4),
    "shipborne_wifi": dict(tx_power_dbm=20.0, tx_gain_dbi=10.0, rx_gain_dbi=10.0,
                           carrier_ghz=2.4, bandwidth_hz=20e6, exponent_n=2.0),
}


@dataclass(frozen=True)
class Region:
    x_min_km: float
    x_max_km: float
    y_min_km: float
    y_max_km: float

    def contains(self, p: Position) -> bool:
        return self.x_min_km <= p.x_km <= self.x_max_km and self.y_min_km <= p.y_km <= self.y_max_km


@dataclass(frozen=True)
class Waypoint:
    position: Position
    dwell_s: float


@dataclass(frozen=True)
class PlanGrid:
    cell_km: float = DEFAULT_CELL_KM
    dt_s: float = DEFAULT_DT_S


@dataclass(frozen=True)
class Scenario:
    region: Region
    networks: tuple[NetworkNode, ...]
    start: Position
    end: Position
    waypoints: tuple[Waypoint, ...]
    total_time_s: float
    v_max_kmh: float
    noise_figure_db: float = DEFAULT_NOISE_FIGURE_DB
    grid: PlanGrid = PlanGrid()
    geo_slant_range_km: float = GEO_SLANT_RANGE_KM

    def __post_init__(self):
        validate(self)

    def select(self, kinds: Optional[Iterable[str]]) -> tuple[NetworkNode, ...]:
        """Networks whose kind is in ``kinds`` (all networks when None)."""
        if kinds is None:
            return self.networks
        kinds = set(kinds)
        unknown = kinds - set(KINDS)
        if unknown:
            raise ScenarioError(f"unknown network kind(s) {sorted(unknown)}")
        chosen = tuple(n for n in self.networks if n.kind in kinds)
        if not chosen:
            raise ScenarioError(f"no networks left after filtering to {sorted(kinds)}")
        return chosen

    @property
    def n_steps(self) -> int:
        return int(round(self.total_time_s / self.grid.dt_s))

    def dwell_steps(self) -> list[int]:
        return [int(round(w.dwell_s / self.grid.dt_s)) for w in self.waypoints]


def _divides(dt: float, total: float) -> bool:
    q = total / dt
    return abs(q - round(q)) <= 1e-9 * max(1.0, q)


def validate(s: Scenario) -> None:
    r = s.region
    if not (r.x_max_km > r.x_min_km and r.y_max_km > r.y_min_km):
        raise ScenarioError("region: max must exceed min on both axes")
    if not s.networks:
        raise ScenarioError("networks: at least one network required")
    ids = [n.id for n in s.networks]
    if len(set(ids)) != len(ids):
        raise ScenarioError("networks: duplicate network id")
    if not s.v_max_kmh > 0:
        raise ScenarioError("mission.v_max_kmh: must be > 0")
    if not s.region.contains(s.start):
        raise ScenarioError("start outside region")
    if not s.region.contains(s.end):
        raise ScenarioError("end outside region")
    for i, w in enumerate(s.waypoints):
        if not s.region.contains(w.position):
            raise ScenarioError(f"waypoint outside region (waypoints[{i}])")
        if w.dwell_s < 0:
            raise ScenarioError(f"waypoints[{i}].dwell_s: must be >= 0")
    dwell = sum(w.dwell_s for w in s.waypoints)
    if not s.total_time_s > dwell:
        raise ScenarioError("mission.total_time_s: must exceed total dwell time")
    g = s.grid
    if not (g.cell_km > 0 and g.dt_s > 0):
        raise ScenarioError("grid: cell_km and dt_s must be > 0")
    if not _divides(g.dt_s, s.total_time_s):
        raise ScenarioError("grid.dt_s: must divide total_time_s evenly")
    for i, w in enumerate(s.waypoints):
        if not _divides(g.dt_s, w.dwell_s):
            raise ScenarioError(f"grid.dt_s: must divide waypoints[{i}].dwell_s evenly")
    if not s.geo_slant_range_km > 0:
        raise ScenarioError("geo_slant_range_km: must be > 0")


# --------------------------------------------------------------------------
# JSON <-> Scenario

def _pos(v: Any, field: str) -> Position:
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ScenarioError(f"{field}: expected [x_km, y_km]")
    try:
        return Position(float(v[0]), float(v[1]))
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"{field}: {exc}") from None


def _num(d: dict, key: str, field: str, default: Any = ...) -> float:
    if key not in d:
        if default is ...:
            raise ScenarioError(f"{field}.{key}: missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(f"{field}.{key}: expected a finite number")
    return float(v)


def _obj(d: Any, field: str) -> dict:
    if not isinstance(d, dict):
        raise ScenarioError(f"{field}: expected an object")
    return d


def _channel(d: Any, kind: str, field: str) -> ChannelModel:
    d = _obj(d, field)
    variant = d.get("variant")
    if variant == "FreeSpace":
        return FreeSpace()
    if variant == "LogDistance":
        n = _num(d, "exponent_n", field)
        d0 = _num(d, "ref_distance_km", field, DEFAULT_REF_DISTANCE_KM[kind])
        try:
            return LogDistance(n, d0)
        except ValueError as exc:
            raise ScenarioError(f"{field}: {exc}") from None
    raise ScenarioError(f"{field}.variant: expected FreeSpace or LogDistance, got {variant!r}")


def _network(d: Any, index: int, slant_km: float) -> NetworkNode:
    field = f"networks[{index}]"
    d = _obj(d, field)
    kind = d.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"{field}.kind: expected one of {list(KINDS)}, got {kind!r}")
    nid = d.get("id", index)
    if isinstance(nid, bool) or not isinstance(nid, int):
        raise ScenarioError(f"{field}.id: expected an integer")
    position = _pos(d["position"], f"{field}.position") if "position" in d else None
    route = None
    if "ferry_route" in d:
        rd = _obj(d["ferry_route"], f"{field}.ferry_route")
        poly = rd.get("polyline")
        if not isinstance(poly, list):
            raise ScenarioError(f"{field}.ferry_route.polyline: expected a list")
        pts = tuple(_pos(p, f"{field}.ferry_route.polyline[{i}]") for i, p in enumerate(poly))
        try:
            route = FerryRoute(pts, _num(rd, "speed_kmh", f"{field}.ferry_route"),
                               _num(rd, "start_t_s", f"{field}.ferry_route", 0.0))
        except ValueError as exc:
            raise ScenarioError(f"{field}.ferry_route: {exc}") from None
    max_range = _num(d, "max_range_km", field, None) if d.get("max_range_km") is not None else None
    try:
        return NetworkNode(
            id=nid,
            kind=kind,
            tx_power_dbm=_num(d, "tx_power_dbm", field),
            tx_gain_dbi=_num(d, "tx_gain_dbi", field),
            rx_gain_dbi=_num(d, "rx_gain_dbi", field),
            carrier_ghz=_num(d, "carrier_ghz", field),
            bandwidth_hz=_num(d, "bandwidth_hz", field),
            channel=_channel(d.get("channel"), kind, f"{field}.channel"),
            position=position,
            ferry_route=route,
            max_range_km=max_range,
            slant_range_km=slant_km,
            name=str(d.get("name", "")),
        )
    except ValueError as exc:
        if isinstance(exc, ScenarioError):
            raise
        raise ScenarioError(f"{field}: {exc}") from None


def scenario_from_dict(doc: Any) -> Scenario:
    doc = _obj(doc, "document")
    reg = _obj(doc.get("region"), "region")
    region = Region(*(_num(reg, k, "region") for k in ("x_min_km", "x_max_km", "y_min_km", "y_max_km")))
    slant = _num(doc, "geo_slant_range_km", "document", GEO_SLANT_RANGE_KM)
    if not slant > 0:
        raise ScenarioError("geo_slant_range_km: must be > 0")
    nets = doc.get("networks")
    if not isinstance(nets, list):
        raise ScenarioError("networks: expected a list")
    networks = tuple(_network(n, i, slant) for i, n in enumerate(nets))
    m = _obj(doc.get("mission"), "mission")
    wps = m.get("waypoints", [])
    if not isinstance(wps, list):
        raise ScenarioError("mission.waypoints: expected a list")
    waypoints = []
    for i, w in enumerate(wps):
        w = _obj(w, f"mission.waypoints[{i}]")
        waypoints.append(Waypoint(_pos(w.get("position"), f"mission.waypoints[{i}].position"),
                                  _num(w, "dwell_s", f"mission.waypoints[{i}]")))
    g = _obj(doc.get("grid", {}), "grid")
    grid = PlanGrid(_num(g, "cell_km", "grid", DEFAULT_CELL_KM), _num(g, "dt_s", "grid", DEFAULT_DT_S))
    return Scenario(
        region=region,
        networks=networks,
        start=_pos(m.get("start"), "mission.start"),
        end=_pos(m.get("end"), "mission.end"),
        waypoints=tuple(waypoints),
        total_time_s=_num(m, "total_time_s", "mission"),
        v_max_kmh=_num(m, "v_max_kmh", "mission"),
        noise_figure_db=_num(doc, "noise_figure_db", "document", DEFAULT_NOISE_FIGURE_DB),
        grid=grid,
        geo_slant_range_km=slant,
    )


def load_scenario(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def _xy(p: Position) -> list[float]:
    return [p.x_km, p.y_km]


def _channel_dict(c: ChannelModel) -> dict:
    if isinstance(c, FreeSpace):
        return {"variant": "FreeSpace"}
    return {"variant": "LogDistance", "exponent_n": c.exponent_n, "ref_distance_km": c.ref_distance_km}


def scenario_to_dict(s: Scenario) -> dict:
    nets = []
    for n in s.networks:
        d: dict[str, Any] = {
            "id": n.id, "name": n.name, "kind": n.kind,
            "tx_power_dbm": n.tx_power_dbm, "tx_gain_dbi": n.tx_gain_dbi,
            "rx_gain_dbi": n.rx_gain_dbi, "carrier_ghz": n.carrier_ghz,
            "bandwidth_hz": n.bandwidth_hz, "channel": _channel_dict(n.channel),
        }
        if n.position is not None:
            d["position"] = _xy(n.position)
        if n.ferry_route is not None:
            r = n.ferry_route
            d["ferry_route"] = {"polyline": [_xy(p) for p in r.polyline],
                                "speed_kmh": r.speed_kmh, "start_t_s": r.start_t_s}
        if n.max_range_km is not None:
            d["max_range_km"] = n.max_range_km
        nets.append(d)
    r = s.region
    return {
        "region": {"x_min_km": r.x_min_km, "x_max_km": r.x_max_km,
                   "y_min_km": r.y_min_km, "y_max_km": r.y_max_km},
        "networks": nets,
        "mission": {
            "start": _xy(s.start), "end": _xy(s.end),
            "waypoints": [{"position": _xy(w.position), "dwell_s": w.dwell_s} for w in s.waypoints],
            "total_time_s": s.total_time_s, "v_max_kmh": s.v_max_kmh,
        },
        "noise_figure_db": s.noise_figure_db,
        "grid": {"cell_km": s.grid.cell_km, "dt_s": s.grid.dt_s},
        "geo_slant_range_km": s.geo_slant_range_km,
    }


def dump_scenario(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=2) + "\n"


def scenario_digest(s: Scenario) -> str:
    canonical = json.dumps(scenario_to_dict(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def table_i_node(kind: str, nid: int, name: str = "", **location) -> NetworkNode:
    """A network node carrying the Table I parameters for ``kind``."""
    p = dict(TABLE_I[kind])
    n = p.pop("exponent_n")
    channel = FreeSpace() if kind == "satellite" else LogDistance(n, DEFAULT_REF_DISTANCE_KM[kind])
    return NetworkNode(id=nid, kind=kind, channel=channel, name=name, **p, **location)


def with_tx_offset(s: Scenario, offset_db: float) -> Scenario:
    """Copy of ``s`` with every network's tx power raised by ``offset_db``."""
    nets = tuple(replace(n, tx_power_dbm=n.tx_power_dbm + offset_db) for n in s.networks)
    return replace(s, networks=nets)


def reference_scenario() -> Scenario:
    """Canonical maritime geometry with the Table I networks.

    A 20 km x 20 km sea area. The coast cellular site sits on the western
    edge, the island site in the middle of the area, and a 40 km/h ferry
    crosses from the north-west towards the south-east. The fleet sails
    from the south-west corner to the north-east corner through two
    waypoints, hovering 20 minutes at each, within two hours at up to
    30 km/h. All mission points are grid-cell centres.
    """
    ferry = FerryRoute((Position(0.125, 19.875), Position(19.875, 0.125)), speed_kmh=40.0, start_t_s=2400.0)
    networks = (
        table_i_node("satellite", 0, "geo-satellite"),
        table_i_node("cellular", 1, "coast-bs", position=Position(0.0, 17.0)),
        table_i_node("cellular", 2, "island-bs", position=Position(13.0, 14.0)),
        replace(table_i_node("shipborne_wifi", 3, "ferry-wifi", ferry_route=ferry), max_range_km=3.0),
    )
    return Scenario(
        region=Region(0.0, 20.0, 0.0, 20.0),
        networks=networks,
        start=Position(1.125, 1.125),
        end=Position(18.875, 18.875),
        waypoints=(Waypoint(Position(4.125, 7.125), 1200.0),
                   Waypoint(Position(12.125, 11.125), 1200.0)),
        total_time_s=7200.0,
        v_max_kmh=30.0,
        grid=PlanGrid(cell_km=0.25, dt_s=120.0),
    )
