"""Ground stations: RF visibility, source routing, and attack-path
generation for validator experiments."""
import csv
import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .baselines import NO_PATH, dijkstra
from .constellation import SatelliteId, all_positions
from .grid_theory import theory_shortest_path
from .path_codec import PacketHeader, encode_path
from .snapshot import DelaySnapshot

DEFAULT_MIN_ELEVATION_DEG = 25.0


@dataclass(frozen=True)
class GroundStation:
    id: int
    latitude_deg: float
    longitude_deg: float
    min_elevation_deg: float = DEFAULT_MIN_ELEVATION_DEG
    antenna_count: int = 1

    def __post_init__(self):
        if not 0.0 < self.min_elevation_deg < 90.0:
            raise ValueError("min_elevation out of (0, 90)")


def gs_ecef(cfg, gs):
    lat = math.radians(gs.latitude_deg)
    lon = math.radians(gs.longitude_deg)
    return np.array([math.cos(lat) * math.cos(lon),
                     math.cos(lat) * math.sin(lon),
                     math.sin(lat)]) * cfg.earth_radius_m


def _ecef_positions(cfg, t):
    # rotate the inertial frame by the Earth's rotation since t = 0
    eci = all_positions(cfg, t)
    a = -cfg.earth_rotation_rad_s * t
    c, s = math.cos(a), math.sin(a)
    rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return eci @ rot.T


def elevations_deg(cfg, gs, t):
    """Elevation of every satellite above the GS horizon, shape (P, S)."""
    pos = _ecef_positions(cfg, t)
    origin = gs_ecef(cfg, gs)
    up = origin / np.linalg.norm(origin)
    rel = pos - origin
    sin_el = (rel @ up) / np.linalg.norm(rel, axis=-1)
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


_vis_cache = {}
_vis_set_cache = {}


def visible_set(cfg, gs, t):
    """visible_sats as a set, cached for per-packet membership checks."""
    key = (id(cfg), gs.latitude_deg, gs.longitude_deg,
           gs.min_elevation_deg, t)
    hit = _vis_set_cache.get(key)
    if hit is None:
        hit = frozenset(visible_sats(cfg, gs, t))
        if len(_vis_set_cache) > 4096:
            _vis_set_cache.clear()
        _vis_set_cache[key] = hit
    return hit


def visible_sats(cfg, gs, t):
    """Satellites at or above the GS's elevation mask at time t, highest
    elevation first."""
    key = (id(cfg), gs.latitude_deg, gs.longitude_deg,
           gs.min_elevation_deg, t)
    hit = _vis_cache.get(key)
    if hit is not None:
        return hit
    el = elevations_deg(cfg, gs, t)
    ps, idx = np.nonzero(el >= gs.min_elevation_deg)
    order = np.argsort(-el[ps, idx], kind="stable")
    out = [SatelliteId(int(ps[k]), int(idx[k])) for k in order]
    if len(_vis_cache) > 4096:
        _vis_cache.clear()
    _vis_cache[key] = out
    return out


def source_route(cfg, src_gs, dst_gs, t, mode="dijkstra",
                 failures_known=None, snapshot=None):
    """Packet header for the src->dst GS pair: highest-elevation ingress and
    egress satellites, path per the requested mode, failures excluded."""
    ingress = visible_sats(cfg, src_gs, t)
    egress = visible_sats(cfg, dst_gs, t)
    if not ingress or not egress:
        raise ValueError("a ground station has no visible satellite")
    if snapshot is None:
        snapshot = DelaySnapshot(cfg, t)
    if failures_known:
        snapshot = snapshot.without(*failures_known)
    s, d = ingress[0], egress[0]
    if mode == "dijkstra":
        path = dijkstra(snapshot, s, d)
        if path is NO_PATH:
            raise ValueError("destination unreachable")
    elif mode == "theory":
        path = theory_shortest_path(cfg, s, d, t, snapshot)
    else:
        raise ValueError("unknown mode %r" % mode)
    return PacketHeader(src_gs.id, dst_gs.id, encode_path(cfg, path))


def attack_paths(cfg, src_sat, dst_sat, target, t, rng=None,
                 src_gs_id=0, dst_gs_id=0, snapshot=None):
    """Malicious headers steering traffic through a target satellite or link:
    the shortest-path concatenation via the target, and a variant that leaves
    the shortest path at a random node before detouring to the target."""
    if rng is None:
        rng = np.random.default_rng(0)
    if snapshot is None:
        snapshot = DelaySnapshot(cfg, t)
    primary = dijkstra(snapshot, src_sat, dst_sat)

    if isinstance(target[0], (int, np.integer)):  # a satellite
        target = SatelliteId(*target)
        if target in primary:
            raise ValueError("target already on the shortest path")
        via = dijkstra(snapshot, src_sat, target)[:-1] \
            + dijkstra(snapshot, target, dst_sat)
        detour_from = _random_prefix(primary, rng)
        detour = primary[:detour_from] \
            + dijkstra(snapshot, primary[detour_from], target)[:-1] \
            + dijkstra(snapshot, target, dst_sat)
    else:
        a, b = (SatelliteId(*target[0]), SatelliteId(*target[1]))
        if (a, b) in zip(primary, primary[1:]) or \
                (b, a) in zip(primary, primary[1:]):
            raise ValueError("target already on the shortest path")
        via = dijkstra(snapshot, src_sat, a) \
            + dijkstra(snapshot, b, dst_sat)
        detour_from = _random_prefix(primary, rng)
        detour = primary[:detour_from] \
            + dijkstra(snapshot, primary[detour_from], a) \
            + dijkstra(snapshot, b, dst_sat)

    return [PacketHeader(src_gs_id, dst_gs_id, encode_path(cfg, p))
            for p in (via, detour)]


def _random_prefix(primary, rng):
    if len(primary) <= 2:
        return 0
    return int(rng.integers(0, len(primary) - 1))


def load_gs_db(path):
    """GS database from a JSON list of {id, lat, lon[, min_elevation]}."""
    with open(path) as fh:
        rows = json.load(fh)
    db = {}
    for row in rows:
        db[row["id"]] = GroundStation(
            row["id"], row["lat"], row["lon"],
            row.get("min_elevation", DEFAULT_MIN_ELEVATION_DEG))
    return db


def load_city_corpus(min_elevation_deg=DEFAULT_MIN_ELEVATION_DEG):
    """The bundled 55-city ground-station corpus."""
    db = {}
    text = resources.files("leolab").joinpath("data/cities.csv").read_text()
    for row in csv.DictReader(text.splitlines()):
        gs_id = int(row["id"])
        db[gs_id] = GroundStation(gs_id, float(row["lat"]), float(row["lon"]),
                                  min_elevation_deg)
    return db
