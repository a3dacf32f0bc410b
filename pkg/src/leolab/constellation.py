"""Torus topology and time-parameterized geometry of a single-shell constellation."""
import json
import math
from dataclasses import dataclass, field, asdict
from enum import IntEnum
from typing import NamedTuple

import numpy as np


class Direction(IntEnum):
    # Values match the 2-bit wire encoding of path tags.
    EAST = 0        # next orbital plane
    WEST = 1        # previous orbital plane
    PROGRADE = 2    # next in-plane index (direction of motion)
    RETROGRADE = 3  # previous in-plane index


OPPOSITE = {
    Direction.EAST: Direction.WEST,
    Direction.WEST: Direction.EAST,
    Direction.PROGRADE: Direction.RETROGRADE,
    Direction.RETROGRADE: Direction.PROGRADE,
}

CROSS_DIRS = (Direction.EAST, Direction.WEST)
INTRA_DIRS = (Direction.PROGRADE, Direction.RETROGRADE)


def is_cross_dir(d):
    return d in CROSS_DIRS


class SatelliteId(NamedTuple):
    plane: int
    index: int


@dataclass(frozen=True)
class ConstellationConfig:
    num_planes: int = 24
    sats_per_plane: int = 66
    altitude_m: float = 550e3
    inclination_deg: float = 53.0
    # Fraction of the in-plane spacing applied between adjacent planes.  The
    # default keeps the accumulated offset at the plane wrap-around under half
    # an in-plane slot while keeping every link transversal to the equator.
    phase_offset: float = 0.5 / 24
    earth_radius_m: float = 6371e3
    mu_m3s2: float = 3.986004418e14
    earth_rotation_rad_s: float = 7.2921159e-5
    light_speed_m_s: float = 299792458.0
    intra_length_tolerance: float = 0.02

    def __post_init__(self):
        if self.num_planes < 3 or self.sats_per_plane < 4:
            raise ValueError("need num_planes >= 3 and sats_per_plane >= 4")
        if not (0 <= self.inclination_deg < 90):
            # 0 is allowed only so that verify_model_assumptions can report the
            # degenerate equator-parallel geometry; routing needs i > 0.
            raise ValueError("inclination must be in [0, 90) degrees")
        if not (0 <= self.phase_offset < 1):
            raise ValueError("phase_offset must be in [0, 1)")

    @property
    def semi_major_m(self):
        return self.earth_radius_m + self.altitude_m

    @property
    def inclination_rad(self):
        return math.radians(self.inclination_deg)

    @property
    def period_s(self):
        return 2 * math.pi * math.sqrt(self.semi_major_m ** 3 / self.mu_m3s2)

    @property
    def mean_motion_rad_s(self):
        return 2 * math.pi / self.period_s

    @property
    def intra_length_m(self):
        # Chord between consecutive satellites on the same circular orbit.
        return 2 * self.semi_major_m * math.sin(math.pi / self.sats_per_plane)

    @property
    def intra_delay_s(self):
        return self.intra_length_m / self.light_speed_m_s

    def node_id(self, sat):
        return sat.plane * self.sats_per_plane + sat.index

    def sat_of_node(self, n):
        return SatelliteId(n // self.sats_per_plane, n % self.sats_per_plane)

    def wrap(self, plane, index):
        return SatelliteId(plane % self.num_planes, index % self.sats_per_plane)

    @classmethod
    def from_file(cls, path):
        """Load from a plain key=value text file ('#' starts a comment)."""
        values = {}
        int_keys = {"num_planes", "sats_per_plane"}
        with open(path) as f:
            for line in f:
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, _, raw = line.partition("=")
                key = key.strip()
                raw = raw.strip()
                if key not in cls.__dataclass_fields__:
                    raise ValueError(f"unknown config key: {key}")
                values[key] = int(raw) if key in int_keys else float(raw)
        return cls(**values)

    def to_file(self, path):
        with open(path, "w") as f:
            for key in self.__dataclass_fields__:
                f.write(f"{key} = {getattr(self, key)}\n")


def neighbor(cfg, sat, direction):
    if direction == Direction.EAST:
        return cfg.wrap(sat.plane + 1, sat.index)
    if direction == Direction.WEST:
        return cfg.wrap(sat.plane - 1, sat.index)
    if direction == Direction.PROGRADE:
        return cfg.wrap(sat.plane, sat.index + 1)
    if direction == Direction.RETROGRADE:
        return cfg.wrap(sat.plane, sat.index - 1)
    raise ValueError(f"bad direction: {direction!r}")


def step_between(cfg, a, b):
    """Direction of the single +Grid hop from a to b."""
    for d in Direction:
        if neighbor(cfg, a, d) == b:
            return d
    raise ValueError(f"{a} and {b} are not neighbors")


def link_key(a, b):
    return (a, b) if a <= b else (b, a)


def link_kind(cfg, a, b):
    if a.plane == b.plane:
        return "intra_orbit"
    return "cross_orbit"


def phase_rad(cfg, sat, t):
    """Orbital phase (argument of latitude) of sat at time t."""
    u0 = 2 * math.pi * (sat.index + cfg.phase_offset * sat.plane) / cfg.sats_per_plane
    return (u0 + cfg.mean_motion_rad_s * t) % (2 * math.pi)


def raan_rad(cfg, plane):
    return 2 * math.pi * plane / cfg.num_planes


@dataclass
class GeoState:
    latitude_rad: float
    longitude_rad: float
    ecef: np.ndarray
    heading: str  # "northbound" | "southbound"


def _eci_from_angles(cfg, omega, u):
    a = cfg.semi_major_m
    inc = cfg.inclination_rad
    cu, su = np.cos(u), np.sin(u)
    co, so = np.cos(omega), np.sin(omega)
    x = a * (co * cu - so * su * np.cos(inc))
    y = a * (so * cu + co * su * np.cos(inc))
    z = a * su * np.sin(inc)
    return np.stack([x, y, z], axis=-1)


def satellite_eci(cfg, sat, t):
    return _eci_from_angles(cfg, raan_rad(cfg, sat.plane), phase_rad(cfg, sat, t))


def satellite_geo(cfg, sat, t, earth_fixed=False):
    u = phase_rad(cfg, sat, t)
    pos = satellite_eci(cfg, sat, t)
    lat = math.asin(max(-1.0, min(1.0, pos[2] / cfg.semi_major_m)))
    lon = math.atan2(pos[1], pos[0])
    if earth_fixed:
        lon = (lon - cfg.earth_rotation_rad_s * t + math.pi) % (2 * math.pi) - math.pi
        rot = -cfg.earth_rotation_rad_s * t
        c, s = math.cos(rot), math.sin(rot)
        pos = np.array([c * pos[0] - s * pos[1], s * pos[0] + c * pos[1], pos[2]])
    heading = "northbound" if math.cos(u) >= 0 else "southbound"
    return GeoState(lat, lon, pos, heading)


def all_positions(cfg, t):
    """ECI positions of every satellite at t, shaped (num_planes, sats_per_plane, 3)."""
    P, S = cfg.num_planes, cfg.sats_per_plane
    planes = np.arange(P)[:, None]
    indices = np.arange(S)[None, :]
    omega = 2 * np.pi * planes / P * np.ones((P, S))
    u = 2 * np.pi * (indices + cfg.phase_offset * planes) / S + cfg.mean_motion_rad_s * t
    return _eci_from_angles(cfg, omega, u)


def all_latitudes(cfg, t):
    return np.arcsin(np.clip(all_positions(cfg, t)[..., 2] / cfg.semi_major_m, -1, 1))


def cross_delays(cfg, t, positions=None):
    """Delay of every cross-orbit link (p,i)-(p+1,i), shaped (num_planes, sats_per_plane)."""
    pos = all_positions(cfg, t) if positions is None else positions
    diff = np.roll(pos, -1, axis=0) - pos
    return np.linalg.norm(diff, axis=-1) / cfg.light_speed_m_s


def cross_midpoint_lats(cfg, t, positions=None):
    """Signed latitude of every cross-orbit link midpoint, shaped (P, S)."""
    pos = all_positions(cfg, t) if positions is None else positions
    mid = (pos + np.roll(pos, -1, axis=0)) / 2
    return np.arcsin(np.clip(mid[..., 2] / np.linalg.norm(mid, axis=-1), -1, 1))


def link_length_m(cfg, a, b, t):
    pa = satellite_eci(cfg, a, t)
    pb = satellite_eci(cfg, b, t)
    return float(np.linalg.norm(pa - pb))


def link_delay(cfg, link, t):
    a, b = link
    return link_length_m(cfg, a, b, t) / cfg.light_speed_m_s


def equator_distance_rad(cfg, a, b, t):
    """delta_t of a link: |latitude| of its midpoint."""
    mid = (satellite_eci(cfg, a, t) + satellite_eci(cfg, b, t)) / 2
    norm = np.linalg.norm(mid)
    return abs(math.asin(float(mid[2] / norm)))


@dataclass
class AssumptionCheck:
    samples: int = 0
    violations: int = 0
    worst_margin: float = float("inf")


@dataclass
class AssumptionReport:
    property1_spread: float = 0.0
    property1_tolerance: float = 0.0
    property2: AssumptionCheck = field(default_factory=AssumptionCheck)
    assumption1: AssumptionCheck = field(default_factory=AssumptionCheck)
    assumption2: AssumptionCheck = field(default_factory=AssumptionCheck)

    @property
    def property1_ok(self):
        return self.property1_spread <= self.property1_tolerance

    def to_json(self, path=None):
        text = json.dumps(asdict(self), indent=2)
        if path is not None:
            with open(path, "w") as f:
                f.write(text)
        return text


def _dijkstra_delay(cfg, snapshot_cross, s, d):
    # Local shortest-path evaluation used only as the Assumption-1 oracle.
    import heapq
    P, S = cfg.num_planes, cfg.sats_per_plane
    intra = cfg.intra_delay_s
    dist = {s: 0.0}
    heap = [(0.0, s)]
    seen = set()
    while heap:
        w, node = heapq.heappop(heap)
        if node == d:
            return w
        if node in seen:
            continue
        seen.add(node)
        p, i = node
        nbrs = (
            (cfg.wrap(p, i + 1), intra),
            (cfg.wrap(p, i - 1), intra),
            (cfg.wrap(p + 1, i), snapshot_cross[p][i]),
            (cfg.wrap(p - 1, i), snapshot_cross[(p - 1) % P][i]),
        )
        for nbr, cost in nbrs:
            nd = w + cost
            if nd < dist.get(nbr, math.inf):
                dist[nbr] = nd
                heapq.heappush(heap, (nd, nbr))
    return math.inf


def verify_model_assumptions(cfg, sample_times, sample_pairs=50, rng=None):
    """Empirically check the link-length properties and the two path/geometry
    assumptions the routing theory relies on.  Violations are reported, not
    raised."""
    if len(sample_times) == 0:
        raise ValueError("need at least one sample time")
    rng = np.random.default_rng(0) if rng is None else rng
    report = AssumptionReport(property1_tolerance=cfg.intra_length_tolerance)
    P, S = cfg.num_planes, cfg.sats_per_plane

    # Property 1: relative spread of intra-orbit lengths over the samples.
    lengths = []
    for t in sample_times:
        pos = all_positions(cfg, t)
        d = np.linalg.norm(np.roll(pos, -1, axis=1) - pos, axis=-1)
        lengths.append((d.min(), d.max()))
    lo = min(x for x, _ in lengths)
    hi = max(x for _, x in lengths)
    report.property1_spread = (hi - lo) / lo if lo > 0 else float("inf")

    # Property 2: within every column, cross-orbit link length must be
    # anti-monotone in the links' distance to the equator.
    p2 = report.property2
    p2.worst_margin = math.inf
    for t in sample_times:
        pos = all_positions(cfg, t)
        delays = cross_delays(cfg, t, pos)
        mid = (pos + np.roll(pos, -1, axis=0)) / 2
        delta = np.abs(np.arcsin(np.clip(mid[..., 2] / np.linalg.norm(mid, axis=-1), -1, 1)))
        for p in range(P):
            order = np.argsort(delta[p])
            ds = delays[p][order]  # sorted by increasing equator distance
            p2.samples += 1
            diffs = ds[:-1] - ds[1:]  # should all be >= 0 (up to fp noise)
            margin = float(diffs.min())
            p2.worst_margin = min(p2.worst_margin, margin)
            if margin < -1e-12 * float(ds.mean()):
                p2.violations += 1

    # Assumption 1: pure-row / pure-column paths beat any mixed path between
    # same-plane and same-index pairs (Dijkstra as the oracle).
    a1 = report.assumption1
    a1.worst_margin = math.inf
    for t in sample_times[: max(1, len(sample_times) // 2)]:
        snap = cross_delays(cfg, t)
        for _ in range(max(1, sample_pairs // len(sample_times) + 1)):
            p = int(rng.integers(P))
            i = int(rng.integers(S))
            if rng.integers(2):  # same-plane pair
                j = int((i + rng.integers(1, S)) % S)
                s, d = SatelliteId(p, i), SatelliteId(p, j)
                hops = min((j - i) % S, (i - j) % S)
                pure = hops * cfg.intra_delay_s
            else:  # same-index pair
                q = int((p + rng.integers(1, P)) % P)
                s, d = SatelliteId(p, i), SatelliteId(q, i)
                east = sum(snap[(p + k) % P][i] for k in range((q - p) % P))
                west = sum(snap[(p - 1 - k) % P][i] for k in range((p - q) % P))
                pure = min(east, west)
            best = _dijkstra_delay(cfg, snap, s, d)
            a1.samples += 1
            margin = best - pure  # >= 0 means the pure path is optimal
            a1.worst_margin = min(a1.worst_margin, margin)
            if margin < -1e-12 * pure:
                a1.violations += 1

    # Assumption 2: the equator crosses the midpoint of at most one link per
    # column, and is parallel to no link.  A full index ring between two
    # adjacent planes meets the equator once on its ascending side and once on
    # its descending side, so any column (which sits on one side) sees at most
    # one crossing; we verify per side, and flag equator-parallel links.
    a2 = report.assumption2
    a2.worst_margin = math.inf
    for t in sample_times:
        pos = all_positions(cfg, t)
        planes = np.arange(P)[:, None]
        indices = np.arange(S)[None, :]
        u = (2 * np.pi * (indices + cfg.phase_offset * planes) / S
             + cfg.mean_motion_rad_s * t)
        lat = np.arcsin(np.clip(pos[..., 2] / cfg.semi_major_m, -1, 1))
        east_lat = np.roll(lat, -1, axis=0)
        parallel = np.abs(lat - east_lat)
        a2.worst_margin = min(a2.worst_margin, float(parallel.min()))
        straddle = (lat * east_lat) < 0
        ascending = np.cos((u + np.roll(u, -1, axis=0)) / 2) > 0
        for p in range(P):
            a2.samples += 1
            asc = int((straddle[p] & ascending[p]).sum())
            desc = int((straddle[p] & ~ascending[p]).sum())
            if asc > 1 or desc > 1 or parallel[p].min() == 0:
                a2.violations += 1

    return report
