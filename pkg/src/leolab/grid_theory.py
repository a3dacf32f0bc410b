"""Grid enumeration, type/motion classification, and candidate shortest paths.

A source-destination grid is one of the four parallelogram sub-graphs that have
the two satellites as opposite corners.  Rows are cross-orbit link paths at a
fixed in-plane index; columns are the sets of cross-orbit links between two
adjacent planes.  The shape of the in-grid shortest path depends on the grid's
type (where the equator enters it) and on how its satellites move at the
queried time.
"""
import heapq
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constellation import SatelliteId, all_latitudes, phase_rad
from .snapshot import DelaySnapshot

TYPE_A = "TypeA"
TYPE_B = "TypeB"
SINGLE_PATH = "SinglePath"

SAME_DIRECTION = "SameDirection"
DIFF_SINGLE_EXTREME = "DiffDirSingleExtreme"
DIFF_BOTH_EXTREMES = "DiffDirBothExtremes"


class MotionClass(NamedTuple):
    kind: str
    pole: str | None = None  # "north" | "south" for DiffDirSingleExtreme


@dataclass(frozen=True)
class Grid:
    source: SatelliteId
    destination: SatelliteId
    planes: tuple    # plane ids from source's to destination's, inclusive
    indices: tuple   # in-plane indices from source's to destination's, inclusive

    @property
    def num_cols(self):
        return len(self.planes)

    @property
    def num_rows(self):
        return len(self.indices)

    @property
    def is_single_path(self):
        return self.num_cols == 1 or self.num_rows == 1

    def satellites(self):
        return [SatelliteId(p, i) for p in self.planes for i in self.indices]

    def contains(self, sat):
        return sat.plane in self.planes and sat.index in self.indices

    def links(self):
        """All (a, b) links inside the grid, cross-orbit and intra-orbit."""
        out = []
        for ci in range(self.num_cols - 1):
            for i in self.indices:
                out.append((SatelliteId(self.planes[ci], i),
                            SatelliteId(self.planes[ci + 1], i)))
        for p in self.planes:
            for ri in range(self.num_rows - 1):
                out.append((SatelliteId(p, self.indices[ri]),
                            SatelliteId(p, self.indices[ri + 1])))
        return out

    def cross_link(self, col, row_index):
        """The cross-orbit link of column col at in-plane index row_index."""
        return (SatelliteId(self.planes[col], row_index),
                SatelliteId(self.planes[col + 1], row_index))


def _span(a, b, direction, modulus):
    length = (b - a) % modulus if direction > 0 else (a - b) % modulus
    return tuple((a + direction * k) % modulus for k in range(length + 1))


def enumerate_grids(cfg, s, d):
    """The four s-d grids, or the two single-path grids for degenerate pairs."""
    if s == d:
        raise ValueError("source and destination coincide")
    P, S = cfg.num_planes, cfg.sats_per_plane
    if s.plane == d.plane:
        return [Grid(s, d, (s.plane,), _span(s.index, d.index, q, S))
                for q in (1, -1)]
    if s.index == d.index:
        return [Grid(s, d, _span(s.plane, d.plane, e, P), (s.index,))
                for e in (1, -1)]
    return [Grid(s, d, _span(s.plane, d.plane, e, P), _span(s.index, d.index, q, S))
            for e in (1, -1) for q in (1, -1)]


def minimal_grid(cfg, s, d):
    """Smallest of the four grids plus its row and column counts (ties broken
    toward fewer columns)."""
    if s == d:
        raise ValueError("source and destination coincide")
    grids = enumerate_grids(cfg, s, d)
    best = min(grids, key=lambda g: (g.num_rows * g.num_cols, g.num_cols))
    return best, best.num_rows, best.num_cols


def _grid_latitudes(cfg, grid, t, lats=None):
    if lats is None:
        lats = all_latitudes(cfg, t)
    return lats[np.ix_(list(grid.planes), list(grid.indices))]


def _straddle_count(cfg, grid, t):
    lat = _grid_latitudes(cfg, grid, t)
    count = int(((lat[:-1, :] * lat[1:, :]) < 0).sum())   # cross-orbit links
    count += int(((lat[:, :-1] * lat[:, 1:]) < 0).sum())  # intra-orbit links
    return count


def source_equator_crossings(cfg, s):
    """The two times in [0, period) at which s's latitude crosses zero."""
    u0 = phase_rad(cfg, s, 0.0)
    n = cfg.mean_motion_rad_s
    return tuple(sorted(((target - u0) % (2 * math.pi)) / n
                        for target in (0.0, math.pi)))


def classify_type(cfg, grid, crossing=0):
    """Type of a grid: at the instant the source crosses the equator, a grid
    with no equator-straddling links is type-A, otherwise type-B.  The result
    is time-invariant."""
    if grid.is_single_path:
        return SINGLE_PATH
    t0 = source_equator_crossings(cfg, grid.source)[crossing]
    return TYPE_A if _straddle_count(cfg, grid, t0) == 0 else TYPE_B


def classify_motion(cfg, grid, t, lats=None):
    lat = _grid_latitudes(cfg, grid, t, lats)
    planes = np.array(grid.planes)[:, None]
    indices = np.array(grid.indices)[None, :]
    u = (2 * np.pi * (indices + cfg.phase_offset * planes) / cfg.sats_per_plane
         + cfg.mean_motion_rad_s * t)
    northbound = np.cos(u) >= 0
    if bool(northbound.all()) or not bool(northbound.any()):
        return MotionClass(SAME_DIRECTION)

    # An extreme parallel runs through the grid wherever two linked satellites
    # head in different directions; the sign of their latitudes tells which.
    crossed = set()
    for flip, mid in (
        (northbound[:-1, :] != northbound[1:, :], (lat[:-1, :] + lat[1:, :]) / 2),
        (northbound[:, :-1] != northbound[:, 1:], (lat[:, :-1] + lat[:, 1:]) / 2),
    ):
        if bool((flip & (mid > 0)).any()):
            crossed.add("north")
        if bool((flip & (mid < 0)).any()):
            crossed.add("south")

    if len(crossed) == 1:
        pole = crossed.pop()
        inc = cfg.inclination_rad
        end_rows = np.concatenate([lat[:, 0], lat[:, -1]])
        # Both end rows must be closer to the equator than to the other
        # extreme parallel.
        if pole == "north":
            near = bool((end_rows > -inc / 2).all())
        else:
            near = bool((end_rows < inc / 2).all())
        if near:
            return MotionClass(DIFF_SINGLE_EXTREME, pole)
    return MotionClass(DIFF_BOTH_EXTREMES)


def _column_delays(cfg, grid, snapshot):
    """Cross-link delays of the grid, shaped (num_cols-1, num_rows)."""
    P = cfg.num_planes
    cols = []
    for ci in range(grid.num_cols - 1):
        # the stored cross delay for link (p,i)-(p+1,i) lives at plane p
        p = grid.planes[ci] if (grid.planes[ci] + 1) % P == grid.planes[ci + 1] \
            else grid.planes[ci + 1]
        cols.append(snapshot.cross[p, list(grid.indices)])
    return np.array(cols)


def _single_path(grid):
    if grid.num_cols == 1:
        return [SatelliteId(grid.planes[0], i) for i in grid.indices]
    return [SatelliteId(p, grid.indices[0]) for p in grid.planes]


def _staircase_path(grid, rows_per_col):
    """Path from s to d crossing column c at in-plane index rows_per_col[c],
    connected with intra-orbit runs inside the grid."""
    order = {i: k for k, i in enumerate(grid.indices)}
    path = [grid.source]
    cur = grid.source.index
    for ci in range(grid.num_cols - 1):
        target = rows_per_col[ci]
        step = 1 if order[target] >= order[cur] else -1
        while cur != target:
            cur = grid.indices[order[cur] + step]
            path.append(SatelliteId(grid.planes[ci], cur))
        path.append(SatelliteId(grid.planes[ci + 1], cur))
    target = grid.destination.index
    step = 1 if order[target] >= order[cur] else -1
    while cur != target:
        cur = grid.indices[order[cur] + step]
        path.append(SatelliteId(grid.planes[-1], cur))
    return path


def _row_path(grid, row_index):
    """s -> (intra to row) -> full row of cross links -> (intra to d)."""
    return _staircase_path(grid, [row_index] * (grid.num_cols - 1))


def _optimal_staircase(grid, snapshot, col_delays):
    """The best in-grid path crossing each column exactly once, by dynamic
    programming over (column, row) with intra-orbit connector costs.

    Real constellations deviate slightly from the idealized per-column length
    monotonicity (the phase offset wraps at the last plane), so near an
    extreme parallel the per-column shortest links can zigzag between rows
    whose lengths differ by less than an intra-orbit hop; this DP resolves
    those near-ties exactly while keeping the one-cross-per-column shape the
    candidate theory predicts."""
    R = grid.num_rows
    intra = snapshot.intra
    offsets = intra * np.arange(R)
    cost = col_delays[0] + offsets  # reach row r from s, cross column 0
    choice = []
    for ci in range(1, grid.num_cols - 1):
        up = np.minimum.accumulate(cost - offsets)
        down = np.minimum.accumulate((cost + offsets)[::-1])[::-1]
        best = np.minimum(up + offsets, down - offsets)
        arg = np.empty(R, dtype=int)
        bu = 0
        for r in range(R):
            if cost[bu] - offsets[bu] > cost[r] - offsets[r]:
                bu = r
            arg[r] = bu
        bd = R - 1
        for r in range(R - 1, -1, -1):
            if cost[bd] + offsets[bd] > cost[r] + offsets[r]:
                bd = r
            if down[r] - offsets[r] < up[r] + offsets[r]:
                arg[r] = bd
        choice.append(arg)
        cost = best + col_delays[ci]
    end = cost + (offsets[-1] - offsets)
    r = int(np.argmin(end))
    rows = [r]
    for arg in reversed(choice):
        r = int(arg[r])
        rows.append(r)
    rows.reverse()
    return _staircase_path(grid, [grid.indices[r] for r in rows])


def _restricted_dijkstra(snapshot, grid, allowed_cross):
    """Shortest s-d path using any intra-orbit grid link but only the given
    cross-orbit links (used for grids close to both extreme parallels)."""
    allowed = set()
    for a, b in allowed_cross:
        allowed.add((a, b))
        allowed.add((b, a))
    nodes = set(grid.satellites())
    s, d = grid.source, grid.destination
    dist = {s: 0.0}
    prev = {}
    heap = [(0.0, 0, s)]
    seen = set()
    while heap:
        w, hops, node = heapq.heappop(heap)
        if node == d:
            break
        if node in seen:
            continue
        seen.add(node)
        for nbr, cost in snapshot.neighbors(node):
            if nbr not in nodes:
                continue
            if node.plane != nbr.plane and (node, nbr) not in allowed:
                continue
            nd = w + cost
            if nd < dist.get(nbr, math.inf) - 1e-15:
                dist[nbr] = nd
                prev[nbr] = node
                heapq.heappush(heap, (nd, hops + 1, nbr))
    if d not in dist:
        return None
    path = [d]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def candidate_paths(cfg, grid, t, snapshot=None, lats=None):
    """Candidate shortest paths of a grid at time t, per its type and motion
    class.  Links farther from the equator (or closer to the crossed extreme
    parallel) are shorter, so per-column extremal links are selected by
    delay."""
    if snapshot is None:
        snapshot = DelaySnapshot(cfg, t)
    if grid.is_single_path:
        return [_single_path(grid)]

    gtype = classify_type(cfg, grid)
    motion = classify_motion(cfg, grid, t, lats)
    col_delays = _column_delays(cfg, grid, snapshot)  # (C-1, R)
    dp_path = _optimal_staircase(grid, snapshot, col_delays)

    if motion.kind == SAME_DIRECTION:
        if gtype == TYPE_A:
            # One cross-orbit link per column, the farthest from the equator
            # (= shortest in the column); row ties go to the source row.
            rows = []
            for ci in range(grid.num_cols - 1):
                best = int(np.argmin(col_delays[ci]))
                if col_delays[ci][0] == col_delays[ci][best]:
                    best = 0
                rows.append(grid.indices[best])
            return [_staircase_path(grid, rows), dp_path]
        # Type-B: exactly one cross-orbit run, i.e. one full row, whose first
        # and last links are no closer to the equator (no longer) than the
        # links adjacent to s and d.
        eps = 1e-15
        d_s = col_delays[0][0]
        d_d = col_delays[-1][-1]
        out = []
        for ri, row in enumerate(grid.indices):
            if col_delays[0][ri] <= d_s + eps and col_delays[-1][ri] <= d_d + eps:
                out.append(_row_path(grid, row))
        out.append(dp_path)
        return out

    if motion.kind == DIFF_SINGLE_EXTREME:
        if gtype == TYPE_A:
            # Single-row paths between the rows holding the closest-to-extreme
            # links of the source and destination columns.
            a = int(np.argmin(col_delays[0]))
            b = int(np.argmin(col_delays[-1]))
            lo, hi = min(a, b), max(a, b)
            return [_row_path(grid, grid.indices[ri])
                    for ri in range(lo, hi + 1)] + [dp_path]
        # Type-B: staircase through the per-column closest-to-extreme links.
        rows = [grid.indices[int(np.argmin(col_delays[ci]))]
                for ci in range(grid.num_cols - 1)]
        return [_staircase_path(grid, rows), dp_path]

    # Close to both extreme parallels: split at the row nearest the equator,
    # gather the sub-grids' candidate cross links, and search over them.
    lat_grid = _grid_latitudes(cfg, grid, t, lats)
    row_mean = np.abs(lat_grid).mean(axis=0)
    cut = int(np.argmin(row_mean))
    cut = max(1, min(grid.num_rows - 2, cut))
    top = Grid(grid.source, SatelliteId(grid.planes[-1], grid.indices[cut]),
               grid.planes, grid.indices[:cut + 1])
    bottom = Grid(SatelliteId(grid.planes[0], grid.indices[cut]),
                  grid.destination, grid.planes, grid.indices[cut:])
    allowed = set()
    for sub in (top, bottom):
        for path in candidate_paths(cfg, sub, t, snapshot, lats):
            for a, b in zip(path, path[1:]):
                if a.plane != b.plane:
                    allowed.add((a, b) if a <= b else (b, a))
    for a, b in zip(dp_path, dp_path[1:]):
        if a.plane != b.plane:
            allowed.add((a, b) if a <= b else (b, a))
    best = _restricted_dijkstra(snapshot, grid, allowed)
    out = [dp_path]
    if best is not None:
        out.insert(0, best)
    return out


def path_hops(path):
    return len(path) - 1


def theory_shortest_path(cfg, s, d, t, snapshot=None):
    """Minimum-delay path over the candidate sets of all s-d grids."""
    if s == d:
        return [s]
    if snapshot is None:
        snapshot = DelaySnapshot(cfg, t)
    lats = all_latitudes(cfg, t)
    best = None
    best_key = None
    for grid in enumerate_grids(cfg, s, d):
        for path in candidate_paths(cfg, grid, t, snapshot, lats):
            key = (snapshot.path_delay(path), len(path), tuple(path))
            if best_key is None or key < best_key:
                best, best_key = path, key
    return best


def path_to_json(cfg, path, snapshot):
    return {
        "satellites": [[p, i] for p, i in path],
        "link_delays": [snapshot.link_delay(a, b) for a, b in zip(path, path[1:])],
    }
