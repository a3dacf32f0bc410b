"""Ingress-satellite packet validation.

A packet is checked only at its ingress satellite, against static topology
knowledge: admission + rate (pre-check), destination reachability of the
path's terminal satellite (check 1), direction-inversion shape (check 2),
and link budget of the minimal source-destination grid (check 3).  The
checks read the tag list, never per-link network state.
"""
import json
from dataclasses import dataclass, field

from .constellation import OPPOSITE, SatelliteId, is_cross_dir, neighbor

CHECK_PRE = "pre"
CHECK_1 = "check1"
CHECK_2 = "check2"
CHECK_3 = "check3"

BUCKET_WINDOW_S = 0.1
MAX_INVERSION_STEPS = 3
CHECK3_AXIS_EXCESS = 1


class TokenBucket:
    """Token bucket with capacity rate * BUCKET_WINDOW_S bits, driven by an
    explicit clock."""

    def __init__(self, rate_bps, t=0.0):
        self.rate = float(rate_bps)
        self.capacity = self.rate * BUCKET_WINDOW_S
        self.tokens = self.capacity
        self.last = t

    def admit(self, size_bits, t):
        if t > self.last:
            self.tokens = min(self.capacity,
                              self.tokens + (t - self.last) * self.rate)
            self.last = t
        if self.tokens >= size_bits:
            self.tokens -= size_bits
            return True
        return False


@dataclass
class AdmissionEntry:
    ingress: tuple
    rate_bps: float
    bucket: TokenBucket


class AdmissionTable:
    """Per GS-pair admission: the single allowed ingress satellite and the
    contracted rate."""

    def __init__(self):
        self.entries = {}

    def register(self, src_gs, dst_gs, ingress, rate_bps, t=0.0):
        self.entries[(src_gs, dst_gs)] = AdmissionEntry(
            tuple(ingress), float(rate_bps), TokenBucket(rate_bps, t))

    def lookup(self, src_gs, dst_gs):
        return self.entries.get((src_gs, dst_gs))

    @classmethod
    def from_file(cls, path, t=0.0):
        with open(path) as fh:
            rows = json.load(fh)
        table = cls()
        for row in rows:
            table.register(row["src_gs"], row["dst_gs"],
                           tuple(row["ingress"]), row["rate_bps"], t)
        return table


@dataclass
class ValidationVerdict:
    passed: bool
    failed_check: str | None = None
    metrics: dict = field(default_factory=dict)


def pre_check(table, header, ingress, size_bits, t):
    entry = table.lookup(header.src_gs, header.dst_gs)
    if entry is None or entry.ingress != tuple(ingress):
        return False
    return entry.bucket.admit(size_bits, t)


def _terminal_sat(cfg, tags, ingress):
    sat = ingress
    for tag in tags:
        for _ in range(tag.steps):
            sat = neighbor(cfg, sat, tag.direction)
    return sat


def check1(cfg, tags, ingress, dst_gs, t, gs_db):
    """Terminal satellite of the tagged path is RF-visible from the
    destination GS (fails closed when the GS sees no satellite)."""
    from .ground_segment import visible_sats
    gs = gs_db[dst_gs]
    return _terminal_sat(cfg, tags, ingress) in set(visible_sats(cfg, gs, t))


def _inversion_metrics(tags):
    """Inversion count and total inverted steps over the tag list.

    A tag is an inversion when its direction opposes any earlier tag on the
    same axis, so an out-and-back excursion counts twice."""
    seen = [False, False, False, False]
    inversions = 0
    inv_steps = 0
    intra_steps = 0
    cross_steps = 0
    for tag in tags:
        if is_cross_dir(tag.direction):
            cross_steps += tag.steps
        else:
            intra_steps += tag.steps
        if seen[OPPOSITE[tag.direction]]:
            inversions += 1
            inv_steps += tag.steps
        seen[tag.direction] = True
    return inversions, inv_steps, intra_steps, cross_steps


def check2(tags, gmin_single_path):
    """At most one direction inversion across both axes; its length is at
    most 3 links unless the minimal grid is single-path."""
    inversions, inv_steps, _, _ = _inversion_metrics(tags)
    if inversions > 1:
        return False
    return gmin_single_path or inv_steps <= MAX_INVERSION_STEPS


def check3(tags, r_min, c_min):
    """In-grid budget: a path inside the minimal grid needs (r_min - 1)
    intra-orbit and (c_min - 1) cross-orbit links; one extra link per axis is
    tolerated.  An out-and-back excursion costs two links on one axis, so it
    always trips this check.  Single-path grids get the two-link allowance
    instead: a failure there forces a detour off the only path."""
    _, _, intra_steps, cross_steps = _inversion_metrics(tags)
    allow = 2 if (r_min == 1 or c_min == 1) else CHECK3_AXIS_EXCESS
    return intra_steps - (r_min - 1) <= allow \
        and cross_steps - (c_min - 1) <= allow


def validate(cfg, table, header, ingress, size_bits, t, gs_db):
    """Run the pre-check then checks 1-3, short-circuiting; checks 1-3 share
    a single pass over the tag list (metrics report the pass count)."""
    if not pre_check(table, header, ingress, size_bits, t):
        return ValidationVerdict(False, CHECK_PRE)

    from .ground_segment import visible_set

    # one tag pass: terminal position, inversion shape, and step totals
    plane, index = ingress
    seen = [False, False, False, False]
    inversions = 0
    inv_steps = 0
    intra_steps = 0
    cross_steps = 0
    for tag in header.tags:
        direction = tag.direction
        steps = tag.steps
        if direction < 2:  # East / West
            plane += steps if direction == 0 else -steps
            cross_steps += steps
        else:  # Prograde / Retrograde
            index += steps if direction == 2 else -steps
            intra_steps += steps
        if seen[OPPOSITE[direction]]:
            inversions += 1
            inv_steps += steps
        seen[direction] = True
    P, S = cfg.num_planes, cfg.sats_per_plane
    sat = SatelliteId(plane % P, index % S)

    metrics = {"tag_passes": 1, "inversions": inversions,
               "inversion_steps": inv_steps, "intra_steps": intra_steps,
               "cross_steps": cross_steps}

    if sat not in visible_set(cfg, gs_db[header.dst_gs], t):
        return ValidationVerdict(False, CHECK_1, metrics)

    # minimal-grid row/column budget, straight from the torus distances
    dp = abs(sat.plane - ingress.plane)
    di = abs(sat.index - ingress.index)
    c_min = min(dp, P - dp) + 1
    r_min = min(di, S - di) + 1
    single = c_min == 1 or r_min == 1
    metrics["r_min"], metrics["c_min"] = r_min, c_min

    if inversions > 1 or (not single and inv_steps > MAX_INVERSION_STEPS):
        return ValidationVerdict(False, CHECK_2, metrics)

    allow = 2 if single else CHECK3_AXIS_EXCESS
    if intra_steps - (r_min - 1) > allow \
            or cross_steps - (c_min - 1) > allow:
        return ValidationVerdict(False, CHECK_3, metrics)
    return ValidationVerdict(True, None, metrics)
