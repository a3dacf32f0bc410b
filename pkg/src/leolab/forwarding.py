"""Routing-oblivious per-satellite forwarding with local fast reroute.

Each satellite only looks at the packet header and the liveness of its own
four links.  Tag semantics are decrement-on-send: the forwarding satellite
decrements the tag it follows, and a receiving satellite merely skips tags
whose step count already reached zero.
"""
from dataclasses import dataclass, field

from .constellation import (CROSS_DIRS, OPPOSITE, Direction, is_cross_dir,
                            link_key, neighbor)
from .path_codec import MAX_TAGS, PathTag

DROP_REROUTE_LINK_FAILED = "reroute_link_failed"
DROP_LOOP_FLAG_EXHAUSTED = "loop_flag_exhausted"
DROP_TAG_OVERFLOW = "tag_overflow"


@dataclass(frozen=True)
class LinkStateMap:
    failed_links: frozenset = frozenset()
    failed_sats: frozenset = frozenset()

    @classmethod
    def of(cls, failed_links=(), failed_sats=()):
        return cls(frozenset(link_key(*l) for l in failed_links),
                   frozenset(failed_sats))

    def link_up(self, a, b):
        return not (a in self.failed_sats or b in self.failed_sats
                    or link_key(a, b) in self.failed_links)


@dataclass
class ForwardDecision:
    action: str                      # "deliver" | "drop" | "forward"
    direction: Direction | None = None
    drop_reason: str | None = None
    rerouted: bool = False


@dataclass
class Trajectory:
    hops: list                       # (satellite, next satellite) pairs
    satellites: list
    outcome: str                     # "delivered" | "dropped"
    drop_reason: str | None
    total_delay: float
    reroute_count: int

    @property
    def delivered(self):
        return self.outcome == "delivered"

    def to_json(self):
        return {
            "satellites": [[p, i] for p, i in self.satellites],
            "outcome": self.outcome,
            "drop_reason": self.drop_reason,
            "total_delay_s": self.total_delay,
            "reroute_count": self.reroute_count,
        }


def _last_consumed_dir(header, cross_axis):
    """Direction of the most recently consumed tag on the given axis."""
    for k in range(header.curr_index - 1, -1, -1):
        tag = header.tags[k]
        if tag.steps == 0 and is_cross_dir(tag.direction) == cross_axis:
            return tag.direction
    return None


def process_tags(cfg, sat, header, links):
    """One forwarding decision; mutates the header in place on Forward."""
    while header.curr_index < header.tag_count and \
            header.tags[header.curr_index].steps == 0:
        header.curr_index += 1
    if header.curr_index == header.tag_count:
        return ForwardDecision("deliver")

    tag = header.tags[header.curr_index]
    if links.link_up(sat, neighbor(cfg, sat, tag.direction)):
        tag.steps -= 1
        return ForwardDecision("forward", tag.direction)

    # Fast reroute: the current direction is down.
    if header.loop_flag >= 2:
        return ForwardDecision("drop", drop_reason=DROP_LOOP_FLAG_EXHAUSTED)
    if header.curr_index + 1 < header.tag_count:
        # Borrow a step from the next tag; the current tag stays intact and
        # the borrowed leg is retraced when the packet resumes it later.
        nxt = header.tags[header.curr_index + 1]
        if not links.link_up(sat, neighbor(cfg, sat, nxt.direction)):
            return ForwardDecision("drop", drop_reason=DROP_REROUTE_LINK_FAILED)
        header.loop_flag += 1
        nxt.steps -= 1
        return ForwardDecision("forward", nxt.direction, rerouted=True)
    # Last unconsumed tag: side-step on the orthogonal axis and come back.
    prev = _last_consumed_dir(header, not is_cross_dir(tag.direction))
    if prev is None:
        prev = Direction.PROGRADE if is_cross_dir(tag.direction) \
            else Direction.EAST
    if not links.link_up(sat, neighbor(cfg, sat, prev)):
        return ForwardDecision("drop", drop_reason=DROP_REROUTE_LINK_FAILED)
    if header.tag_count + 1 > MAX_TAGS:
        return ForwardDecision("drop", drop_reason=DROP_TAG_OVERFLOW)
    header.loop_flag += 1
    header.tags.append(PathTag(OPPOSITE[prev], 1))
    return ForwardDecision("forward", prev, rerouted=True)


def route_packet(cfg, ingress, header, links, snapshot, trace=None):
    """Walk a packet from its ingress satellite until delivery or drop.

    When trace is a list, the full forwarding state (satellite, loop flag,
    tag cursor, tag list) is appended before every decision; a repeated entry
    would mean a forwarding loop."""
    header = header.copy()
    sat = ingress
    hops = []
    sats = [sat]
    delay = 0.0
    max_hops = cfg.num_planes * cfg.sats_per_plane
    for _ in range(max_hops + 1):
        if trace is not None:
            trace.append((sat, header.loop_flag, header.curr_index,
                          tuple((t.direction, t.steps) for t in header.tags)))
        decision = process_tags(cfg, sat, header, links)
        if decision.action == "deliver":
            return Trajectory(hops, sats, "delivered", None, delay,
                              header.loop_flag)
        if decision.action == "drop":
            return Trajectory(hops, sats, "dropped", decision.drop_reason,
                              delay, header.loop_flag)
        nxt = neighbor(cfg, sat, decision.direction)
        delay += snapshot.link_delay(sat, nxt)
        hops.append((sat, nxt))
        sats.append(nxt)
        sat = nxt
    return Trajectory(hops, sats, "dropped", DROP_LOOP_FLAG_EXHAUSTED, delay,
                      header.loop_flag)
