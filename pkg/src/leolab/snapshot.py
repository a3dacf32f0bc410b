"""Per-instant view of link delays, minus failed elements."""
from .constellation import SatelliteId, cross_delays, link_key


class DelaySnapshot:
    """Symmetric positive link weights of the whole constellation at one time,
    with an optional set of failed links/satellites removed."""

    def __init__(self, cfg, t, failed_links=(), failed_sats=()):
        self.cfg = cfg
        self.t = t
        self.cross = cross_delays(cfg, t)
        self.intra = cfg.intra_delay_s
        self.failed_links = {link_key(*l) for l in failed_links}
        self.failed_sats = set(failed_sats)

    def without(self, failed_links=(), failed_sats=()):
        snap = DelaySnapshot.__new__(DelaySnapshot)
        snap.cfg = self.cfg
        snap.t = self.t
        snap.cross = self.cross
        snap.intra = self.intra
        snap.failed_links = self.failed_links | {link_key(*l) for l in failed_links}
        snap.failed_sats = self.failed_sats | set(failed_sats)
        return snap

    def is_failed(self, a, b):
        return (a in self.failed_sats or b in self.failed_sats
                or link_key(a, b) in self.failed_links)

    def link_delay(self, a, b):
        """Delay of the link between neighbors a and b (ignores failures)."""
        if a.plane == b.plane:
            return self.intra
        P = self.cfg.num_planes
        if (a.plane + 1) % P == b.plane:
            return float(self.cross[a.plane][a.index])
        return float(self.cross[b.plane][b.index])

    def neighbors(self, sat):
        cfg = self.cfg
        p, i = sat
        P, S = cfg.num_planes, cfg.sats_per_plane
        out = []
        for nbr, w in (
            (SatelliteId(p, (i + 1) % S), self.intra),
            (SatelliteId(p, (i - 1) % S), self.intra),
            (SatelliteId((p + 1) % P, i), float(self.cross[p][i])),
            (SatelliteId((p - 1) % P, i), float(self.cross[(p - 1) % P][i])),
        ):
            if not self.is_failed(sat, nbr):
                out.append((nbr, w))
        return out

    def path_delay(self, path):
        return sum(self.link_delay(a, b) for a, b in zip(path, path[1:]))
