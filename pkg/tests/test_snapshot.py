import pytest

from leolab.constellation import SatelliteId, link_length_m
from leolab.snapshot import DelaySnapshot


def test_link_delay_intra(cfg):
    snap = DelaySnapshot(cfg, 10.0)
    assert snap.link_delay(SatelliteId(3, 4), SatelliteId(3, 5)) == cfg.intra_delay_s


def test_link_delay_cross_matches_geometry(cfg):
    t = 10.0
    snap = DelaySnapshot(cfg, t)
    a, b = SatelliteId(3, 4), SatelliteId(4, 4)
    expected = link_length_m(cfg, a, b, t) / cfg.light_speed_m_s
    assert snap.link_delay(a, b) == pytest.approx(expected, rel=1e-12)
    assert snap.link_delay(b, a) == pytest.approx(expected, rel=1e-12)


def test_link_delay_cross_wraparound(cfg):
    t = 5.0
    snap = DelaySnapshot(cfg, t)
    a, b = SatelliteId(23, 7), SatelliteId(0, 7)
    expected = link_length_m(cfg, a, b, t) / cfg.light_speed_m_s
    assert snap.link_delay(a, b) == pytest.approx(expected, rel=1e-12)


def test_neighbors_symmetric_weights(cfg):
    snap = DelaySnapshot(cfg, 99.0)
    sat = SatelliteId(11, 30)
    nbrs = dict(snap.neighbors(sat))
    assert len(nbrs) == 4
    for nbr, w in nbrs.items():
        assert dict(snap.neighbors(nbr))[sat] == pytest.approx(w, rel=1e-12)
        assert w > 0


def test_failed_elements_removed(cfg):
    sat = SatelliteId(0, 0)
    east = SatelliteId(1, 0)
    up = SatelliteId(0, 1)
    snap = DelaySnapshot(cfg, 0.0, failed_links=[(sat, east)])
    assert east not in dict(snap.neighbors(sat))
    snap2 = snap.without(failed_sats=[up])
    assert up not in dict(snap2.neighbors(sat))
    # the failed satellite loses all four incident links
    assert snap2.neighbors(up) == []
    # the original snapshot is untouched
    assert up in dict(snap.neighbors(sat))


def test_path_delay_is_link_sum(cfg):
    snap = DelaySnapshot(cfg, 77.0)
    path = [SatelliteId(0, 0), SatelliteId(0, 1), SatelliteId(1, 1),
            SatelliteId(2, 1)]
    expected = sum(snap.link_delay(a, b) for a, b in zip(path, path[1:]))
    assert snap.path_delay(path) == pytest.approx(expected, rel=1e-12)
    assert snap.path_delay([SatelliteId(0, 0)]) == 0.0
