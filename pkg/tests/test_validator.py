import json
import math

import numpy as np
import pytest

from leolab import validator
from leolab.baselines import dijkstra
from leolab.constellation import Direction, SatelliteId, satellite_geo
from leolab.ground_segment import GroundStation, visible_sats
from leolab.path_codec import PacketHeader, PathTag, encode_path
from leolab.snapshot import DelaySnapshot
from leolab.validator import (AdmissionTable, TokenBucket, check1, check2,
                              check3, pre_check, validate)

E, W, P, R = (Direction.EAST, Direction.WEST, Direction.PROGRADE,
              Direction.RETROGRADE)


def tags_of(spec):
    return [PathTag(d, s) for d, s in spec]


def gs_under(cfg, sat, t, gs_id=1, antipodal=False):
    """A ground station at (or opposite to) the subsatellite point of sat."""
    geo = satellite_geo(cfg, sat, t, earth_fixed=True)
    lat, lon = math.degrees(geo.latitude_rad), math.degrees(geo.longitude_rad)
    if antipodal:
        lat = -lat
        lon = ((lon + 180.0) + 180.0) % 360.0 - 180.0
    return GroundStation(gs_id, lat, lon)


def test_token_bucket_sustained_overload():
    # at 2x the contracted rate roughly half the packets get through
    rate = 8000.0 * 100          # 100 packets/s of 8000 bits
    bucket = TokenBucket(rate, 0.0)
    admitted = 0
    n = 200                      # 200 packets over 1 s = 2x rate
    for k in range(n):
        admitted += bucket.admit(8000.0, k / n)
    assert 0.45 <= admitted / n <= 0.65


def test_token_bucket_burst_capacity():
    bucket = TokenBucket(1000.0, 0.0)
    assert bucket.capacity == 100.0  # 0.1 s window
    assert bucket.admit(100.0, 0.0)
    assert not bucket.admit(1.0, 0.0)
    assert bucket.admit(50.0, 0.05)  # refilled at the contracted rate


def test_pre_check_admission():
    table = AdmissionTable()
    header = PacketHeader(1, 2, [])
    assert not pre_check(table, header, SatelliteId(0, 0), 8000, 0.0)
    table.register(1, 2, SatelliteId(0, 0), 1e9)
    assert pre_check(table, header, SatelliteId(0, 0), 8000, 0.0)
    # only the registered ingress satellite accepts the pair's traffic
    assert not pre_check(table, header, SatelliteId(0, 1), 8000, 1.0)


def test_admission_table_from_file(tmp_path):
    path = tmp_path / "admission.json"
    path.write_text(json.dumps([
        {"src_gs": 1, "dst_gs": 2, "ingress": [3, 4], "rate_bps": 1e6}]))
    table = AdmissionTable.from_file(path)
    entry = table.lookup(1, 2)
    assert entry.ingress == (3, 4) and entry.rate_bps == 1e6


def test_check1_zenith_and_antipodal(cfg):
    t = 500.0
    ingress = SatelliteId(2, 5)
    tags = tags_of([(E, 2), (P, 3)])
    terminal = SatelliteId(4, 8)
    gs_db = {1: gs_under(cfg, terminal, t),
             2: gs_under(cfg, terminal, t, gs_id=2, antipodal=True)}
    assert check1(cfg, tags, ingress, 1, t, gs_db)
    assert not check1(cfg, tags, ingress, 2, t, gs_db)


def test_check2_examples():
    assert check2(tags_of([(E, 8), (R, 7), (E, 9)]), False)   # 0 inversions
    assert check2(tags_of([(E, 3), (R, 2), (W, 2)]), False)   # 1, length 2
    assert not check2(tags_of([(E, 3), (R, 2), (W, 4)]), False)  # length 4
    # the length bound is waived for single-path minimal grids
    assert check2(tags_of([(E, 3), (R, 2), (W, 4)]), True)


def test_check2_out_and_back_counts_twice():
    # P then R then P again opposes an earlier tag twice
    assert not check2(tags_of([(P, 2), (R, 1), (P, 1)]), False)
    assert not check2(tags_of([(E, 2), (W, 1), (E, 1), (P, 3)]), False)


def test_check3_budgets():
    # a path inside a 6-row x 4-column grid: 5 intra + 3 cross, excess 0
    assert check3(tags_of([(P, 5), (E, 3)]), 6, 4)
    # one extra link per axis is tolerated
    assert check3(tags_of([(P, 6), (E, 4)]), 6, 4)
    # an out-and-back excursion costs +2 on one axis
    assert not check3(tags_of([(P, 5), (R, 1), (P, 1), (E, 3)]), 6, 4)
    # 2 rows and 2 columns beyond the grid
    assert not check3(tags_of([(P, 7), (E, 5)]), 6, 4)
    # single-path grids get the two-link allowance: a failure on the only
    # path forces a sidestep-and-return detour
    assert check3(tags_of([(E, 3), (P, 1), (R, 1)]), 1, 4)
    assert not check3(tags_of([(E, 3), (P, 2), (R, 2)]), 1, 4)


def _setup(cfg, t, ingress, egress):
    gs_db = {1: GroundStation(1, 10.0, 10.0),
             2: gs_under(cfg, egress, t, gs_id=2)}
    table = AdmissionTable()
    table.register(1, 2, ingress, 1e12, t)
    return gs_db, table


def test_validate_passes_shortest_paths(cfg, rng):
    # legit no-failure shortest paths pass every check
    for _ in range(15):
        t = float(rng.uniform(0, cfg.period_s))
        snap = DelaySnapshot(cfg, t)
        s = SatelliteId(int(rng.integers(24)), int(rng.integers(66)))
        d = SatelliteId(int(rng.integers(24)), int(rng.integers(66)))
        if s == d:
            continue
        gs_db, table = _setup(cfg, t, s, d)
        path = dijkstra(snap, s, d)
        header = PacketHeader(1, 2, encode_path(cfg, path))
        verdict = validate(cfg, table, header, s, 8000, t, gs_db)
        assert verdict.passed, verdict.failed_check
        assert verdict.metrics["tag_passes"] == 1


def test_validate_short_circuits_on_pre_check(cfg):
    table = AdmissionTable()
    header = PacketHeader(1, 2, [])
    verdict = validate(cfg, table, header, SatelliteId(0, 0), 8000, 0.0, {})
    assert not verdict.passed and verdict.failed_check == "pre"


def test_validate_agrees_with_individual_checks(cfg, rng):
    from leolab.grid_theory import minimal_grid
    for _ in range(40):
        t = float(rng.uniform(0, cfg.period_s))
        s = SatelliteId(int(rng.integers(24)), int(rng.integers(66)))
        tags = tags_of([(Direction(int(rng.integers(4))),
                         int(rng.integers(1, 8))) for _ in range(4)])
        terminal = s
        from leolab.validator import _terminal_sat
        terminal = _terminal_sat(cfg, tags, s)
        if terminal == s:
            continue
        gs_db, table = _setup(cfg, t, s, terminal)
        header = PacketHeader(1, 2, tags)
        verdict = validate(cfg, table, header, s, 8000, t, gs_db)
        gmin, r_min, c_min = minimal_grid(cfg, s, terminal)
        expected = check1(cfg, tags, s, 2, t, gs_db) \
            and check2(tags, gmin.is_single_path) \
            and check3(tags, r_min, c_min)
        assert verdict.passed == expected


def test_validate_reports_grid_metrics(cfg):
    t = 0.0
    s = SatelliteId(0, 0)
    tags = tags_of([(E, 3), (P, 5)])
    terminal = SatelliteId(3, 5)
    gs_db, table = _setup(cfg, t, s, terminal)
    verdict = validate(cfg, table, PacketHeader(1, 2, tags), s, 8000, t, gs_db)
    assert verdict.metrics["c_min"] == 4 and verdict.metrics["r_min"] == 6
    assert verdict.metrics["cross_steps"] == 3
    assert verdict.metrics["intra_steps"] == 5
    assert verdict.metrics["inversions"] == 0
