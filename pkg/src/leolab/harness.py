"""Experiment runner CLI.

Subcommands: frr | validate | multigs | assumptions | bench.  Every run is
deterministic for a given (config, seed): trial k draws from the RNG
substream SeedSequence([seed, k]).  CSV outputs start with a schema comment
line; unavailable backup paths are written as the literal "inf".
"""
import argparse
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import baselines, ground_segment, validator
from .constellation import (ConstellationConfig, Direction, SatelliteId,
                            link_key, neighbor, verify_model_assumptions)
from .forwarding import LinkStateMap, route_packet
from .grid_theory import minimal_grid, theory_shortest_path
from .path_codec import PacketHeader, encode_path, expand_tags
from .snapshot import DelaySnapshot

FRR_SCHEMES = ("tag_frr", "lfa", "mpls_frr", "optimal_local", "optimal_global")
PACKET_CLASSES = ("legit_0f", "legit_1f", "legit_2f",
                  "attack_1hop", "attack_2hop", "attack_3hop")
INF = "inf"


@dataclass
class ExperimentConfig:
    scenario: str
    trials: int = 1000
    failures: int = 1
    failure_mode: str = "simultaneous"
    seed: int = 0
    constellation: ConstellationConfig = None
    gs_db: dict = None
    out: str = None

    def __post_init__(self):
        if self.constellation is None:
            self.constellation = ConstellationConfig()
        if not 0 <= self.failures <= 3:
            raise ValueError("failures must be 0..3")
        if self.failure_mode not in ("simultaneous", "consecutive"):
            raise ValueError("bad failure mode")


def trial_rng(seed, trial):
    return np.random.default_rng(np.random.SeedSequence([seed, trial]))


def random_pair(cfg, rng):
    P, S = cfg.num_planes, cfg.sats_per_plane
    while True:
        s = SatelliteId(int(rng.integers(P)), int(rng.integers(S)))
        d = SatelliteId(int(rng.integers(P)), int(rng.integers(S)))
        if s != d:
            return s, d


def pick_failures(cfg, snapshot, s, d, count, mode, rng, path=None):
    """Failed links drawn from the current shortest path before each failure
    (consecutive mode recomputes the path between failures)."""
    failed = []
    snap = snapshot
    if path is None:
        path = baselines.dijkstra(snap, s, d)
    for _ in range(count):
        if path is baselines.NO_PATH or len(path) < 2:
            break
        links = [link_key(a, b) for a, b in zip(path, path[1:])
                 if link_key(a, b) not in failed]
        if not links:
            break
        failed.append(links[int(rng.integers(len(links)))])
        snap = snap.without(failed_links=[failed[-1]])
        if mode == "consecutive":
            path = baselines.dijkstra(snap, s, d)
    return failed


def _fmt(x):
    if x is None or (isinstance(x, float) and math.isinf(x)):
        return INF
    if isinstance(x, float):
        return "%.9g" % x
    return str(x)


def _write_csv(out, schema, columns, rows):
    lines = ["#schema=%s" % schema, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _first_failed_hop(path, failed):
    for k, (a, b) in enumerate(zip(path, path[1:])):
        if link_key(a, b) in failed:
            return k
    return None


def _path_ok(path, failed):
    return all(link_key(a, b) not in failed for a, b in zip(path, path[1:]))


def frr_trial(cfg, trial, seed, failures, mode):
    rng = trial_rng(seed, trial)
    t = float(rng.uniform(0.0, cfg.period_s))
    s, d = random_pair(cfg, rng)
    snap = DelaySnapshot(cfg, t)
    primary = theory_shortest_path(cfg, s, d, t, snap)
    failed = pick_failures(cfg, snap, s, d, failures, mode, rng, primary)
    post = snap.without(failed_links=failed)
    failed = post.failed_links

    opt = baselines.dijkstra(post, s, d)
    opt_delay = post.path_delay(opt) if opt is not baselines.NO_PATH else None
    opt_hops = len(opt) - 1 if opt is not baselines.NO_PATH else None

    def result(scheme, path_or_traj, reroutes=0):
        if path_or_traj is None or opt_delay is None:
            return (trial, scheme, 0, math.inf, math.inf, reroutes)
        if hasattr(path_or_traj, "outcome"):
            traj = path_or_traj
            if not traj.delivered or traj.satellites[-1] != d:
                return (trial, scheme, 0, math.inf, math.inf,
                        traj.reroute_count)
            delay, hops, reroutes = (traj.total_delay, len(traj.hops),
                                     traj.reroute_count)
        else:
            delay = post.path_delay(path_or_traj)
            hops = len(path_or_traj) - 1
        stretch = 100.0 * (delay / opt_delay - 1.0)
        return (trial, scheme, 1, max(stretch, 0.0), hops - opt_hops, reroutes)

    rows = []
    header = PacketHeader(0, 0, encode_path(cfg, primary))
    links = LinkStateMap(frozenset(failed))
    rows.append(result("tag_frr", route_packet(cfg, s, header, links, post)))

    k = _first_failed_hop(primary, failed)
    if k is None:
        for scheme in ("lfa", "mpls_frr", "optimal_local"):
            rows.append(result(scheme, primary))
    else:
        u = primary[k]
        v = primary[k + 1]
        # LFA: pre-failure distances, redirect at the node adjacent to the
        # first failure; delivery requires the detour to dodge all failures.
        n = baselines.lfa_backup(snap, u, v, d)
        lfa_path = None
        if n is not None:
            tail = baselines.dijkstra(snap.without(failed_sats=[u]), n, d)
            if tail is not baselines.NO_PATH:
                cand = primary[:k + 1] + tail
                if _path_ok(cand, failed):
                    lfa_path = cand
        rows.append(result("lfa", lfa_path))

        bypass = baselines.mpls_frr_backup(snap, primary, u, v)
        if bypass is not None and not _path_ok(bypass, failed):
            bypass = None
        rows.append(result("mpls_frr", bypass))

        local = baselines.dijkstra(post, u, d)
        local_path = primary[:k] + local \
            if local is not baselines.NO_PATH else None
        rows.append(result("optimal_local", local_path))

    rows.append(result("optimal_global", opt))
    return rows


def run_frr_experiment(xc):
    rows = []
    for trial in range(xc.trials):
        rows.extend(frr_trial(xc.constellation, trial, xc.seed,
                              xc.failures, xc.failure_mode))
    _write_csv(xc.out, "frr/1",
               ("trial", "scheme", "delivered", "delay_stretch_pct",
                "hop_stretch", "reroutes"), rows)
    return rows


def _setup_admission(cfg, gs_db, src, dst, t):
    vis = ground_segment.visible_sats(cfg, gs_db[src], t)
    table = validator.AdmissionTable()
    table.register(src, dst, vis[0], 1e12, t)
    return table, vis[0]


def validation_trial(cfg, gs_db, trial, seed):
    rng = trial_rng(seed, trial)
    t = float(rng.uniform(0.0, cfg.period_s))
    ids = sorted(gs_db)
    # random satellite pair; the GS pair and admission entry are picked so
    # that the pre-check and the visibility check pass by construction
    egress = dst = None
    for _ in range(64):
        cand = random_pair(cfg, rng)[1]
        seen = [(g, ground_segment.elevations_deg(cfg, gs_db[g], t)[cand])
                for g in ids]
        g, el = max(seen, key=lambda x: x[1])
        if el >= gs_db[g].min_elevation_deg:
            egress, dst = cand, g
            break
    if egress is None:
        return None
    while True:
        ingress = random_pair(cfg, rng)[0]
        if ingress != egress:
            break
    src = int(rng.choice([g for g in ids if g != dst]))
    table = validator.AdmissionTable()
    table.register(src, dst, ingress, 1e12, t)
    snap = DelaySnapshot(cfg, t)
    pclass = PACKET_CLASSES[trial % len(PACKET_CLASSES)]

    if pclass.startswith("legit"):
        nfail = int(pclass[6])
        failed = pick_failures(cfg, snap, ingress, egress, nfail,
                               "simultaneous", rng)
        path = baselines.dijkstra(snap.without(failed_links=failed),
                                  ingress, egress)
        if path is baselines.NO_PATH:
            return None
        header = PacketHeader(src, dst, encode_path(cfg, path))
    else:
        nhop = int(pclass[7])
        primary = baselines.dijkstra(snap, ingress, egress)
        target = _off_path_target(cfg, primary, ingress, egress, nhop, rng)
        if target is None:
            return None
        headers = ground_segment.attack_paths(
            cfg, ingress, egress, target, t, rng, src, dst, snap)
        header = headers[0]  # the tailored shortest-path concatenation
        if header.tag_count > 15:
            return None

    verdict = validator.validate(cfg, table, header, ingress, 8000, t, gs_db)
    thr = {}
    for pct in (10, 20):
        thr[pct] = baselines.delay_threshold_validate(
            cfg, snap, header.tags, ingress, pct)
    return (trial, pclass, int(verdict.passed), verdict.failed_check or "",
            int(thr[10]), int(thr[20]))


def _off_path_target(cfg, primary, s, d, nhop, rng):
    """A satellite drawn uniformly from the ring at grid distance nhop from
    the path, outside the minimal grid (the region that contains every
    shortest path)."""
    gmin = minimal_grid(cfg, s, d)[0]
    in_grid = set(gmin.satellites())
    dist = {sat: 0 for sat in primary}
    frontier = list(primary)
    for step in range(1, nhop + 1):
        ring = []
        for sat in frontier:
            for direction in Direction:
                cand = neighbor(cfg, sat, direction)
                if cand not in dist:
                    dist[cand] = step
                    ring.append(cand)
        frontier = ring
    ring = [sat for sat in frontier if sat not in in_grid]
    if not ring:
        return None
    return ring[int(rng.integers(len(ring)))]


def run_validation_experiment(xc):
    gs_db = xc.gs_db or ground_segment.load_city_corpus()
    rows = []
    trial = 0
    produced = 0
    while produced < xc.trials and trial < 4 * xc.trials:
        row = validation_trial(xc.constellation, gs_db, trial, xc.seed)
        trial += 1
        if row is not None:
            rows.append(row)
            produced += 1
    _write_csv(xc.out, "validation/1",
               ("trial", "packet_class", "tag_validator_pass", "failed_check",
                "thr10_pass", "thr20_pass"), rows)
    return rows


def multigs_trial(cfg, gs_db, size, trial, seed):
    """One botnet draw: sample GS pairs, count those with a passing attack
    header, and for each success count how many of the source's visible
    satellites could serve as the attack ingress (the attack's fragility:
    a handful of critical satellites per demand)."""
    rng = trial_rng(seed, trial)
    t = float(rng.uniform(0.0, cfg.period_s))
    ids = sorted(gs_db)
    pairs = set()
    while len(pairs) < size:
        a, b = (int(x) for x in rng.choice(ids, 2, replace=False))
        pairs.add((a, b))
    target = SatelliteId(int(rng.integers(cfg.num_planes)),
                         int(rng.integers(cfg.sats_per_plane)))
    snap = DelaySnapshot(cfg, t)
    usable = 0
    evaluated = 0
    critical_counts = []
    from_target = {}  # egress -> shortest path target -> egress

    def concat_passes(src, dst, ing, egress):
        if ing == target or egress == target:
            return False
        leg1 = baselines.dijkstra(snap, ing, target)
        if egress not in from_target:
            from_target[egress] = baselines.dijkstra(snap, target, egress)
        leg2 = from_target[egress]
        if leg1 is baselines.NO_PATH or leg2 is baselines.NO_PATH:
            return False
        header = PacketHeader(src, dst, encode_path(cfg, leg1[:-1] + leg2))
        if header.tag_count > 15:
            return False
        table = validator.AdmissionTable()
        table.register(src, dst, ing, 1e12, t)
        return validator.validate(cfg, table, header, ing,
                                  8000, t, gs_db).passed

    for src, dst in sorted(pairs):
        src_vis = ground_segment.visible_sats(cfg, gs_db[src], t)
        dst_vis = ground_segment.visible_sats(cfg, gs_db[dst], t)
        if not src_vis or not dst_vis:
            continue
        ingress, egress = src_vis[0], dst_vis[0]
        evaluated += 1
        if not concat_passes(src, dst, ingress, egress):
            continue
        usable += 1
        critical_counts.append(
            1 + sum(concat_passes(src, dst, v, egress) for v in src_vis[1:]))
    frac = usable / evaluated if evaluated else 0.0
    critical = float(np.median(critical_counts)) if critical_counts else 0.0
    return (trial, size, evaluated, usable, frac, critical)


def run_multi_gs_experiment(xc, sizes=(100, 500, 1000)):
    gs_db = xc.gs_db or ground_segment.load_city_corpus()
    rows = []
    trial = 0
    for size in sizes:
        for _ in range(xc.trials):
            rows.append(multigs_trial(xc.constellation, gs_db, size,
                                      trial, xc.seed))
            trial += 1
    _write_csv(xc.out, "multigs/1",
               ("trial", "botnet_size", "evaluated_pairs", "usable_pairs",
                "usable_fraction", "critical_ingress_count"), rows)
    return rows


def run_assumptions(xc):
    cfg = xc.constellation
    rng = trial_rng(xc.seed, 0)
    times = sorted(float(x) for x in rng.uniform(0.0, cfg.period_s,
                                                 max(1, xc.trials)))
    report = verify_model_assumptions(cfg, times, rng=rng)
    text = report.to_json() + "\n"
    if xc.out is None:
        sys.stdout.write(text)
    else:
        with open(xc.out, "w") as fh:
            fh.write(text)
    return report


def bench_validation(xc, headers_n=10000):
    cfg = xc.constellation
    gs_db = xc.gs_db or ground_segment.load_city_corpus()
    rng = trial_rng(xc.seed, 0)
    t = float(rng.uniform(0.0, cfg.period_s))
    ids = sorted(gs_db)
    batch = []
    while len(batch) < 32:
        src, dst = (int(x) for x in rng.choice(ids, 2, replace=False))
        src_vis = ground_segment.visible_sats(cfg, gs_db[src], t)
        dst_vis = ground_segment.visible_sats(cfg, gs_db[dst], t)
        if not src_vis or not dst_vis:
            continue
        snap = DelaySnapshot(cfg, t)
        path = baselines.dijkstra(snap, src_vis[0], dst_vis[0])
        table, ingress = _setup_admission(cfg, gs_db, src, dst, t)
        batch.append((table, PacketHeader(src, dst, encode_path(cfg, path)),
                      ingress, snap))

    # warm the visibility cache so both sides time pure validation work
    for table, header, ingress, snap in batch:
        validator.validate(cfg, table, header, ingress, 8000, t, gs_db)
        baselines.delay_threshold_validate(cfg, snap, header.tags, ingress, 10)

    reps = max(1, headers_n // len(batch))
    t0 = time.perf_counter()
    for _ in range(reps):
        for table, header, ingress, snap in batch:
            validator.validate(cfg, table, header, ingress, 8000, t, gs_db)
    tag_total = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(reps):
        for table, header, ingress, snap in batch:
            baselines.delay_threshold_validate(cfg, snap, header.tags,
                                               ingress, 10)
    base_total = time.perf_counter() - t0

    n = reps * len(batch)
    verdict = validator.validate(cfg, batch[0][0], batch[0][1], batch[0][2],
                                 8000, t, gs_db)
    out = {
        "validations": n,
        "tag_validator_s_per_packet": tag_total / n,
        "baseline_s_per_packet": base_total / n,
        "speedup": base_total / tag_total if tag_total else math.inf,
        "tag_validator_throughput_per_s": n / tag_total,
        "tag_passes_checks_1_2": verdict.metrics["tag_passes"],
    }
    text = json.dumps(out, indent=2) + "\n"
    if xc.out is None:
        sys.stdout.write(text)
    else:
        with open(xc.out, "w") as fh:
            fh.write(text)
    return out


def build_config(args):
    constellation = ConstellationConfig.from_file(args.config) \
        if args.config else ConstellationConfig()
    gs_db = ground_segment.load_gs_db(args.gs) if args.gs else None
    return ExperimentConfig(args.scenario, trials=args.trials,
                            failures=args.failures, failure_mode=args.mode,
                            seed=args.seed, constellation=constellation,
                            gs_db=gs_db, out=args.out)


def main(argv=None):
    parser = argparse.ArgumentParser(prog="leolab",
                                     description="constellation routing "
                                     "experiment harness")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in ("frr", "validate", "multigs", "assumptions", "bench"):
        p = sub.add_parser(name)
        p.add_argument("--config", default=None,
                       help="constellation key=value file")
        p.add_argument("--gs", default=None, help="ground-station JSON db")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None)
        p.add_argument("--trials", type=int,
                       default=1000 if name == "frr" else 100)
        p.add_argument("--failures", type=int, default=1, choices=(0, 1, 2, 3))
        p.add_argument("--mode", default="simultaneous",
                       choices=("simultaneous", "consecutive"))
    args = parser.parse_args(argv)
    try:
        xc = build_config(args)
        if args.scenario == "frr":
            run_frr_experiment(xc)
        elif args.scenario == "validate":
            run_validation_experiment(xc)
        elif args.scenario == "multigs":
            run_multi_gs_experiment(xc)
        elif args.scenario == "assumptions":
            run_assumptions(xc)
        else:
            bench_validation(xc)
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
