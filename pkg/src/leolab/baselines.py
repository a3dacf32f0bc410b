"""Link-state comparison schemes: snapshot Dijkstra, loop-free alternates,
MPLS-style link-protection bypass, and a delay-threshold path validator."""
import heapq
import math

from .path_codec import expand_tags

NO_PATH = None


def dijkstra(snapshot, s, d):
    """Minimum-delay path from s to d, ties broken by hop count and then by
    node order; None when d is unreachable."""
    if s == d:
        return [s]
    dist = {s: (0.0, 0)}
    prev = {}
    heap = [(0.0, 0, s)]
    done = set()
    while heap:
        w, hops, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == d:
            break
        for nbr, cost in snapshot.neighbors(node):
            cand = (w + cost, hops + 1)
            best = dist.get(nbr)
            if best is None or cand < best or \
                    (cand == best and node < prev[nbr]):
                dist[nbr] = cand
                prev[nbr] = node
                heapq.heappush(heap, (cand[0], cand[1], nbr))
    if d not in done:
        return NO_PATH
    path = [d]
    while path[-1] != s:
        path.append(prev[path[-1]])
    return path[::-1]


def distances_from(snapshot, s):
    """Delay of the shortest path from s to every reachable node."""
    dist = {s: 0.0}
    heap = [(0.0, s)]
    done = set()
    while heap:
        w, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        for nbr, cost in snapshot.neighbors(node):
            nd = w + cost
            if nd < dist.get(nbr, math.inf):
                dist[nbr] = nd
                heapq.heappush(heap, (nd, nbr))
    return dist


def lfa_backup(snapshot, u, v, d, dist_to_d=None):
    """Loop-free alternate next hop at u when link (u,v) toward d fails:
    a neighbor n != v with dist(n,d) < dist(n,u) + dist(u,d), minimizing
    dist(u,n) + dist(n,d); None when no neighbor qualifies."""
    if dist_to_d is None:
        dist_to_d = distances_from(snapshot, d)
    if u not in dist_to_d:
        return None
    best = None
    best_cost = math.inf
    for n, cost in snapshot.neighbors(u):
        if n == v or n not in dist_to_d:
            continue
        # dist(n,u) is the direct link weight here: candidates are neighbors.
        if dist_to_d[n] < cost + dist_to_d[u]:
            total = cost + dist_to_d[n]
            if total < best_cost:
                best, best_cost = n, total
    return best


def mpls_frr_backup(snapshot, primary, u, v):
    """Primary path with a local bypass of link (u,v) spliced in at u, loops
    removed; None when no bypass exists."""
    bypass = dijkstra(snapshot.without(failed_links=[(u, v)]), u, v)
    if bypass is NO_PATH:
        return None
    spliced = primary[:primary.index(u)] + bypass \
        + primary[primary.index(v) + 1:]
    out = []
    pos = {}
    for sat in spliced:
        if sat in pos:
            del out[pos[sat] + 1:]
            pos = {q: k for k, q in enumerate(out)}
        else:
            pos[sat] = len(out)
            out.append(sat)
    return out


def delay_threshold_validate(cfg, snapshot, tags, ingress, stretch_pct):
    """Pass iff the tagged path's delay is within (1 + stretch_pct/100) of the
    shortest delay between its endpoints (boundary inclusive)."""
    path = expand_tags(cfg, tags, ingress)
    shortest = dijkstra(snapshot, ingress, path[-1])
    if shortest is NO_PATH:
        return False
    return snapshot.path_delay(path) <= \
        (1.0 + stretch_pct / 100.0) * snapshot.path_delay(shortest)
