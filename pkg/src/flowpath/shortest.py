"""Classical shortest paths under the resistance-length metric ``sum r_e``."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .config import DEFAULT_TOLERANCES
from .graph import Graph, PathWitness, path_from_vertices


class NoPathError(ValueError):
    pass


def distances(g: Graph, source: int) -> np.ndarray:
    """Single-source resistance-length distances (``inf`` when unreachable)."""
    g.check_vertex(source)
    cache = g.memo.setdefault("sssp", {})
    hit = cache.get(source)
    if hit is not None:
        return hit
    adj = g._adjacency()
    r = g.resistances
    dist = np.full(g.n, math.inf)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(g.n, dtype=bool)
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, e in adj[u]:
            nd = d + r[e]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    dist.setflags(write=False)
    cache[source] = dist
    return dist


def _tight(g: Graph, s: int, t: int):
    ds, dt = distances(g, s), distances(g, t)
    total = ds[t]
    if not math.isfinite(total):
        raise NoPathError(f"no path between {s} and {t}")
    slack = DEFAULT_TOLERANCES.path_length * max(1.0, total)
    r = g.resistances

    def on_shortest(u: int, v: int, e: int) -> bool:
        return abs(ds[u] + r[e] + dt[v] - total) <= slack

    return ds, total, on_shortest


def dijkstra(g: Graph, s: int, t: int) -> PathWitness:
    """A minimum resistance-length ``s``-``t`` path.

    Among several shortest paths the lexicographically smallest vertex
    sequence is returned, so the result is deterministic.
    """
    g.check_vertex(s)
    g.check_vertex(t)
    cache = g.memo.setdefault("paths", {})
    hit = cache.get((s, t))
    if hit is not None:
        return hit
    if s == t:
        return PathWitness((s,), (), 0.0)
    ds, _, on_shortest = _tight(g, s, t)
    adj = g._adjacency()
    seq = [s]
    u = s
    while u != t:
        nxt = [v for v, e in adj[u] if ds[v] > ds[u] and on_shortest(u, v, e)]
        u = min(nxt)
        seq.append(u)
    path = path_from_vertices(g, seq)
    cache[(s, t)] = path
    return path


def count_shortest_paths(g: Graph, s: int, t: int) -> int:
    """Number of distinct minimum resistance-length ``s``-``t`` paths."""
    if s == t:
        return 1
    ds, _, on_shortest = _tight(g, s, t)
    adj = g._adjacency()
    order = sorted((v for v in range(g.n) if math.isfinite(ds[v])), key=lambda v: ds[v])
    count = dict.fromkeys(order, 0)
    count[s] = 1
    for u in order:
        if count[u] == 0:
            continue
        for v, e in adj[u]:
            if ds[v] > ds[u] and on_shortest(u, v, e):
                count[v] += count[u]
    return count[t]


def validate_path(g: Graph, p: PathWitness, s: int, t: int) -> bool:
    """True iff ``p`` is a simple ``s``-``t`` path of ``g`` with a consistent length."""
    vs = p.vertices
    if not vs or vs[0] != s or vs[-1] != t:
        return False
    if len(set(vs)) != len(vs) or len(p.edges) != len(vs) - 1:
        return False
    for a, b, e in zip(vs, vs[1:], p.edges):
        if not g.has_edge_id(e) or set(g.endpoints(e)) != {a, b}:
            return False
    length = math.fsum(1.0 / g.weights[e] for e in p.edges)
    return math.isclose(length, p.resistance_length, rel_tol=1e-12, abs_tol=1e-300)
