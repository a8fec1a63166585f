"""Uniqueness conditions on the shortest path and the structural facts they imply.

The edge checker decides the condition through single-edge removals: ``P``
is the resistance-length shortest path and the margin is

    max_alpha = min_{e in P} R_{G-e}(s, t) / R_P - 1

with bridges contributing ``+inf``.  The brute-force checker enumerates edge
subsets instead and serves as an independent oracle for small graphs.

The ``verify_*`` routines return slacks (quantity minus bound) computed from
exact oracle solves; callers assert them against ``-1e-9``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOLERANCES, Tolerances
from .electric import (DisconnectedError, effective_resistance, flow_state_distribution,
                       solve_flow)
from .graph import Graph, PathWitness, remove_edge, subgraph
from .shortest import count_shortest_paths, dijkstra


class ConditionNotVerified(ValueError):
    """The structural precondition of a verifier does not hold."""


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class ConditionReport:
    holds_condition1: bool
    max_alpha: float
    shortest_path: PathWitness
    unique_shortest: bool
    violating_edge: int | None
    removal_resistances: tuple[float, ...] = ()

    @property
    def path_resistance(self) -> float:
        return self.shortest_path.resistance_length


def removal_margin(g: Graph, x: int, y: int, path: PathWitness) -> tuple[float, tuple[float, ...]]:
    """``min_e R_{G-e}(x, y) / R_path - 1`` over the edges of ``path`` and the removal values."""
    removed = tuple(effective_resistance(remove_edge(g, e), x, y) for e in path.edges)
    worst = min(removed, default=math.inf)
    alpha = math.inf if math.isinf(worst) else worst / path.resistance_length - 1.0
    return alpha, removed


def check_condition_edges(g: Graph, s: int, t: int,
                          tol: Tolerances = DEFAULT_TOLERANCES) -> ConditionReport:
    cache = g.memo.setdefault("condition", {})
    key = (s, t, tol.condition)
    if key in cache:
        return cache[key]
    if not math.isfinite(effective_resistance(g, s, t)):
        raise DisconnectedError(f"vertices {s} and {t} are not connected")
    path = dijkstra(g, s, t)
    unique = count_shortest_paths(g, s, t) == 1
    alpha, removed = removal_margin(g, s, t, path)
    # ties (alpha == 0 up to tolerance) count as failures
    edge_ok = alpha > tol.condition
    violating = None if edge_ok else path.edges[int(np.argmin(removed))]
    report = ConditionReport(edge_ok and unique, alpha, path, unique, violating, removed)
    cache[key] = report
    return report


def _require(g: Graph, s: int, t: int) -> ConditionReport:
    report = check_condition_edges(g, s, t)
    if not report.holds_condition1:
        raise ConditionNotVerified(f"condition fails for ({s}, {t}); max_alpha={report.max_alpha:.6g}")
    return report


# -- brute force -----------------------------------------------------------


def _subset_resistance(n: int, us, vs, ws, s: int, t: int) -> float:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(us, vs):
        adj[a].append(b)
        adj[b].append(a)
    seen = {s}
    stack = [s]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if t not in seen:
        return math.inf
    comp = sorted(seen)
    index = {v: i for i, v in enumerate(comp)}
    L = np.zeros((len(comp), len(comp)))
    for a, b, w in zip(us, vs, ws):
        if a in index:
            i, j = index[a], index[b]
            L[i, i] += w
            L[j, j] += w
            L[i, j] -= w
            L[j, i] -= w
    keep = [i for i in range(len(comp)) if i != index[t]]
    rhs = np.zeros(len(keep))
    rhs[keep.index(index[s])] = 1.0
    phi = np.linalg.solve(L[np.ix_(keep, keep)], rhs)
    return float(phi[keep.index(index[s])])


def check_condition_bruteforce(g: Graph, s: int, t: int, max_edges: int = 14,
                               tol: Tolerances = DEFAULT_TOLERANCES) -> bool:
    """Enumerate every edge subset ``X`` omitting part of ``P``; true iff all have ``R_X > R_P``."""
    ids = g.edge_ids()
    if len(ids) > max_edges:
        raise InstanceTooLarge(f"{len(ids)} edges exceeds brute-force limit {max_edges}")
    if not math.isfinite(effective_resistance(g, s, t)):
        raise DisconnectedError(f"vertices {s} and {t} are not connected")
    path = dijkstra(g, s, t)
    r_p = path.resistance_length
    position = {int(e): i for i, e in enumerate(ids)}
    path_mask = 0
    for e in path.edges:
        path_mask |= 1 << position[e]
    us, vs, ws = g.tails[ids].tolist(), g.heads[ids].tolist(), g.weights[ids].tolist()
    for mask in range(1 << len(ids)):
        if mask & path_mask == path_mask:
            continue
        chosen = [i for i in range(len(ids)) if mask >> i & 1]
        r_x = _subset_resistance(g.n, [us[i] for i in chosen], [vs[i] for i in chosen],
                                 [ws[i] for i in chosen], s, t)
        if not r_x > r_p * (1.0 + tol.condition):
            return False
    return True


# -- lemma verifiers ---------------------------------------------------------


def verify_flow_half(g: Graph, s: int, t: int) -> float:
    """Smallest ``|f_e|`` over path edges (expected ``>= 1/2``)."""
    report = _require(g, s, t)
    flows = solve_flow(g, s, t).flows
    return float(min(abs(flows[e]) for e in report.shortest_path.edges))


def verify_sampling_bounds(g: Graph, s: int, t: int) -> tuple[np.ndarray, float]:
    """Per path edge ``p_e - r_e / (4 R_G)`` and ``Pr(e in P) - 1/4``."""
    report = _require(g, s, t)
    probs = flow_state_distribution(g, s, t).probs
    R = effective_resistance(g, s, t)
    edges = list(report.shortest_path.edges)
    per_edge = np.array([probs[e] - 1.0 / (4.0 * R * g.weights[e]) for e in edges])
    return per_edge, float(math.fsum(probs[edges]) - 0.25)


def verify_flow_dominance(g: Graph, s: int, t: int, slack: float = 1e-9) -> bool:
    report = _require(g, s, t)
    flows = np.abs(solve_flow(g, s, t).flows)
    on_path = np.zeros(g.id_bound, dtype=bool)
    on_path[list(report.shortest_path.edges)] = True
    off = flows[g.alive & ~on_path]
    if off.size == 0:
        return True
    return bool(flows[on_path].min() >= off.max() - slack)


def verify_subgraph_probability(g: Graph, x_edges, s: int, t: int) -> float:
    """``Pr(e in X) - R_G / R_X`` for the edge subset ``X``."""
    x_edges = sorted({int(e) for e in x_edges})
    sub = subgraph(g, x_edges)
    r_x = effective_resistance(sub, s, t)
    if not math.isfinite(r_x):
        raise DisconnectedError("edge subset does not connect s and t")
    probs = flow_state_distribution(g, s, t).probs
    return float(math.fsum(probs[x_edges]) - effective_resistance(g, s, t) / r_x)


def verify_resistance_decomposition(g: Graph, s: int, t: int) -> tuple[float, tuple[float, ...]]:
    """Slack of ``1/R_G <= 1/E_p[R_{G-e}] + 1/R_P`` and the per-edge ``q_i``.

    ``q_i`` is the current that the potentials of ``G - e_i`` would drive
    through ``e_i`` once it is put back.  Bridges on ``P`` make the bound
    trivial: the slack is ``inf`` and their ``q_i`` are reported as ``inf``.
    """
    report = _require(g, s, t)
    path = report.shortest_path
    qs, removed = [], []
    for (a, b), e in zip(zip(path.vertices, path.vertices[1:]), path.edges):
        h = remove_edge(g, e)
        r_h = effective_resistance(h, s, t)
        if math.isinf(r_h):
            qs.append(math.inf)
        else:
            phi = solve_flow(h, s, t).potentials
            qs.append(float((phi[a] - phi[b]) * g.weights[e]))
        removed.append(r_h)
    if any(math.isinf(r) for r in removed):
        return math.inf, tuple(qs)
    inv = np.array([1.0 / q for q in qs])
    p = inv / inv.sum()
    expected = float(np.dot(p, removed))
    R = effective_resistance(g, s, t)
    return 1.0 / expected + 1.0 / path.resistance_length - 1.0 / R, tuple(qs)


def verify_rg_half_rp(g: Graph, s: int, t: int) -> float:
    report = _require(g, s, t)
    return effective_resistance(g, s, t) - report.path_resistance / 2.0


def _subpath(path: PathWitness, i: int, j: int) -> PathWitness:
    edges = path.edges[i:j]
    return PathWitness(path.vertices[i:j + 1], edges, 0.0)


def verify_subpath_inheritance(g: Graph, s: int, t: int, x: int, y: int) -> float:
    """Margin measured on the subpath ``x .. y`` of ``P`` minus the margin for ``(s, t)``."""
    report = _require(g, s, t)
    path = report.shortest_path
    try:
        i, j = path.vertices.index(x), path.vertices.index(y)
    except ValueError:
        raise ValueError(f"{x} or {y} is not on the shortest path") from None
    if i >= j:
        raise ValueError("x must precede y on the shortest path")
    piece = _subpath(path, i, j)
    length = math.fsum(1.0 / g.weights[e] for e in piece.edges)
    piece = PathWitness(piece.vertices, piece.edges, length)
    alpha_xy, _ = removal_margin(g, x, y, piece)
    if math.isinf(alpha_xy):
        return math.inf
    return alpha_xy - report.max_alpha


def middle_section(g: Graph, path: PathWitness, scale: float) -> set[int]:
    """Edges of ``path`` farther than ``path_length / (10 * scale)`` from both ends."""
    cut = path.resistance_length / (10.0 * scale)
    r = 1.0 / g.weights
    before = 0.0
    out = set()
    for e in path.edges:
        after = path.resistance_length - before - r[e]
        if before > cut and after > cut:
            out.add(e)
        before += r[e]
    return out
