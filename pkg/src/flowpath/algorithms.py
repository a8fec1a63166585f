"""Shortest-path finders driven by emulated flow sampling.

``algorithm_a1`` samples the flow state ``O(l log l)`` times and runs
Dijkstra on the sampled edges.  ``algorithm_a2`` repeatedly samples a few
edges between the current endpoints ``x, y``, keeps the one whose removal
raises ``R(x, y)`` the most, and splits the problem at one of its endpoints.
Both return a :class:`RunResult` with the emulated cost ledger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .emulation import (CostLedger, EmulationConfig, PerturbationMode, estimate_resistance,
                        sample_flow_edges)
from .graph import Graph, PathWitness, is_connected, path_from_vertices, remove_edge, subgraph
from .shortest import NoPathError, dijkstra, validate_path

__all__ = [
    "A1Params", "A2Params", "RoundRecord", "RunResult", "algorithm_a1", "algorithm_a2",
    "coupon_collector_bound", "dijkstra", "validate_path",
]


def _log_l(l_hat: float) -> float:
    return math.log(l_hat + 2.0)


@dataclass(frozen=True)
class A1Params:
    l_hat: float
    beta: float = 3.0
    epsilon: float | None = None

    def __post_init__(self):
        if not self.l_hat >= 1:
            raise ValueError("l_hat must be >= 1")
        if not self.beta >= 1:
            raise ValueError("beta must be >= 1")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 1.0 / math.sqrt(8.0 * self.l_hat))
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")

    @property
    def samples(self) -> int:
        return math.ceil(self.beta * 8.0 * self.l_hat * _log_l(self.l_hat))


@dataclass(frozen=True)
class A2Params:
    """Parameters of the divide-and-conquer finder.

    ``k_const``, ``eps_const`` scale the per-round sample count and the
    preparation accuracy by ``ln(l_hat + 2)``.  Failure probabilities are
    clamped to at most ``1/2`` and accuracies below ``max_accuracy``.
    """

    l_hat: float
    alpha: float
    k_const: float = 6.0
    eps_const: float = 1.0
    delta1: float | None = None
    delta2: float | None = None
    max_accuracy: float = 0.5

    def __post_init__(self):
        if not self.l_hat > 0:
            raise ValueError("l_hat must be positive")
        for name in ("alpha", "k_const", "eps_const", "max_accuracy"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.delta1 is None:
            object.__setattr__(self, "delta1", 1.0 / (self.l_hat * _log_l(self.l_hat)))
        if self.delta2 is None:
            object.__setattr__(self, "delta2", 1.0 / self.l_hat)
        object.__setattr__(self, "delta1", min(self.delta1, 0.5))
        object.__setattr__(self, "delta2", min(self.delta2, 0.5))
        if not (self.delta1 > 0 and self.delta2 > 0):
            raise ValueError("failure probabilities must be positive")

    @property
    def k(self) -> int:
        return math.ceil(self.k_const * _log_l(self.l_hat))

    @property
    def epsilon(self) -> float:
        return min(self.eps_const / _log_l(self.l_hat), 0.95)

    @property
    def removal_accuracy(self) -> float:
        return min(self.alpha / 2.0, self.max_accuracy)

    split_accuracy = 0.5

    @property
    def depth_cap(self) -> float:
        return 4.0 * self.l_hat


@dataclass(frozen=True)
class RoundRecord:
    x: int
    y: int
    r_hat: float
    depth: int
    e_star: int
    split: int | None


@dataclass
class RunResult:
    path: PathWitness | None
    ledger: CostLedger
    success: bool
    rounds: int
    trace: list[RoundRecord] = field(default_factory=list)
    reason: str = ""


def coupon_collector_bound(set_size: int, p_min: float) -> float:
    """``H(set_size) / p_min``: expected draws to see every element of a set.

    Each element has probability at least ``p_min`` per draw.
    """
    if not 0 < p_min <= 1:
        raise ValueError("p_min must lie in (0, 1]")
    if set_size < 1:
        raise ValueError("set_size must be positive")
    return math.fsum(1.0 / k for k in range(1, set_size + 1)) / p_min


# -- A1 ---------------------------------------------------------------------


def algorithm_a1(g: Graph, s: int, t: int, params: A1Params, config: EmulationConfig,
                 parallel: bool = False) -> RunResult:
    rng = np.random.default_rng(config.rng_seed)
    ledger = CostLedger()
    group = ledger.begin_parallel_group() if parallel else None
    drawn = sample_flow_edges(g, s, t, params.epsilon, config, ledger, group, rng=rng,
                              count=params.samples, r_hat=params.l_hat, label="a1.prepare")
    kept = list(dict.fromkeys(int(e) for e in drawn))
    sparse = subgraph(g, kept)
    if not is_connected(sparse, s, t):
        return RunResult(None, ledger, False, 1, reason="sampled edges do not connect s and t")
    found = dijkstra(sparse, s, t)
    path = path_from_vertices(g, found.vertices)
    ok = validate_path(g, path, s, t)
    return RunResult(path, ledger, ok, 1, reason="" if ok else "invalid path")


# -- A2 ---------------------------------------------------------------------


@dataclass
class _Node:
    x: int
    y: int
    r_hat: float
    depth: int
    edge: int | None = None
    children: tuple["_Node", "_Node"] | None = None


class _Abort(Exception):
    pass


def _pick(values: list[tuple[float, int]]) -> int:
    # largest estimate wins, inf beats finite, smaller edge id breaks ties
    return max(values, key=lambda ve: (ve[0], -ve[1]))[1]


def algorithm_a2(g: Graph, s: int, t: int, params: A2Params, config: EmulationConfig,
                 parallel: bool = False) -> RunResult:
    """Divide and conquer over the endpoints of high-resistance-impact edges.

    Subproblems are processed layer by layer.  With ``parallel`` every layer
    charges its preparations, removal estimates and split estimates to three
    shared ledger groups; otherwise each charge runs sequentially.
    """
    rng = np.random.default_rng(config.rng_seed)
    ledger = CostLedger()
    trace: list[RoundRecord] = []
    adversarial = config.perturbation_mode is PerturbationMode.ADVERSARIAL
    round_cap = math.ceil(16 * params.l_hat) + 16
    k, eps = params.k, params.epsilon
    acc = params.removal_accuracy
    root = _Node(s, t, float(params.l_hat), 0)
    layer = [root]
    try:
        while layer:
            groups = ([ledger.begin_parallel_group() for _ in range(3)] if parallel
                      else [None, None, None])
            upcoming: list[_Node] = []
            for node in layer:
                if node.x == node.y:
                    continue
                if node.depth > params.depth_cap:
                    raise _Abort("recursion depth cap exceeded")
                if len(trace) >= round_cap:
                    raise _Abort("round cap exceeded")
                upcoming.extend(_round(g, node, params, config, ledger, groups, rng, trace,
                                       k, eps, acc, adversarial))
            layer = upcoming
    except _Abort as exc:
        return RunResult(None, ledger, False, len(trace), trace, reason=str(exc))

    vertices = [s]
    stack = [root]
    while stack:
        node = stack.pop()
        if node.children is not None:
            stack.extend(reversed(node.children))
        elif node.edge is not None:
            vertices.append(node.y)
    try:
        path = path_from_vertices(g, vertices)
    except ValueError:
        return RunResult(None, ledger, False, len(trace), trace, reason="assembled walk is broken")
    ok = validate_path(g, path, s, t)
    return RunResult(path, ledger, ok, len(trace), trace, reason="" if ok else "path is not simple")


def _round(g, node, params, config, ledger, groups, rng, trace, k, eps, acc, adversarial):
    x, y = node.x, node.y
    path_edges = None
    if adversarial:
        try:
            path_edges = dijkstra(g, x, y).edges
        except NoPathError:
            path_edges = ()
    drawn = sample_flow_edges(g, x, y, eps, config, ledger, groups[0], rng=rng, count=k,
                              r_hat=node.r_hat, path_edges=path_edges, label="a2.prepare")
    scored = []
    for e in drawn:
        e = int(e)
        est = estimate_resistance(remove_edge(g, e), x, y, acc, params.delta1, config, ledger,
                                  groups[1], rng=rng, r_hat=node.r_hat, label="a2.removal")
        scored.append((est.value, e))
    e_star = _pick(scored)
    a, b = g.endpoints(e_star)
    if {a, b} == {x, y}:
        node.edge = e_star
        trace.append(RoundRecord(x, y, node.r_hat, node.depth, e_star, None))
        return []
    v = a if rng.random() < 0.5 else b
    if v in (x, y):
        # an endpoint shared with the subproblem would make no progress
        v = b if v == a else a
    trace.append(RoundRecord(x, y, node.r_hat, node.depth, e_star, v))
    left = estimate_resistance(g, x, v, params.split_accuracy, params.delta2, config, ledger,
                               groups[2], rng=rng, r_hat=node.r_hat, label="a2.split")
    right = estimate_resistance(g, v, y, params.split_accuracy, params.delta2, config, ledger,
                                groups[2], rng=rng, r_hat=node.r_hat, label="a2.split")
    scale = 2.0 * (1.0 + params.split_accuracy)
    node.children = (_Node(x, v, scale * left.value, node.depth + 1),
                     _Node(v, y, scale * right.value, node.depth + 1))
    return list(node.children)
