"""Seeded instance families, each emitted together with its checker report.

Every generator is a pure function of its parameters and seed.  ``generate``
dispatches on an :class:`InstanceSpec`, runs the edge checker and returns an
:class:`Instance` whose label is the checker's verdict, so corpora never
carry unverified labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .conditions import ConditionReport, check_condition_edges
from .electric import effective_resistance
from .graph import Graph
from .shortest import distances

FAMILIES = ("path", "cactus-odd", "figure1", "parallel-detour", "random-condition1",
            "erdos-control")


class GeneratorError(ValueError):
    """Invalid parameters, or the rejection sampler ran out of attempts."""


@dataclass(frozen=True)
class InstanceSpec:
    family: str
    seed: int = 0
    params: tuple[tuple[str, Any], ...] = ()

    @classmethod
    def make(cls, family: str, seed: int = 0, **params) -> "InstanceSpec":
        if family not in FAMILIES:
            raise GeneratorError(f"unknown family {family!r}")
        return cls(family, int(seed), tuple(sorted(params.items())))

    def param(self, name: str, default=None):
        return dict(self.params).get(name, default)

    @property
    def name(self) -> str:
        parts = [self.family] + [f"{k}={v}" for k, v in self.params] + [f"seed={self.seed}"]
        return ",".join(parts)


@dataclass
class Instance:
    graph: Graph
    s: int
    t: int
    spec: InstanceSpec
    report: ConditionReport = field(repr=False)

    @property
    def holds(self) -> bool:
        return self.report.holds_condition1

    @property
    def label(self) -> str:
        return "holds" if self.holds else "fails"

    @property
    def l(self) -> float:
        return self.report.path_resistance


def _connected_random(rng: np.random.Generator, k: int, edges: int, offset: int) -> list[tuple[int, int]]:
    """A connected simple graph on ``offset .. offset+k-1`` with ``edges`` edges."""
    if edges < k - 1 or edges > k * (k - 1) // 2:
        raise GeneratorError(f"cannot build a connected graph on {k} vertices with {edges} edges")
    order = rng.permutation(k)
    chosen = set()
    for i in range(1, k):
        a, b = int(order[i]), int(order[rng.integers(i)])
        chosen.add((min(a, b), max(a, b)))
    missing = [(a, b) for a in range(k) for b in range(a + 1, k) if (a, b) not in chosen]
    extra = rng.choice(len(missing), size=edges - len(chosen), replace=False) if missing else []
    chosen.update(missing[int(i)] for i in extra)
    return [(a + offset, b + offset) for a, b in sorted(chosen)]


def _smallest_order(edges: int) -> int:
    k = 2
    while k * (k - 1) // 2 < edges:
        k += 1
    return k


# -- families ----------------------------------------------------------------


def gen_path(l: int, seed: int = 0) -> tuple[Graph, int, int]:
    if l < 1:
        raise GeneratorError("path length must be >= 1")
    return Graph(l + 1, [(i, i + 1, 1.0) for i in range(l)]), 0, l


def gen_parallel_detour(l: int, L: int, copies: int, seed: int = 0) -> tuple[Graph, int, int]:
    """An ``s``-``t`` path of ``l`` unit edges plus ``copies`` disjoint detours of ``L`` edges.

    ``L == l`` is accepted so that tied controls (e.g. the 4-cycle) can be
    built; the checker then reports the tie as a failure.
    """
    if l < 1 or copies < 0 or L < max(l, 2):
        raise GeneratorError("need l >= 1, L >= max(l, 2) and copies >= 0")
    edges = [(i, i + 1, 1.0) for i in range(l)]
    n = l + 1
    for _ in range(copies):
        chain = [0] + list(range(n, n + L - 1)) + [l]
        edges += [(a, b, 1.0) for a, b in zip(chain, chain[1:])]
        n += L - 1
    return Graph(n, edges), 0, l


def gen_cactus_odd(n: int, seed: int = 0, max_pairs: int = 1000) -> tuple[Graph, int, int]:
    """A random cactus whose cycles have length 3 or 5, plus a random pair passing the checker."""
    if n < 2:
        raise GeneratorError("cactus needs n >= 2")
    rng = np.random.default_rng(seed)
    edges: list[tuple[int, int, float]] = []
    size = 1
    while size < n:
        left = n - size
        options = ["bridge"]
        if left >= 2:
            options.append(3)
        if left >= 4:
            options.append(5)
        if left == 2:
            options = [3]
        kind = options[rng.integers(len(options))]
        anchor = int(rng.integers(size))
        if kind == "bridge":
            edges.append((anchor, size, 1.0))
            size += 1
        else:
            ring = [anchor] + list(range(size, size + kind - 1)) + [anchor]
            edges += [(a, b, 1.0) for a, b in zip(ring, ring[1:])]
            size += kind - 1
    g = Graph(n, edges)
    # odd cycles in series can still violate the condition, so the pair is
    # drawn until the checker confirms it; adjacent pairs always pass
    for _ in range(max_pairs):
        s, t = (int(x) for x in rng.choice(n, size=2, replace=False))
        if check_condition_edges(g, s, t).holds_condition1:
            return g, s, t
    raise GeneratorError(f"no condition-1 pair found in {max_pairs} draws")


def gen_figure1(seed: int = 0, g1_edges: int = 6, g2_edges: int = 3, g3_len: int = 3,
                max_attempts: int = 20) -> tuple[Graph, int, int]:
    """Backbone ``s-1-2-3-4-5-t`` with four attached gadgets.

    * ``G1``: random connected graph joined to ``s`` and ``2`` by two-edge connectors.
    * a four-edge detour ``2 -> 4`` below the backbone.
    * ``G2``: random connected graph hanging off vertex ``2``.
    * ``G3``: a path of ``g3_len`` edges between ``4`` and ``5``; it must satisfy
      ``R_{G - (4,5)}(4, 5) > r_(4,5)``.

    Attempts whose checker verdict fails are regenerated with a fresh draw.
    """
    if min(g1_edges, g2_edges, g3_len) < 1:
        raise GeneratorError("gadget sizes must be >= 1")
    # G3 guard, evaluated on the gadget alone (edge 4-5 removed)
    inner = list(range(2, g3_len + 1))
    chain = [0] + inner + [1]
    gadget = Graph(g3_len + 1, [(a, b, 1.0) for a, b in zip(chain, chain[1:])])
    if not effective_resistance(gadget, 0, 1) > 1.0:
        raise GeneratorError("G3 gadget violates R_{G-(4,5)}(4,5) > r_(4,5)")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        edges = [(i, i + 1) for i in range(6)]
        n = 7
        k1 = _smallest_order(g1_edges)
        g1 = _connected_random(rng, k1, g1_edges, n)
        a, b = n, n + k1 - 1
        n += k1
        edges += g1 + [(0, n), (n, a), (b, n + 1), (n + 1, 2)]
        n += 2
        detour = [2, n, n + 1, n + 2, 4]
        edges += list(zip(detour, detour[1:]))
        n += 3
        k2 = _smallest_order(g2_edges)
        edges += _connected_random(rng, k2, g2_edges, n) + [(2, n + int(rng.integers(k2)))]
        n += k2
        g3 = [4] + list(range(n, n + g3_len - 1)) + [5]
        edges += list(zip(g3, g3[1:]))
        n += g3_len - 1
        g = Graph(n, [(u, v, 1.0) for u, v in edges])
        if check_condition_edges(g, 0, 6).holds_condition1:
            return g, 0, 6
    raise GeneratorError(f"no figure-1 instance satisfied the condition in {max_attempts} attempts")


def _random_connected(rng: np.random.Generator, n: int, m: int, weighted: bool) -> Graph:
    pairs = _connected_random(rng, n, m, 0)
    if weighted:
        w = np.exp(rng.uniform(math.log(0.25), math.log(4.0), size=len(pairs)))
    else:
        w = np.ones(len(pairs))
    return Graph(n, [(a, b, float(x)) for (a, b), x in zip(pairs, w)])


def _check_sizes(n: int, m: int) -> None:
    if n < 2 or m < n - 1:
        raise GeneratorError("need n >= 2 and m >= n - 1")
    if m > n * (n - 1) // 2:
        raise GeneratorError("too many edges for a simple graph")


def gen_random_condition1(n: int, m: int, l: int, seed: int = 0, max_attempts: int = 200,
                          weighted: bool = False, pairs_per_graph: int = 8) -> tuple[Graph, int, int]:
    """Rejection-sample a connected graph and a pair with ``R_P`` in ``[l, 2l]`` passing the checker."""
    _check_sizes(n, m)
    if not 1 <= l <= n - 1:
        raise GeneratorError("need 1 <= l <= n - 1")
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        g = _random_connected(rng, n, m, weighted)
        for s, t in _pairs_in_band(g, rng, l, 2 * l, pairs_per_graph):
            if check_condition_edges(g, s, t).holds_condition1:
                return g, s, t
    raise GeneratorError(f"no condition-1 instance found in {max_attempts} attempts")


def _pairs_in_band(g: Graph, rng: np.random.Generator, lo: float, hi: float, limit: int):
    found = []
    for s in rng.permutation(g.n):
        d = distances(g, int(s))
        ok = np.flatnonzero((d >= lo - 1e-12) & (d <= hi + 1e-12))
        found += [(int(s), int(t)) for t in ok]
        if len(found) >= 4 * limit:
            break
    if not found:
        return []
    idx = rng.choice(len(found), size=min(limit, len(found)), replace=False)
    return [found[int(i)] for i in idx]


def gen_erdos_control(n: int, m: int, seed: int = 0, max_attempts: int = 200) -> tuple[Graph, int, int]:
    """A random connected graph and a pair for which the condition fails."""
    _check_sizes(n, m)
    rng = np.random.default_rng(seed)
    for _ in range(max_attempts):
        g = _random_connected(rng, n, m, False)
        s, t = (int(x) for x in rng.choice(n, size=2, replace=False))
        if not check_condition_edges(g, s, t).holds_condition1:
            return g, s, t
    raise GeneratorError(f"no failing control found in {max_attempts} attempts")


_DISPATCH = {
    "path": lambda spec: gen_path(spec.param("l"), spec.seed),
    "parallel-detour": lambda spec: gen_parallel_detour(spec.param("l"), spec.param("L"),
                                                        spec.param("copies", 1), spec.seed),
    "cactus-odd": lambda spec: gen_cactus_odd(spec.param("n"), spec.seed),
    "figure1": lambda spec: gen_figure1(spec.seed, spec.param("g1", 6), spec.param("g2", 3),
                                        spec.param("g3", 3)),
    "random-condition1": lambda spec: gen_random_condition1(
        spec.param("n"), spec.param("m"), spec.param("l"), spec.seed,
        spec.param("max_attempts", 200), spec.param("weighted", False)),
    "erdos-control": lambda spec: gen_erdos_control(spec.param("n"), spec.param("m"), spec.seed),
}


def generate(spec: InstanceSpec) -> Instance:
    try:
        g, s, t = _DISPATCH[spec.family](spec)
    except TypeError as exc:
        raise GeneratorError(f"missing or invalid parameters for {spec.name}: {exc}") from None
    return Instance(g, s, t, spec, check_condition_edges(g, s, t))


# -- corpora -----------------------------------------------------------------


def lemma_corpus(size: int = 200, seed: int = 0) -> list[Instance]:
    """Condition-1 instances cycling through all holding families."""
    rng = np.random.default_rng(seed)
    out: list[Instance] = []
    i = 0
    while len(out) < size:
        sub = int(rng.integers(2**31))
        kind = i % 5
        if kind == 0:
            spec = InstanceSpec.make("cactus-odd", sub, n=int(rng.integers(4, 31)))
        elif kind == 1:
            l = int(rng.integers(1, 9))
            spec = InstanceSpec.make("parallel-detour", sub, l=l, L=int(rng.integers(l + 1, 3 * l + 4)),
                                     copies=int(rng.integers(0, 3)))
        elif kind == 2:
            spec = InstanceSpec.make("figure1", sub, g1=int(rng.integers(1, 21)),
                                     g2=int(rng.integers(1, 8)), g3=int(rng.integers(3, 7)))
        else:
            n = int(rng.integers(8, 25))
            m = int(rng.integers(n - 1, n + n // 3 + 1))
            spec = InstanceSpec.make("random-condition1", sub, n=n, m=m,
                                     l=int(rng.integers(1, 5)), weighted=kind == 4)
        i += 1
        inst = generate(spec)
        if inst.holds:
            out.append(inst)
    return out


# (family, params) for the 10-instance algorithm corpus; lengths span 2..16
ALGORITHM_CORPUS_SPECS = (
    InstanceSpec.make("parallel-detour", 0, l=2, L=5, copies=2),
    InstanceSpec.make("random-condition1", 1, n=12, m=16, l=3),
    InstanceSpec.make("cactus-odd", 7, n=24),
    InstanceSpec.make("random-condition1", 2, n=20, m=26, l=4, weighted=True),
    InstanceSpec.make("figure1", 3, g1=20, g2=4, g3=3),
    InstanceSpec.make("random-condition1", 3, n=30, m=36, l=7),
    InstanceSpec.make("parallel-detour", 0, l=8, L=20, copies=2),
    InstanceSpec.make("random-condition1", 5, n=40, m=46, l=10),
    InstanceSpec.make("parallel-detour", 0, l=12, L=30, copies=1),
    InstanceSpec.make("parallel-detour", 0, l=16, L=40, copies=2),
)


def algorithm_corpus() -> list[Instance]:
    out = [generate(spec) for spec in ALGORITHM_CORPUS_SPECS]
    bad = [inst.spec.name for inst in out if not inst.holds]
    if bad:
        raise GeneratorError(f"algorithm corpus instances fail the condition: {bad}")
    return out
