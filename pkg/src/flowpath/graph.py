"""Weighted undirected simple graphs viewed as resistor networks.

Every edge ``e`` joining ``u`` and ``v`` has a positive weight ``w_e`` and
resistance ``r_e = 1 / w_e``.  Edges are stored with canonical orientation
``u < v`` and keep their integer id for the lifetime of every graph derived
from the original by :func:`remove_edge` / :func:`add_edge`.

Graphs are immutable.  Derived quantities (adjacency, oracle solves) are
memoised on the instance, which is safe because nothing ever mutates it.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class GraphError(ValueError):
    """Base class for invalid graph input."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class SelfLoopError(GraphError):
    pass


class DuplicateEdgeError(GraphError):
    pass


class WeightError(GraphError):
    pass


class InvalidEdgeError(GraphError):
    pass


class InvalidVertexError(GraphError):
    pass


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Graph:
    """Immutable weighted undirected simple graph with stable edge ids.

    Parameters
    ----------
    n:
        Number of vertices; vertices are ``0 .. n-1``.
    edges:
        Iterable of ``(u, v, w)`` triples.  Edge ids are assigned in order.
    labels:
        Optional external vertex labels (e.g. ids from a sparse edge list).
    """

    __slots__ = ("_n", "_u", "_v", "_w", "_alive", "_labels", "_adj", "_lookup", "memo")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, float]] = (),
                 labels: Sequence[int] | None = None):
        if n < 0:
            raise GraphError("vertex count must be nonnegative")
        us, vs, ws = [], [], []
        seen: set[tuple[int, int]] = set()
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            for x in (u, v):
                if not 0 <= x < n:
                    raise InvalidVertexError(f"vertex {x} out of range for n={n}")
            if u == v:
                raise SelfLoopError(f"self-loop at vertex {u}")
            if not (math.isfinite(w) and w > 0):
                raise WeightError(f"weight of edge ({u}, {v}) must be finite and > 0, got {w}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdgeError(f"duplicate edge {key}")
            seen.add(key)
            us.append(key[0])
            vs.append(key[1])
            ws.append(w)
        if labels is not None and len(labels) != n:
            raise GraphError("labels must have one entry per vertex")
        self._init(n, np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64),
                   np.array(ws, dtype=float), np.ones(len(us), dtype=bool),
                   tuple(labels) if labels is not None else None)

    def _init(self, n, u, v, w, alive, labels):
        self._n = n
        self._u = _readonly(u)
        self._v = _readonly(v)
        self._w = _readonly(w)
        self._alive = _readonly(alive)
        self._labels = labels
        self._adj = None
        self._lookup = None
        self.memo: dict = {}

    @classmethod
    def _derive(cls, parent: "Graph", u, v, w, alive) -> "Graph":
        g = cls.__new__(cls)
        g._init(parent._n, u, v, w, alive, parent._labels)
        return g

    def __getstate__(self):
        return (self._n, np.array(self._u), np.array(self._v), np.array(self._w),
                np.array(self._alive), self._labels)

    def __setstate__(self, state):
        self._init(*state)

    # -- sizes and ids -------------------------------------------------

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return int(self._alive.sum())

    @property
    def id_bound(self) -> int:
        """One past the largest edge id ever allocated (flow vectors have this length)."""
        return len(self._u)

    @property
    def labels(self) -> tuple[int, ...]:
        return self._labels if self._labels is not None else tuple(range(self._n))

    def index_of(self, label: int) -> int:
        """Dense vertex id for an external label."""
        if self._labels is None:
            self.check_vertex(label)
            return int(label)
        try:
            return self._labels.index(label)
        except ValueError:
            raise InvalidVertexError(f"unknown vertex label {label!r}") from None

    @property
    def alive(self) -> np.ndarray:
        return self._alive

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self._alive)

    def has_edge_id(self, e: int) -> bool:
        return 0 <= e < len(self._u) and bool(self._alive[e])

    def _check_edge(self, e: int) -> None:
        if not self.has_edge_id(e):
            raise InvalidEdgeError(f"invalid edge id {e}")

    def check_vertex(self, v: int) -> None:
        if not (isinstance(v, (int, np.integer)) and 0 <= v < self._n):
            raise InvalidVertexError(f"invalid vertex {v!r}")

    # -- edge data -----------------------------------------------------

    @property
    def tails(self) -> np.ndarray:
        """Smaller endpoint per edge id (including removed ids)."""
        return self._u

    @property
    def heads(self) -> np.ndarray:
        return self._v

    @property
    def weights(self) -> np.ndarray:
        return self._w

    @property
    def resistances(self) -> np.ndarray:
        return 1.0 / self._w

    def endpoints(self, e: int) -> tuple[int, int]:
        self._check_edge(e)
        return int(self._u[e]), int(self._v[e])

    def weight(self, e: int) -> float:
        self._check_edge(e)
        return float(self._w[e])

    def resistance(self, e: int) -> float:
        return 1.0 / self.weight(e)

    def edges(self) -> list[tuple[int, int, int, float]]:
        """Alive edges as ``(id, u, v, w)`` in id order."""
        return [(int(e), int(self._u[e]), int(self._v[e]), float(self._w[e]))
                for e in self.edge_ids()]

    def adjacency(self, v: int) -> list[tuple[int, int]]:
        """``(neighbor, edge id)`` pairs incident to ``v``."""
        self.check_vertex(v)
        return self._adjacency()[v]

    def _adjacency(self) -> list[list[tuple[int, int]]]:
        if self._adj is None:
            adj: list[list[tuple[int, int]]] = [[] for _ in range(self._n)]
            for e in self.edge_ids():
                u, v = int(self._u[e]), int(self._v[e])
                adj[u].append((v, int(e)))
                adj[v].append((u, int(e)))
            self._adj = adj
        return self._adj

    def edge_between(self, u: int, v: int) -> int | None:
        if self._lookup is None:
            self._lookup = {(int(self._u[e]), int(self._v[e])): int(e) for e in self.edge_ids()}
        return self._lookup.get((min(u, v), max(u, v)))

    def __repr__(self) -> str:
        return f"Graph(n={self._n}, m={self.m})"


def remove_edge(g: Graph, e: int) -> Graph:
    """Return ``g`` without edge ``e``; every other edge keeps its id and weight.

    The result is memoised on ``g`` so that repeated removals of the same edge
    share one derived graph (and its cached factorisations).
    """
    g._check_edge(e)
    cache = g.memo.setdefault("removed", {})
    child = cache.get(e)
    if child is None:
        alive = np.array(g._alive)
        alive[e] = False
        child = Graph._derive(g, g._u, g._v, g._w, alive)
        cache[e] = child
    return child


def add_edge(g: Graph, u: int, v: int, w: float) -> Graph:
    """Return ``g`` plus an edge ``u``-``v`` of weight ``w`` under a fresh id."""
    g.check_vertex(u)
    g.check_vertex(v)
    if u == v:
        raise SelfLoopError(f"self-loop at vertex {u}")
    if not (math.isfinite(w) and w > 0):
        raise WeightError(f"weight must be finite and > 0, got {w}")
    if g.edge_between(u, v) is not None:
        raise DuplicateEdgeError(f"duplicate edge {(min(u, v), max(u, v))}")
    a, b = min(u, v), max(u, v)
    return Graph._derive(g, np.append(g._u, a), np.append(g._v, b),
                         np.append(g._w, float(w)), np.append(g._alive, True))


def subgraph(g: Graph, edge_ids: Iterable[int]) -> Graph:
    """Keep only the listed edges (ids preserved), all vertices retained."""
    alive = np.zeros_like(g._alive)
    for e in edge_ids:
        g._check_edge(int(e))
        alive[int(e)] = True
    return Graph._derive(g, g._u, g._v, g._w, alive)


def degree(g: Graph, v: int) -> int:
    return len(g.adjacency(v))


def reachable(g: Graph, s: int) -> set[int]:
    g.check_vertex(s)
    adj = g._adjacency()
    seen = {s}
    queue = deque([s])
    while queue:
        x = queue.popleft()
        for y, _ in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def is_connected(g: Graph, s: int, t: int) -> bool:
    """True iff an ``s``-``t`` path exists (``s == t`` counts as connected)."""
    g.check_vertex(t)
    if s == t:
        g.check_vertex(s)
        return True
    return t in reachable(g, s)


# -- paths -------------------------------------------------------------


class OrientedEdge(NamedTuple):
    """An edge with a direction: ``forward`` means the canonical ``u -> v`` with ``u < v``."""

    edge: int
    forward: bool = True

    def ends(self, g: "Graph") -> tuple[int, int]:
        u, v = g.endpoints(self.edge)
        return (u, v) if self.forward else (v, u)

    def reverse(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, not self.forward)


def orient(g: Graph, e: int, tail: int) -> OrientedEdge:
    """The orientation of ``e`` leaving ``tail``."""
    u, v = g.endpoints(e)
    if tail not in (u, v):
        raise InvalidVertexError(f"vertex {tail} is not an endpoint of edge {e}")
    return OrientedEdge(e, tail == u)


@dataclass(frozen=True)
class PathWitness:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    resistance_length: float

    @property
    def hops(self) -> int:
        return len(self.edges)


def path_from_vertices(g: Graph, vertices: Sequence[int]) -> PathWitness:
    """Build a witness for consecutive vertices; raises if a hop is not an edge."""
    edges = []
    for a, b in zip(vertices, vertices[1:]):
        e = g.edge_between(a, b)
        if e is None:
            raise InvalidEdgeError(f"no edge between {a} and {b}")
        edges.append(e)
    length = math.fsum(1.0 / g.weights[e] for e in edges)
    return PathWitness(tuple(int(v) for v in vertices), tuple(edges), length)


# -- edge-list text format -------------------------------------------


def from_edge_list(text: str) -> Graph:
    """Parse ``u v w`` lines ('#' starts a comment) into a graph.

    Vertex ids may be sparse; they are remapped to ``0..n-1`` in increasing
    order and the originals are kept in :attr:`Graph.labels`.
    """
    raw: list[tuple[int, int, int, float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ParseError(lineno, f"expected 'u v w', got {body!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(lineno, "vertex ids must be integers") from None
        try:
            w = float(parts[2])
        except ValueError:
            raise ParseError(lineno, f"bad weight {parts[2]!r}") from None
        if u < 0 or v < 0:
            raise ParseError(lineno, "vertex ids must be nonnegative")
        if not (math.isfinite(w) and w > 0):
            raise WeightError(f"line {lineno}: weight must be finite and > 0, got {parts[2]}")
        if u == v:
            raise SelfLoopError(f"line {lineno}: self-loop at vertex {u}")
        raw.append((lineno, u, v, w))
    ids = sorted({x for _, u, v, _ in raw for x in (u, v)})
    index = {x: i for i, x in enumerate(ids)}
    seen: dict[tuple[int, int], int] = {}
    edges = []
    for lineno, u, v, w in raw:
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdgeError(
                f"line {lineno}: duplicate edge {key} (first on line {seen[key]})")
        seen[key] = lineno
        edges.append((index[u], index[v], w))
    labels = ids if ids != list(range(len(ids))) else None
    return Graph(len(ids), edges, labels=labels)


def to_edge_list(g: Graph) -> str:
    labels = g.labels
    lines = [f"{labels[u]} {labels[v]} {w!r}" for _, u, v, w in g.edges()]
    return "\n".join(lines) + ("\n" if lines else "")
