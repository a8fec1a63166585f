"""Unit electric flows, potentials and effective resistance.

All quantities come from the grounded Laplacian of the connected component
holding ``s`` and ``t``.  Each component is grounded at its smallest vertex
and factorised once per graph, so many ``(s, t)`` queries on the same graph
share a single factorisation.  Potentials are then shifted so that
``phi[t] == 0`` and ``phi[s] == R(s, t)``.

Flows are reported per edge id on the canonical orientation ``u -> v`` with
``u < v``; a negative value means current runs ``v -> u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import cg

from .config import DEFAULT_TOLERANCES, Tolerances
from .graph import Graph


class DegenerateInputError(ValueError):
    """Raised for ``s == t`` where an s-t flow is undefined."""


class DisconnectedError(ValueError):
    """``s`` and ``t`` lie in different components (infinite resistance)."""


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class FlowSolution:
    source: int
    sink: int
    potentials: np.ndarray
    flows: np.ndarray
    resistance: float


@dataclass(frozen=True, eq=False)
class FlowStateDistribution:
    source: int
    sink: int
    probs: np.ndarray


def laplacian(g: Graph) -> sp.csr_matrix:
    ids = g.edge_ids()
    u, v, w = g.tails[ids], g.heads[ids], g.weights[ids]
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([v, u, u, v])
    vals = np.concatenate([-w, -w, w, w])
    return sp.csr_matrix((vals, (rows, cols)), shape=(g.n, g.n))


def _components(g: Graph) -> np.ndarray:
    labels = g.memo.get("components")
    if labels is None:
        ids = g.edge_ids()
        adj = sp.csr_matrix((np.ones(len(ids)), (g.tails[ids], g.heads[ids])), shape=(g.n, g.n))
        _, labels = connected_components(adj, directed=False)
        g.memo["components"] = labels
    return labels


class _GroundedSolver:
    """Solves ``L x = b`` on one component with its smallest vertex grounded."""

    def __init__(self, g: Graph, verts: np.ndarray, tol: Tolerances):
        self.verts = verts
        self.tol = tol
        local = np.full(g.n, -1, dtype=np.int64)
        local[verts] = np.arange(len(verts))
        self.local = local
        L = laplacian(g)[verts][:, verts]
        self.reduced = L[1:, 1:].tocsr()
        k = self.reduced.shape[0]
        self.dense = k <= tol.dense_limit
        if self.dense:
            self.factor = la.cho_factor(self.reduced.toarray(), lower=True, check_finite=False)
        else:
            self.jacobi = sp.diags(1.0 / self.reduced.diagonal())

    def potentials(self, s: int, t: int) -> np.ndarray:
        k = len(self.verts)
        b = np.zeros(k)
        b[self.local[s]] += 1.0
        b[self.local[t]] -= 1.0
        x = np.zeros(k)
        if k > 1:
            rhs = b[1:]
            if self.dense:
                x[1:] = la.cho_solve(self.factor, rhs, check_finite=False)
            else:
                sol, info = cg(self.reduced, rhs, rtol=self.tol.residual, atol=0.0,
                               maxiter=self.tol.cg_iter_factor * k, M=self.jacobi)
                resid = np.linalg.norm(self.reduced @ sol - rhs) / np.linalg.norm(rhs)
                if info != 0 and resid > self.tol.conservation:
                    raise SolverError(f"conjugate gradient stalled (relative residual {resid:.3g})")
                x[1:] = sol
        return x - x[self.local[t]]


def _solver(g: Graph, component: int, tol: Tolerances) -> _GroundedSolver:
    cache = g.memo.setdefault("solvers", {})
    key = (component, tol.dense_limit, tol.residual, tol.cg_iter_factor)
    solver = cache.get(key)
    if solver is None:
        verts = np.flatnonzero(_components(g) == component)
        solver = _GroundedSolver(g, verts, tol)
        cache[key] = solver
    return solver


def _check_pair(g: Graph, s: int, t: int) -> None:
    g.check_vertex(s)
    g.check_vertex(t)
    if s == t:
        raise DegenerateInputError("s and t must differ")


def connected(g: Graph, s: int, t: int) -> bool:
    labels = _components(g)
    return bool(labels[s] == labels[t])


def solve_flow(g: Graph, s: int, t: int, tol: Tolerances = DEFAULT_TOLERANCES) -> FlowSolution:
    """Unit electric ``s -> t`` flow.

    Raises
    ------
    DegenerateInputError
        If ``s == t``.
    DisconnectedError
        If no ``s``-``t`` path exists (the resistance is infinite).
    """
    _check_pair(g, s, t)
    cache = g.memo.setdefault("flows", {})
    key = (s, t, tol)
    hit = cache.get(key)
    if hit is not None:
        return hit
    labels = _components(g)
    if labels[s] != labels[t]:
        raise DisconnectedError(f"vertices {s} and {t} are not connected")
    solver = _solver(g, int(labels[s]), tol)
    phi = np.zeros(g.n)
    phi[solver.verts] = solver.potentials(s, t)
    flows = np.zeros(g.id_bound)
    ids = g.edge_ids()
    flows[ids] = (phi[g.tails[ids]] - phi[g.heads[ids]]) * g.weights[ids]
    sol = FlowSolution(s, t, _readonly(phi), _readonly(flows), float(phi[s]))
    cache[key] = sol
    return sol


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def effective_resistance(g: Graph, s: int, t: int, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``R_G(s, t)``; ``math.inf`` when ``s`` and ``t`` are disconnected."""
    _check_pair(g, s, t)
    if not connected(g, s, t):
        return math.inf
    return solve_flow(g, s, t, tol).resistance


def energy(g: Graph, f: np.ndarray) -> float:
    """``sum_e f_e^2 r_e`` over the alive edges of ``g``.

    ``f`` is indexed by edge id and must have length ``g.id_bound``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (g.id_bound,):
        raise ValueError(f"flow vector has shape {f.shape}, expected ({g.id_bound},)")
    ids = g.edge_ids()
    return float(math.fsum(f[ids] ** 2 / g.weights[ids]))


def flow_state_distribution(g: Graph, s: int, t: int,
                            tol: Tolerances = DEFAULT_TOLERANCES) -> FlowStateDistribution:
    """Measurement distribution ``p_e = f_e^2 r_e / R`` of the flow state."""
    cache = g.memo.setdefault("dists", {})
    key = (s, t, tol)
    hit = cache.get(key)
    if hit is not None:
        return hit
    sol = solve_flow(g, s, t, tol)
    probs = sol.flows ** 2 / g.weights / sol.resistance
    probs[~g.alive] = 0.0
    dist = FlowStateDistribution(s, t, _readonly(probs))
    cache[key] = dist
    return dist


def escape_time_bound(g: Graph, s: int, t: int, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """``R_G(s, t) * m``, the commute-time based escape-time surrogate."""
    if not connected(g, s, t):
        _check_pair(g, s, t)
        raise DisconnectedError(f"vertices {s} and {t} are not connected")
    return solve_flow(g, s, t, tol).resistance * g.m


def conservation_residual(g: Graph, sol: FlowSolution) -> float:
    """Largest violation of Kirchhoff's current law for a unit ``s -> t`` flow."""
    ids = g.edge_ids()
    net = np.zeros(g.n)
    np.add.at(net, g.tails[ids], sol.flows[ids])
    np.add.at(net, g.heads[ids], -sol.flows[ids])
    net[sol.source] -= 1.0
    net[sol.sink] += 1.0
    return float(np.max(np.abs(net))) if g.n else 0.0
