"""Distribution-level stand-ins for flow-state sampling and resistance estimation.

Nothing here simulates a quantum circuit.  Sampling draws an edge from the
exact flow-state distribution, optionally perturbed within an l2 ball of
radius ``epsilon`` in amplitude space.  Estimation returns the exact
resistance blurred inside its ``epsilon`` band, or a corrupted value with
probability ``delta``.  Every call charges a quantum-walk step count to a
:class:`CostLedger`:

* preparation: ``ceil(c_prep * sqrt(R_hat * m) * (1/eps + ln(R * d_s + 2)))``
* estimation:  ``ceil(c_est * sqrt(R_hat * m) * (eps**-1.5 + ln(R * d_s + 2)) * ceil(ln(1/delta)))``

where ``R`` and ``d_s`` are exact oracle values and ``R_hat`` is the caller's
resistance bound (``R`` itself when none is given).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .electric import effective_resistance, flow_state_distribution
from .graph import Graph, degree
from .shortest import dijkstra


class PerturbationMode(str, enum.Enum):
    EXACT = "exact"
    RANDOM_AMPLITUDE = "random-amplitude"
    ADVERSARIAL = "adversarial-mass-shift"


class CorruptionMode(str, enum.Enum):
    NONE = "none"
    MULTIPLICATIVE = "multiplicative-3eps"
    ARBITRARY = "arbitrary-positive"


# CLI mode name -> (perturbation, corruption)
MODE_PRESETS = {
    "exact": (PerturbationMode.EXACT, CorruptionMode.NONE),
    "noisy": (PerturbationMode.RANDOM_AMPLITUDE, CorruptionMode.MULTIPLICATIVE),
    "adversarial": (PerturbationMode.ADVERSARIAL, CorruptionMode.ARBITRARY),
}


@dataclass(frozen=True)
class EmulationConfig:
    rng_seed: int = 0
    perturbation_mode: PerturbationMode = PerturbationMode.EXACT
    cost_constant_prep: float = 1.0
    cost_constant_est: float = 1.0
    corruption_mode: CorruptionMode = CorruptionMode.NONE

    def __post_init__(self):
        object.__setattr__(self, "perturbation_mode", PerturbationMode(self.perturbation_mode))
        object.__setattr__(self, "corruption_mode", CorruptionMode(self.corruption_mode))
        if not (self.cost_constant_prep > 0 and self.cost_constant_est > 0):
            raise ValueError("cost constants must be positive")

    @classmethod
    def preset(cls, mode: str, seed: int = 0, **kwargs) -> "EmulationConfig":
        perturbation, corruption = MODE_PRESETS[mode]
        return cls(rng_seed=seed, perturbation_mode=perturbation,
                   corruption_mode=corruption, **kwargs)


class LedgerEntry(NamedTuple):
    label: str
    steps: int
    group: int


class CostLedger:
    """Accumulates emulated walk steps.

    Charges that share a group id are taken to run concurrently: the group
    contributes its largest charge to :attr:`parallel_depth`.  A charge
    without a group opens a fresh singleton group, i.e. runs sequentially.
    """

    def __init__(self):
        self.entries: list[LedgerEntry] = []
        self.total_steps = 0
        self._group_max: dict[int, int] = {}
        self._next_group = 0

    def begin_parallel_group(self) -> int:
        gid = self._next_group
        self._next_group += 1
        self._group_max[gid] = 0
        return gid

    def charge(self, label: str, steps: int, group: int | None = None, count: int = 1) -> None:
        if steps < 0 or count < 0:
            raise ValueError("charges must be nonnegative")
        if group is None:
            for _ in range(count):
                self.charge(label, steps, self.begin_parallel_group())
            return
        if group not in self._group_max:
            raise KeyError(f"unknown ledger group {group}")
        entry = LedgerEntry(label, int(steps), group)
        self.entries.extend([entry] * count)
        self.total_steps += int(steps) * count
        if count and steps > self._group_max[group]:
            self._group_max[group] = int(steps)

    @property
    def parallel_depth(self) -> int:
        return sum(self._group_max.values())

    def report(self) -> str:
        lines = [f"total_steps: {self.total_steps}",
                 f"parallel_depth: {self.parallel_depth}",
                 f"entries: {len(self.entries)}"]
        # runs of identical entries are folded to keep reports readable
        run, prev = 0, None
        for entry in self.entries + [None]:
            if entry == prev:
                run += 1
                continue
            if prev is not None:
                suffix = f" x{run}" if run > 1 else ""
                lines.append(f"entry: {prev.label} steps={prev.steps} group={prev.group}{suffix}")
            prev, run = entry, 1
        return "\n".join(lines) + "\n"


def begin_parallel_group(ledger: CostLedger) -> int:
    return ledger.begin_parallel_group()


@dataclass(frozen=True)
class ResistanceEstimate:
    value: float
    epsilon: float
    delta: float
    corrupted: bool = False


# -- cost model ----------------------------------------------------------


def _log_term(g: Graph, s: int, resistance: float) -> float:
    return math.log(resistance * degree(g, s) + 2.0)


def _bound(g: Graph, resistance: float, r_hat: float | None) -> float:
    if r_hat is not None:
        if not r_hat > 0:
            raise ValueError("resistance bound must be positive")
        return r_hat
    if math.isfinite(resistance):
        return resistance
    # any finite effective resistance is at most the total resistance
    return float(np.sum(1.0 / g.weights[g.edge_ids()]))


def preparation_cost(g: Graph, s: int, t: int, epsilon: float, config: EmulationConfig,
                     r_hat: float | None = None) -> int:
    R = effective_resistance(g, s, t)
    bound = _bound(g, R, r_hat)
    log_r = R if math.isfinite(R) else bound
    value = config.cost_constant_prep * math.sqrt(bound * g.m) * (1.0 / epsilon + _log_term(g, s, log_r))
    return math.ceil(value)


def amplification(delta: float) -> int:
    return max(1, math.ceil(math.log(1.0 / delta)))


def estimation_cost(g: Graph, s: int, t: int, epsilon: float, delta: float,
                    config: EmulationConfig, r_hat: float | None = None) -> int:
    R = effective_resistance(g, s, t)
    bound = _bound(g, R, r_hat)
    log_r = R if math.isfinite(R) else bound
    value = (config.cost_constant_est * math.sqrt(bound * g.m)
             * (epsilon ** -1.5 + _log_term(g, s, log_r)) * amplification(delta))
    return math.ceil(value)


def _check_unit(name: str, x: float) -> None:
    if not 0.0 < x < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {x}")


# -- flow-state sampling ---------------------------------------------------


def exact_amplitudes(g: Graph, s: int, t: int) -> np.ndarray:
    """Nonnegative amplitudes ``|f_e| sqrt(r_e / R)`` indexed by edge id."""
    return np.sqrt(flow_state_distribution(g, s, t).probs)


def _mass_shift_pair(g: Graph, s: int, t: int, probs: np.ndarray,
                     path_edges) -> tuple[int, int] | None:
    on_path = np.zeros(g.id_bound, dtype=bool)
    on_path[list(path_edges if path_edges is not None else dijkstra(g, s, t).edges)] = True
    ids = g.edge_ids()
    path_ids = ids[on_path[ids]]
    off_ids = ids[~on_path[ids]]
    if len(path_ids) == 0 or len(off_ids) == 0:
        return None
    # argmax returns the first (smallest id) among ties
    return int(path_ids[np.argmax(probs[path_ids])]), int(off_ids[np.argmax(probs[off_ids])])


def perturbed_amplitudes(g: Graph, s: int, t: int, epsilon: float, config: EmulationConfig,
                         rng: np.random.Generator, copies: int = 1,
                         path_edges=None) -> np.ndarray:
    """``copies`` perturbed amplitude vectors ``a'`` with ``||a' - a||_2 <= epsilon``.

    Returns an array of shape ``(copies, g.id_bound)``; removed ids stay zero.
    """
    a = exact_amplitudes(g, s, t)
    mode = config.perturbation_mode
    if mode is PerturbationMode.EXACT:
        return np.broadcast_to(a, (copies, a.size))
    if mode is PerturbationMode.ADVERSARIAL:
        probs = a ** 2
        pair = _mass_shift_pair(g, s, t, probs, path_edges)
        shifted = probs.copy()
        if pair is not None:
            src, dst = pair
            mass = min(epsilon ** 2 / 2.0, shifted[src])
            shifted[src] -= mass
            shifted[dst] += mass
        return np.broadcast_to(np.sqrt(shifted), (copies, a.size))

    ids = g.edge_ids()
    base = a[ids]
    direction = rng.standard_normal((copies, ids.size))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    scale = np.full((copies, 1), epsilon)
    out = np.zeros((copies, a.size))
    pending = np.arange(copies)
    for _ in range(60):
        trial = base + scale[pending] * direction[pending]
        trial /= np.linalg.norm(trial, axis=1, keepdims=True)
        trial = np.abs(trial)
        dist = np.linalg.norm(trial - base, axis=1)
        ok = dist <= epsilon
        out[np.ix_(pending[ok], ids)] = trial[ok]
        pending = pending[~ok]
        if pending.size == 0:
            break
        # renormalisation stretched the step past the ball; shrink and retry
        scale[pending] *= (0.999 * epsilon / dist[~ok])[:, None]
    else:
        out[np.ix_(pending, ids)] = base
    return out


def _draw(amplitudes: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    probs = amplitudes ** 2
    cdf = np.cumsum(probs, axis=1)
    # u in (0, total] so zero-probability ids are never selected
    u = (1.0 - rng.random(probs.shape[0])) * cdf[:, -1]
    idx = (cdf < u[:, None]).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


def sample_flow_edges(g: Graph, s: int, t: int, epsilon: float, config: EmulationConfig,
                      ledger: CostLedger, group: int | None = None, *, rng: np.random.Generator,
                      count: int = 1, r_hat: float | None = None, path_edges=None,
                      label: str = "prepare") -> np.ndarray:
    """Measure ``count`` independently prepared approximate flow states.

    Each copy is perturbed independently and charged as its own ledger entry
    (all in ``group`` when one is given, otherwise sequentially).
    """
    _check_unit("epsilon", epsilon)
    if not math.isfinite(effective_resistance(g, s, t)):
        raise ValueError(f"vertices {s} and {t} are not connected")
    steps = preparation_cost(g, s, t, epsilon, config, r_hat)
    amps = perturbed_amplitudes(g, s, t, epsilon, config, rng, copies=count, path_edges=path_edges)
    edges = _draw(amps, rng)
    ledger.charge(f"{label}[eps={epsilon:.6g}]", steps, group, count=count)
    return edges


def sample_flow_edge(g: Graph, s: int, t: int, epsilon: float, config: EmulationConfig,
                     ledger: CostLedger, group: int | None = None, *, rng: np.random.Generator,
                     r_hat: float | None = None, path_edges=None) -> int:
    return int(sample_flow_edges(g, s, t, epsilon, config, ledger, group, rng=rng,
                                 count=1, r_hat=r_hat, path_edges=path_edges)[0])


# -- resistance estimation ------------------------------------------------


def _corrupt(R: float, epsilon: float, mode: CorruptionMode, rng: np.random.Generator) -> float:
    if mode is CorruptionMode.MULTIPLICATIVE:
        if rng.random() < 0.5:
            return R * (1.0 + 3.0 * epsilon)
        # keep the value positive and outside the band when 3*eps >= 1
        return R * (1.0 - 3.0 * epsilon) if 3.0 * epsilon < 1.0 else R * (1.0 - epsilon) / 2.0
    return R * 10.0 ** rng.uniform(-1.0, 1.0)


def estimate_resistance(g: Graph, s: int, t: int, epsilon: float, delta: float,
                        config: EmulationConfig, ledger: CostLedger, group: int | None = None, *,
                        rng: np.random.Generator, r_hat: float | None = None,
                        label: str = "estimate") -> ResistanceEstimate:
    """``epsilon``-multiplicative estimate of ``R_G(s, t)`` failing with probability ``delta``.

    Disconnected pairs return ``inf`` (never corrupted) at the price of one
    full run.  In exact perturbation mode uncorrupted estimates are exact.
    """
    _check_unit("epsilon", epsilon)
    _check_unit("delta", delta)
    R = effective_resistance(g, s, t)
    steps = estimation_cost(g, s, t, epsilon, delta, config, r_hat)
    ledger.charge(f"{label}[eps={epsilon:.6g},amplified=x{amplification(delta)}]", steps, group)
    if not math.isfinite(R):
        return ResistanceEstimate(math.inf, epsilon, delta, False)
    if config.corruption_mode is not CorruptionMode.NONE and rng.random() < delta:
        return ResistanceEstimate(_corrupt(R, epsilon, config.corruption_mode, rng),
                                  epsilon, delta, True)
    if config.perturbation_mode is PerturbationMode.EXACT:
        return ResistanceEstimate(R, epsilon, delta, False)
    return ResistanceEstimate(R * (1.0 + epsilon * rng.uniform(-1.0, 1.0)), epsilon, delta, False)
