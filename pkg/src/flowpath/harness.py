"""Trial runner, scaling sweeps, corpus I/O and the lemma verification suite.

All outputs are plain text.  Sweep and trial CSVs have a fixed column order
and always carry a header; ``wall_time`` is recorded but excluded from any
reproducibility comparison (see :func:`strip_wall_time`).
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .algorithms import A1Params, A2Params, RunResult, algorithm_a1, algorithm_a2
from .conditions import (check_condition_edges, verify_flow_dominance, verify_flow_half,
                         verify_resistance_decomposition, verify_rg_half_rp,
                         verify_sampling_bounds, verify_subgraph_probability)
from .electric import DisconnectedError
from .emulation import CostLedger, EmulationConfig, amplification
from .generators import Instance, InstanceSpec, algorithm_corpus, generate, lemma_corpus
from .graph import Graph, from_edge_list, to_edge_list
from .shortest import dijkstra

CORPUS_ENV = "FLOWPATH_CORPUS"
ALGORITHMS = ("a1", "a2", "dijkstra")
SLACK = -1e-9

EXIT_OK, EXIT_ALGORITHM, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3


class InvariantViolation(RuntimeError):
    """An internal consistency check failed (exit code 3)."""


@dataclass(frozen=True)
class BenchRecord:
    instance: str
    algorithm: str
    mode: str
    seed: int
    success: bool
    total_steps: int
    parallel_depth: int
    wall_time: float

    def __post_init__(self):
        if not self.total_steps >= self.parallel_depth >= 0:
            raise InvariantViolation(f"ledger totals out of order in {self}")


BENCH_COLUMNS = tuple(f.name for f in fields(BenchRecord))


@dataclass
class TrialSummary:
    records: list[BenchRecord]
    success_rate: float
    mean_steps: float
    mean_depth: float
    runs: list[RunResult] = field(default_factory=list, repr=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(BENCH_COLUMNS)
        for rec in self.records:
            row = asdict(rec)
            row["success"] = int(rec.success)
            row["wall_time"] = f"{rec.wall_time:.6f}"
            writer.writerow(row[c] for c in BENCH_COLUMNS)
        buf.write(f"# trials: {len(self.records)}\n")
        buf.write(f"# success_rate: {self.success_rate:.6f}\n")
        buf.write(f"# mean_total_steps: {self.mean_steps:.6f}\n")
        buf.write(f"# mean_parallel_depth: {self.mean_depth:.6f}\n")
        return buf.getvalue()


def default_params(algorithm: str, inst: Instance):
    """Analysis-side defaults: ``l_hat`` is the true path length, ``alpha`` the checker margin capped at 1."""
    l_hat = max(inst.l, 1.0)
    if algorithm == "a1":
        return A1Params(l_hat)
    if algorithm == "a2":
        alpha = inst.report.max_alpha
        return A2Params(l_hat, min(alpha, 1.0) if alpha > 0 else 1.0)
    return None


def run_algorithm(g: Graph, s: int, t: int, algorithm: str, params, config: EmulationConfig,
                  parallel: bool = False) -> RunResult:
    if algorithm == "a1":
        return algorithm_a1(g, s, t, params, config, parallel=parallel)
    if algorithm == "a2":
        return algorithm_a2(g, s, t, params, config, parallel=parallel)
    if algorithm == "dijkstra":
        return RunResult(dijkstra(g, s, t), CostLedger(), True, 0)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _one_trial(job) -> tuple[BenchRecord, RunResult]:
    inst, name, algorithm, params, mode, seed, parallel = job
    config = EmulationConfig.preset(mode, seed)
    start = time.perf_counter()
    run = run_algorithm(inst.graph, inst.s, inst.t, algorithm, params, config, parallel)
    elapsed = time.perf_counter() - start
    reference = dijkstra(inst.graph, inst.s, inst.t)
    # a trial succeeds when it reproduces the classical reference path
    success = bool(run.success and run.path.vertices == reference.vertices)
    rec = BenchRecord(name, algorithm, mode, seed, success, run.ledger.total_steps,
                      run.ledger.parallel_depth, elapsed)
    return rec, run


def run_trials(spec: InstanceSpec | Instance, algorithm: str, params=None, trials: int = 1,
               base_seed: int = 0, mode: str = "noisy", parallel: bool = False,
               workers: int = 1, keep_runs: bool = False) -> TrialSummary:
    """Run ``trials`` seeded trials (seeds ``base_seed .. base_seed + trials - 1``).

    With ``workers > 1`` trials run in worker processes; records are still
    emitted in seed order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    inst = spec if isinstance(spec, Instance) else generate(spec)
    if params is None:
        params = default_params(algorithm, inst)
    name = inst.spec.name
    jobs = [(inst, name, algorithm, params, mode, base_seed + i, parallel) for i in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one_trial, jobs, chunksize=max(1, trials // (4 * workers))))
    else:
        results = [_one_trial(job) for job in jobs]
    records = [rec for rec, _ in results]
    return TrialSummary(
        records,
        success_rate=sum(r.success for r in records) / trials,
        mean_steps=float(np.mean([r.total_steps for r in records])),
        mean_depth=float(np.mean([r.parallel_depth for r in records])),
        runs=[run for _, run in results] if keep_runs else [],
    )


# -- scaling sweeps -----------------------------------------------------------


def log_factor(algorithm: str, metric: str, l_hat: float, m: int) -> float:
    """Polylogarithmic multipliers of the cost schedule, divided out before regressing.

    * a1: the ``ln(l + 2)`` in the sample count (the preparation accuracy
      ``1/sqrt(8l)`` contributes a polynomial factor and is kept).
    * a2 total: samples per round ``k``, the amplification ``ceil(ln 1/delta1)``
      and the estimation bracket ``accuracy^-1.5 + ln(l m + 2)``.
    * a2 depth: as the total, with ``k`` (run concurrently) replaced by the
      ``ln(l + 2)`` recursion depth.
    """
    if algorithm == "a1":
        return math.log(l_hat + 2.0)
    p = A2Params(l_hat, 1.0)
    bracket = amplification(p.delta1) * (p.removal_accuracy ** -1.5 + math.log(l_hat * m + 2.0))
    if metric == "total_steps":
        return p.k * bracket
    return bracket * math.log(l_hat + 2.0)


def fit_slope(x, y) -> float:
    """Least-squares slope of ``ln y`` against ``ln x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


SWEEP_COLUMNS = ("sweep", "l", "m", "mean_total_steps", "mean_parallel_depth", "success_rate",
                 "norm_total_steps", "norm_parallel_depth", "wall_time")


@dataclass
class SweepResult:
    algorithm: str
    rows: list[dict]
    slopes: dict[str, float]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: (f"{v:.6f}" if isinstance(v, float) else v) for k, v in row.items()})
        for key, value in self.slopes.items():
            buf.write(f"# slope {key}: {value:.6f}\n")
        return buf.getvalue()


def scaling_sweep(family: str = "parallel-detour", l_values=(4, 8, 16, 32), m_values=(64, 256, 1024),
                  algorithm: str = "a2", trials: int = 20, base_seed: int = 0, mode: str = "noisy",
                  fixed_m: int = 256, fixed_l: int = 8, workers: int = 1) -> SweepResult:
    """Mean ledger totals over an ``l`` grid at ``fixed_m`` and an ``m`` grid at ``fixed_l``.

    Instances are single-detour parallel paths with ``L = m - l`` so the
    edge count is exactly ``m``; A2 runs in parallel mode so both ledger
    metrics are meaningful.  The footer reports raw and log-normalised slopes.
    """
    if family != "parallel-detour":
        raise ValueError("scaling sweeps are defined on the parallel-detour family")
    if not l_values or not m_values:
        raise ValueError("sweep grids must be nonempty")
    if algorithm not in ("a1", "a2"):
        raise ValueError("sweeps run a1 or a2")
    grid = [("l", int(l), int(fixed_m)) for l in l_values] + [("m", int(fixed_l), int(m)) for m in m_values]
    rows = []
    for sweep, l, m in grid:
        spec = InstanceSpec.make("parallel-detour", 0, l=l, L=m - l, copies=1)
        inst = generate(spec)
        params = A1Params(l) if algorithm == "a1" else A2Params(l, min(inst.report.max_alpha, 1.0))
        start = time.perf_counter()
        summary = run_trials(inst, algorithm, params, trials, base_seed, mode,
                             parallel=True, workers=workers)
        rows.append({
            "sweep": sweep, "l": l, "m": m,
            "mean_total_steps": summary.mean_steps,
            "mean_parallel_depth": summary.mean_depth,
            "success_rate": summary.success_rate,
            "norm_total_steps": summary.mean_steps / log_factor(algorithm, "total_steps", l, m),
            "norm_parallel_depth": summary.mean_depth / log_factor(algorithm, "parallel_depth", l, m),
            "wall_time": time.perf_counter() - start,
        })
    slopes = {}
    for sweep in ("l", "m"):
        part = [r for r in rows if r["sweep"] == sweep]
        if len(part) < 2:
            continue
        x = [r[sweep] for r in part]
        for metric in ("total_steps", "parallel_depth"):
            slopes[f"{metric} vs {sweep}"] = fit_slope(x, [r[f"mean_{metric}"] for r in part])
            slopes[f"norm_{metric} vs {sweep}"] = fit_slope(x, [r[f"norm_{metric}"] for r in part])
    return SweepResult(algorithm, rows, slopes)


def strip_wall_time(text: str) -> str:
    """Drop the ``wall_time`` column from a CSV document (comment lines are kept)."""
    out = []
    col = None
    for line in text.splitlines():
        if line.startswith("#"):
            out.append(line)
            continue
        cells = next(csv.reader([line]))
        if col is None:
            col = cells.index("wall_time") if "wall_time" in cells else -1
        if col >= 0:
            del cells[col]
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def bench_pipeline(out_dir: str | os.PathLike, trials: int = 20, sweep_trials: int = 10,
                   base_seed: int = 0, workers: int = 1) -> list[Path]:
    """Trials of a1 and a2 over the algorithm corpus plus both scaling sweeps, written as CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    corpus = algorithm_corpus()
    for algorithm in ("a1", "a2"):
        parts = []
        for inst in corpus:
            summary = run_trials(inst, algorithm, None, trials, base_seed, "noisy", workers=workers)
            parts.append(summary.to_csv() if not parts else summary.to_csv().split("\n", 1)[1])
        path = out / f"trials_{algorithm}.csv"
        path.write_text("".join(parts))
        written.append(path)
    for algorithm in ("a1", "a2"):
        sweep = scaling_sweep(algorithm=algorithm, trials=sweep_trials, base_seed=base_seed,
                              workers=workers)
        path = out / f"sweep_{algorithm}.csv"
        path.write_text(sweep.to_csv())
        written.append(path)
    return written


# -- corpus files -------------------------------------------------------------


def manifest_text(inst: Instance) -> str:
    spec = inst.spec
    rep = inst.report
    lines = [
        f"family: {spec.family}",
        f"seed: {spec.seed}",
        *(f"param.{k}: {v}" for k, v in spec.params),
        f"n: {inst.graph.n}",
        f"m: {inst.graph.m}",
        f"s: {inst.graph.labels[inst.s]}",
        f"t: {inst.graph.labels[inst.t]}",
        f"label: {inst.label}",
        f"max_alpha: {rep.max_alpha!r}",
        f"unique_shortest: {rep.unique_shortest}",
        f"path_resistance: {rep.path_resistance!r}",
        "path: " + " ".join(str(inst.graph.labels[v]) for v in rep.shortest_path.vertices),
    ]
    return "\n".join(lines) + "\n"


def parse_manifest(text: str) -> dict[str, str]:
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        if not sep:
            raise ValueError(f"malformed manifest line {line!r}")
        out[key.strip()] = value.strip()
    return out


def write_instance(inst: Instance, directory: str | os.PathLike, stem: str) -> Path:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    (d / f"{stem}.edges").write_text(to_edge_list(inst.graph))
    (d / f"{stem}.manifest").write_text(manifest_text(inst))
    return d / f"{stem}.manifest"


@dataclass
class CorpusEntry:
    name: str
    graph: Graph
    s: int
    t: int
    manifest: dict[str, str]


def read_corpus(directory: str | os.PathLike) -> list[CorpusEntry]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"corpus directory {d} does not exist")
    entries = []
    for manifest in sorted(d.glob("*.manifest")):
        info = parse_manifest(manifest.read_text())
        g = from_edge_list(manifest.with_suffix(".edges").read_text())
        entries.append(CorpusEntry(manifest.stem, g, g.index_of(int(info["s"])),
                                   g.index_of(int(info["t"])), info))
    return entries


def write_corpus(directory: str | os.PathLike, kind: str = "lemma", size: int = 200,
                 seed: int = 0, controls: bool = True) -> int:
    """Write the lemma (or algorithm) corpus, plus the 4-cycle control when ``controls``."""
    instances = lemma_corpus(size, seed) if kind == "lemma" else algorithm_corpus()
    if controls:
        instances.append(generate(InstanceSpec.make("parallel-detour", 0, l=2, L=2, copies=1)))
    for i, inst in enumerate(instances):
        write_instance(inst, directory, f"{kind}_{i:04d}")
    return len(instances)


# -- lemma suite -----------------------------------------------------------------

LEMMAS = ("flow_half", "sampling_bounds", "flow_dominance", "subgraph_probability",
          "resistance_decomposition", "rg_half_rp")


@dataclass
class SuiteReport:
    instances: int = 0
    controls: int = 0
    label_mismatches: list[str] = field(default_factory=list)
    passed: dict[str, int] = field(default_factory=lambda: dict.fromkeys(LEMMAS, 0))
    failed: dict[str, list[str]] = field(default_factory=lambda: {k: [] for k in LEMMAS})
    worst: dict[str, float] = field(default_factory=lambda: dict.fromkeys(LEMMAS, math.inf))

    @property
    def ok(self) -> bool:
        return not self.label_mismatches and not any(self.failed.values())

    def record(self, lemma: str, name: str, slack: float, ok: bool) -> None:
        self.worst[lemma] = min(self.worst[lemma], slack)
        if ok:
            self.passed[lemma] += 1
        else:
            self.failed[lemma].append(name)

    def to_text(self) -> str:
        lines = [f"instances: {self.instances}", f"controls: {self.controls}",
                 f"label_mismatches: {len(self.label_mismatches)}"]
        lines += [f"mismatch: {name}" for name in self.label_mismatches]
        for lemma in LEMMAS:
            worst = self.worst[lemma]
            lines.append(f"{lemma}: passed={self.passed[lemma]} failed={len(self.failed[lemma])} "
                         f"worst_slack={worst:.6g}")
            lines += [f"  failure: {name}" for name in self.failed[lemma]]
        lines.append(f"status: {'pass' if self.ok else 'fail'}")
        return "\n".join(lines) + "\n"


def _random_connecting_subset(g: Graph, s: int, t: int, rng: np.random.Generator) -> list[int]:
    ids = g.edge_ids()
    keep = set(int(e) for e in ids[rng.random(len(ids)) < rng.uniform(0.2, 0.9)])
    # splice in a random s-t path so the subset always connects s and t
    jitter = Graph(g.n, [(u, v, w * rng.uniform(0.2, 5.0)) for _, u, v, w in g.edges()])
    keep.update(dijkstra(jitter, s, t).edges)
    return sorted(keep)


def verify_instance(report: SuiteReport, name: str, g: Graph, s: int, t: int,
                    rng: np.random.Generator, subsets: int = 5) -> None:
    """Run every lemma check on one instance already known to satisfy the condition."""
    half = verify_flow_half(g, s, t)
    report.record("flow_half", name, half - 0.5, half >= 0.5 + SLACK)
    per_edge, total = verify_sampling_bounds(g, s, t)
    slack = min(float(per_edge.min()), total)
    report.record("sampling_bounds", name, slack, slack >= SLACK)
    dom = verify_flow_dominance(g, s, t)
    report.record("flow_dominance", name, 0.0 if dom else -1.0, dom)
    worst = math.inf
    for _ in range(subsets):
        worst = min(worst, verify_subgraph_probability(g, _random_connecting_subset(g, s, t, rng), s, t))
    report.record("subgraph_probability", name, worst, worst >= SLACK)
    slack, qs = verify_resistance_decomposition(g, s, t)
    q_slack = min(q - 1.0 for q in qs) if qs else math.inf
    both = min(slack, q_slack)
    report.record("resistance_decomposition", name, both, both >= SLACK)
    half_rp = verify_rg_half_rp(g, s, t)
    report.record("rg_half_rp", name, half_rp, half_rp >= SLACK)


def verify_suite(corpus: str | os.PathLike | None = None, seed: int = 0) -> SuiteReport:
    """Checker verdicts and lemma checks over every instance of a corpus directory.

    Instances whose checker verdict fails are counted as controls and their
    lemma checks are skipped; a verdict that disagrees with the manifest
    label is reported as a mismatch.
    """
    directory = corpus if corpus is not None else os.environ.get(CORPUS_ENV)
    if directory is None:
        raise FileNotFoundError(f"no corpus directory given and {CORPUS_ENV} is unset")
    rng = np.random.default_rng(seed)
    report = SuiteReport()
    for entry in read_corpus(directory):
        report.instances += 1
        try:
            verdict = check_condition_edges(entry.graph, entry.s, entry.t)
        except DisconnectedError:
            report.label_mismatches.append(entry.name)
            continue
        label = entry.manifest.get("label")
        if label is not None and label != ("holds" if verdict.holds_condition1 else "fails"):
            report.label_mismatches.append(entry.name)
        if not verdict.holds_condition1:
            report.controls += 1
            continue
        verify_instance(report, entry.name, entry.graph, entry.s, entry.t, rng)
    return report
