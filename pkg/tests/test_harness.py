import csv
import io
import math

import numpy as np
import pytest

from flowpath.generators import InstanceSpec, generate
from flowpath.harness import (BENCH_COLUMNS, LEMMAS, SWEEP_COLUMNS, BenchRecord, InvariantViolation,
                              SuiteReport, fit_slope, log_factor, manifest_text, parse_manifest,
                              read_corpus, run_trials, scaling_sweep, strip_wall_time,
                              verify_instance, verify_suite, write_corpus, write_instance)
from flowpath.graph import to_edge_list
from oracles import triangle

DETOUR = InstanceSpec.make("parallel-detour", 0, l=3, L=8, copies=1)


def test_trials_must_be_positive():
    with pytest.raises(ValueError):
        run_trials(DETOUR, "a2", trials=0)
    with pytest.raises(ValueError):
        run_trials(DETOUR, "bfs", trials=1)


def test_exact_a2_always_succeeds():
    summary = run_trials(InstanceSpec.make("path", 0, l=1), "a2", trials=10, mode="exact")
    assert summary.success_rate == 1.0
    summary = run_trials(DETOUR, "a2", trials=10, mode="exact")
    assert summary.success_rate == 1.0 and [r.seed for r in summary.records] == list(range(10))


def test_dijkstra_baseline_costs_nothing():
    summary = run_trials(DETOUR, "dijkstra", trials=2)
    assert summary.success_rate == 1.0 and summary.mean_steps == 0


def test_trial_csv_schema():
    text = run_trials(DETOUR, "a1", trials=3).to_csv()
    rows = [line for line in text.splitlines() if not line.startswith("#")]
    assert tuple(rows[0].split(",")) == BENCH_COLUMNS
    assert len(rows) == 4
    assert "# success_rate: " in text


def test_workers_preserve_order():
    one = run_trials(DETOUR, "a2", trials=6, base_seed=5)
    two = run_trials(DETOUR, "a2", trials=6, base_seed=5, workers=2)
    assert strip_wall_time(one.to_csv()) == strip_wall_time(two.to_csv())


def test_invariant_guard():
    with pytest.raises(InvariantViolation):
        BenchRecord("x", "a2", "noisy", 0, True, 5, 6, 0.0)


def test_strip_wall_time():
    text = "a,wall_time,b\n1,0.25,2\n# slope x: 1\n"
    assert strip_wall_time(text) == "a,b\n1,2\n# slope x: 1\n"
    assert strip_wall_time("a,b\n1,2\n") == "a,b\n1,2\n"


def test_fit_slope_recovers_power():
    x = np.array([2.0, 4.0, 8.0, 16.0])
    assert fit_slope(x, 3 * x ** 1.5) == pytest.approx(1.5, rel=1e-12)


def test_log_factor_positive():
    for alg, metric in [("a1", "total_steps"), ("a2", "total_steps"), ("a2", "parallel_depth")]:
        assert log_factor(alg, metric, 8, 256) > 0
    assert log_factor("a1", "total_steps", 4, 64) == pytest.approx(math.log(6))


def test_small_sweep_schema():
    result = scaling_sweep(l_values=(4, 8), m_values=(32, 64), trials=2, fixed_m=64, fixed_l=4)
    reader = csv.reader(io.StringIO(result.to_csv()))
    header = next(reader)
    assert tuple(header) == SWEEP_COLUMNS
    assert len(result.rows) == 4 and {r["sweep"] for r in result.rows} == {"l", "m"}
    assert set(result.slopes) == {f"{p}{metric} vs {v}" for p in ("", "norm_")
                                  for metric in ("total_steps", "parallel_depth") for v in "lm"}
    with pytest.raises(ValueError):
        scaling_sweep(family="cactus-odd")
    with pytest.raises(ValueError):
        scaling_sweep(l_values=())


def test_manifest_round_trip(tmp_path):
    inst = generate(InstanceSpec.make("figure1", 3, g1=20, g2=4, g3=3))
    write_instance(inst, tmp_path, "fig")
    [entry] = read_corpus(tmp_path)
    assert entry.name == "fig"
    assert to_edge_list(entry.graph) == to_edge_list(inst.graph)
    assert (entry.s, entry.t) == (inst.s, inst.t)
    assert entry.manifest == parse_manifest(manifest_text(inst))
    assert entry.manifest["label"] == "holds" and entry.manifest["param.g1"] == "20"
    with pytest.raises(ValueError):
        parse_manifest("no colon here")


def test_corpus_and_suite(tmp_path):
    count = write_corpus(tmp_path, size=12, seed=3)
    assert count == 13
    report = verify_suite(tmp_path)
    assert report.ok and report.instances == 13 and report.controls == 1
    assert all(report.passed[lemma] == 12 for lemma in LEMMAS)
    assert "status: pass" in report.to_text()


def test_suite_flags_label_mismatch(tmp_path):
    write_corpus(tmp_path, size=2, seed=0, controls=False)
    path = sorted(tmp_path.glob("*.manifest"))[0]
    path.write_text(path.read_text().replace("label: holds", "label: fails"))
    report = verify_suite(tmp_path)
    assert not report.ok and report.label_mismatches == [path.stem]


def test_empty_corpus(tmp_path):
    report = verify_suite(tmp_path)
    assert report.ok and report.instances == 0


def test_missing_corpus(tmp_path, monkeypatch):
    with pytest.raises(FileNotFoundError):
        verify_suite(tmp_path / "nope")
    monkeypatch.delenv("FLOWPATH_CORPUS", raising=False)
    with pytest.raises(FileNotFoundError):
        verify_suite()


def test_verify_instance_triangle():
    report = SuiteReport()
    verify_instance(report, "triangle", triangle(), 0, 2, np.random.default_rng(0))
    assert report.ok
    assert report.worst["rg_half_rp"] == pytest.approx(1 / 6)
    assert report.worst["flow_half"] == pytest.approx(2 / 3 - 1 / 2)
