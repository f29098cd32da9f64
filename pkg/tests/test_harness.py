"""Experiment sweeps: determinism, mode contracts, aggregates, diagnostics."""

import json

import numpy as np
import pytest

import mixkernel.harness as harness
from mixkernel import (
    CvConfig,
    ExperimentPlan,
    InsufficientDataError,
    ScenarioConfig,
    rate_diagnostics,
    run_experiment,
)
from mixkernel.harness import (
    ExperimentReport,
    ReplicationRow,
    aggregate_report,
    plan_from_dict,
    plan_to_dict,
    read_report,
)


def tiny_plan(tmp_path=None, **overrides) -> ExperimentPlan:
    fields = dict(
        scenario=ScenarioConfig.preset(
            "minimal", n=12, seed=0, grid_length=24, test_size=5
        ),
        sample_sizes=(12, 16),
        replications=2,
        modes=("free", "equal", "oracle"),
        base_seed=77,
        parallelism=1,
        output_dir=None if tmp_path is None else str(tmp_path),
        cv=CvConfig(starts=2, max_evals=60),
    )
    fields.update(overrides)
    return ExperimentPlan(**fields)


def test_plan_validation():
    with pytest.raises(ValueError):
        tiny_plan(sample_sizes=())
    with pytest.raises(ValueError):
        tiny_plan(sample_sizes=(20, 10))
    with pytest.raises(ValueError):
        tiny_plan(modes=("free", "free"))
    with pytest.raises(ValueError):
        tiny_plan(modes=("turbo",))
    with pytest.raises(ValueError):
        tiny_plan(replications=0)


def test_single_replication_equal_mode_contract():
    plan = tiny_plan(
        sample_sizes=(30,), replications=1, modes=("equal",), base_seed=3
    )
    report = run_experiment(plan)
    assert len(report.rows) == 1
    row = report.rows[0]
    assert (row.n, row.mode, row.replication) == (30, "equal", 0)
    assert np.allclose(row.normalized_weights, 1.0 / plan.scenario.p, atol=1e-12)


def test_run_experiment_row_layout_and_mode_contracts(tmp_path):
    report = run_experiment(tiny_plan(tmp_path))
    plan = report.plan
    assert len(report.rows) == 2 * 2 * 3
    assert not report.failures
    p = plan.scenario.p
    for row in report.rows:
        assert row.test_mse >= 0.0
        assert row.normalized_weights.sum() == pytest.approx(1.0, abs=1e-12)
        if row.mode == "equal":
            assert np.ptp(row.weights) == 0.0
            if not row.norm_uniform:
                assert np.allclose(row.normalized_weights, 1.0 / p)
        if row.mode == "oracle":
            noise = ~plan.scenario.relevant_mask()
            assert np.all(row.weights[noise] == 0.0)


def test_run_experiment_writes_deterministic_csvs(tmp_path, monkeypatch):
    # identical plan (same relative output dir) run twice from two cwds
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    plan = tiny_plan("out")
    monkeypatch.chdir(tmp_path / "a")
    run_experiment(plan)
    monkeypatch.chdir(tmp_path / "b")
    run_experiment(plan)
    for name in (harness.ROWS_FILE, harness.AGGREGATE_FILE, harness.PLAN_FILE):
        assert (tmp_path / "a" / "out" / name).read_bytes() == (
            tmp_path / "b" / "out" / name
        ).read_bytes()


def test_run_experiment_independent_of_worker_count(tmp_path, monkeypatch):
    (tmp_path / "serial").mkdir()
    (tmp_path / "parallel").mkdir()
    plan = tiny_plan("out")
    monkeypatch.chdir(tmp_path / "serial")
    run_experiment(plan, threads=1)
    monkeypatch.chdir(tmp_path / "parallel")
    run_experiment(plan, threads=2)
    for name in (harness.ROWS_FILE, harness.AGGREGATE_FILE, harness.PLAN_FILE):
        assert (tmp_path / "serial" / "out" / name).read_bytes() == (
            tmp_path / "parallel" / "out" / name
        ).read_bytes()


def test_aggregates_recomputable_from_rows(tmp_path):
    report = run_experiment(tiny_plan(tmp_path))
    rebuilt = read_report(str(tmp_path))
    assert aggregate_report(rebuilt) == aggregate_report(report)
    # spot check one aggregate against a direct recomputation
    agg = aggregate_report(report)[0]
    rows = report.rows_for(agg["n"], agg["mode"])
    assert agg["test_mse_mean"] == pytest.approx(
        float(np.mean([r.test_mse for r in rows])), rel=1e-15
    )


def test_failures_recorded_but_not_fatal_below_threshold(monkeypatch, tmp_path):
    plan = tiny_plan(replications=12, sample_sizes=(12,), modes=("equal",))
    real = harness._run_replication

    def sometimes_failing(plan_, n, rep):
        if rep == 3:
            raise RuntimeError("synthetic failure")
        return real(plan_, n, rep)

    monkeypatch.setattr(harness, "_run_replication", sometimes_failing)
    report = run_experiment(plan)
    assert len(report.failures) == 1
    assert report.failures[0].replication == 3
    assert "synthetic failure" in report.failures[0].message
    assert len(report.rows) == 11


def test_failures_fatal_above_threshold(monkeypatch):
    plan = tiny_plan(replications=4, sample_sizes=(12,), modes=("equal",))

    def always_failing(plan_, n, rep):
        raise RuntimeError("boom")

    monkeypatch.setattr(harness, "_run_replication", always_failing)
    with pytest.raises(RuntimeError, match="replications failed"):
        run_experiment(plan)


def test_plan_json_roundtrip():
    plan = tiny_plan()
    payload = plan_to_dict(plan)
    rebuilt = plan_from_dict(json.loads(json.dumps(payload)))
    assert plan_to_dict(rebuilt) == payload


def test_plan_from_dict_preset_and_unknown_key():
    payload = {
        "preset": "minimal",
        "scenario": {"grid_length": 30, "test_size": 4},
        "sample_sizes": [10, 20],
        "replications": 1,
    }
    plan = plan_from_dict(payload)
    assert plan.scenario.p_fun == 2
    assert plan.scenario.grid_length == 30
    with pytest.raises(ValueError):
        plan_from_dict({**payload, "cv": {"bogus": 1}})


def synthetic_report(median_map, sizes=(100, 200, 400), reps=5):
    """Free-mode rows whose per-n weight medians equal the given values."""
    scenario = ScenarioConfig.preset("minimal", n=sizes[0], grid_length=20, test_size=2)
    plan = ExperimentPlan(
        scenario=scenario,
        sample_sizes=tuple(sizes),
        replications=reps,
        modes=("free",),
        base_seed=0,
    )
    rows = []
    p = scenario.p
    for n in sizes:
        for rep in range(reps):
            weights = np.array([median_map[j][sizes.index(n)] for j in range(p)])
            total = weights.sum()
            rows.append(
                ReplicationRow(
                    n=n,
                    mode="free",
                    replication=rep,
                    test_mse=1.0,
                    test_mse_noisy=2.0,
                    q_value=1.0,
                    evaluations=10,
                    fallback_count=0,
                    weights=weights,
                    normalized_weights=(
                        weights / total if total > 0 else np.full(p, 1.0 / p)
                    ),
                    norm_uniform=total == 0,
                    wall_time=0.0,
                )
            )
    return ExperimentReport(plan=plan, rows=rows, failures=[])


def test_rate_diagnostics_flat_series_has_zero_slope():
    report = synthetic_report({0: (2, 2, 2), 1: (0, 0, 0), 2: (1, 1, 1), 3: (0, 0, 0)})
    out = rate_diagnostics(report)
    assert [c["slope"] for c in out["covariates"]] == [0.0, 0.0, 0.0, 0.0]
    assert not out["covariates"][0]["median_weight_increasing"]


def test_rate_diagnostics_exact_loglog_slope():
    report = synthetic_report({0: (1, 2, 4), 1: (1, 1, 1), 2: (1, 1, 1), 3: (1, 1, 1)})
    out = rate_diagnostics(report)
    assert out["covariates"][0]["slope"] == pytest.approx(1.0, rel=1e-12)
    assert out["covariates"][0]["median_weight_increasing"]
    assert out["covariates"][0]["relevant"]
    assert not out["covariates"][1]["relevant"]


def test_rate_diagnostics_zero_touching_series_has_no_slope():
    report = synthetic_report({0: (0, 1, 2), 1: (0, 0, 0), 2: (1, 1, 1), 3: (0, 0, 0)})
    out = rate_diagnostics(report)
    assert out["covariates"][0]["slope"] is None


def test_rate_diagnostics_needs_three_sizes():
    report = synthetic_report(
        {0: (1, 2), 1: (1, 1), 2: (1, 1), 3: (1, 1)}, sizes=(100, 200)
    )
    with pytest.raises(InsufficientDataError):
        rate_diagnostics(report)


def test_rate_diagnostics_needs_free_mode(tmp_path):
    report = run_experiment(
        tiny_plan(sample_sizes=(12, 16, 20), replications=1, modes=("equal",))
    )
    with pytest.raises(InsufficientDataError):
        rate_diagnostics(report)


def test_timings_sidecar_written_but_excluded_from_determinism(tmp_path):
    out = tmp_path / "t"
    report = run_experiment(tiny_plan(out))
    payload = json.loads((out / harness.TIMINGS_FILE).read_text())
    assert len(payload["rows"]) == len(report.rows)
    assert payload["total_seconds"] >= 0.0
