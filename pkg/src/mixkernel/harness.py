"""Replication sweeps over simulation scenarios with CSV reports.

An experiment plan fixes a scenario, a list of sample sizes, a replication
count, the weight-selection modes to compare and a base seed. Every
replication derives its own seed stream from (base seed, n, replication), so
reports are bit-for-bit reproducible and independent of how many workers run
them. Per-replication wall times are written to a separate timings sidecar
because they are the one quantity that legitimately varies between runs.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .estimator import pairwise_distances, predict_regression_block
from .exceptions import InsufficientDataError
from .kernels import KernelSpec
from .selection import MODES, CvConfig, minimize_weights
from .simdata import ScenarioConfig, derive_seed, draw_scenario

ROWS_FILE = "rows.csv"
AGGREGATE_FILE = "aggregate.csv"
PLAN_FILE = "plan.json"
TIMINGS_FILE = "timings.json"


@dataclass(frozen=True)
class ExperimentPlan:
    """Sweep description. scenario.n is a placeholder; the sweep overrides it."""

    scenario: ScenarioConfig
    sample_sizes: tuple[int, ...]
    replications: int
    modes: tuple[str, ...] = ("free",)
    base_seed: int = 0
    parallelism: int = 1
    output_dir: str | None = None
    cv: CvConfig = field(default_factory=CvConfig)

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.sample_sizes)
        if not sizes:
            raise ValueError("sample_sizes must be nonempty")
        if any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sample_sizes must be strictly increasing")
        object.__setattr__(self, "sample_sizes", sizes)
        modes = tuple(self.modes)
        if not modes or any(m not in MODES for m in modes):
            raise ValueError(f"modes must be a nonempty subset of {MODES}")
        if len(set(modes)) != len(modes):
            raise ValueError("modes must not repeat")
        object.__setattr__(self, "modes", modes)
        if self.replications < 1:
            raise ValueError("replications must be at least 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be at least 1")


@dataclass(frozen=True)
class ReplicationRow:
    """Result of fitting one mode on one replication."""

    n: int
    mode: str
    replication: int
    test_mse: float
    test_mse_noisy: float
    q_value: float
    evaluations: int
    fallback_count: int
    weights: np.ndarray
    normalized_weights: np.ndarray
    norm_uniform: bool
    wall_time: float


@dataclass(frozen=True)
class FailureRecord:
    n: int
    replication: int
    message: str


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    rows: list[ReplicationRow]
    failures: list[FailureRecord]

    def rows_for(self, n: int | None = None, mode: str | None = None):
        out = self.rows
        if n is not None:
            out = [r for r in out if r.n == n]
        if mode is not None:
            out = [r for r in out if r.mode == mode]
        return out


def _run_replication(plan: ExperimentPlan, n: int, rep: int) -> list[ReplicationRow]:
    seed = derive_seed(plan.base_seed, n, rep)
    scenario = replace(plan.scenario, n=n, seed=seed)
    draw = draw_scenario(scenario)
    cross = pairwise_distances(draw.test.covariates, draw.dataset.covariates)
    train_dists = pairwise_distances(draw.dataset.covariates)
    oracle = tuple(int(j) for j in np.flatnonzero(draw.relevant_mask))
    rows = []
    for mode in plan.modes:
        cv = replace(
            plan.cv,
            mode=mode,
            oracle_indices=oracle if mode == "oracle" else plan.cv.oracle_indices,
        )
        started = time.perf_counter()
        fit = minimize_weights(draw.dataset, cv, distances=train_dists)
        wall = time.perf_counter() - started
        preds, _ = predict_regression_block(
            draw.dataset, fit.weights, draw.test.covariates, cv.kernel, cross
        )
        total = float(np.sum(fit.weights.omega))
        rows.append(
            ReplicationRow(
                n=n,
                mode=mode,
                replication=rep,
                test_mse=float(np.mean((preds - draw.test_truth) ** 2)),
                test_mse_noisy=float(np.mean((preds - draw.test.y) ** 2)),
                q_value=fit.q_value,
                evaluations=fit.evaluations,
                fallback_count=fit.fallback_count,
                weights=fit.weights.omega,
                normalized_weights=fit.weights.normalized(),
                norm_uniform=total == 0.0,
                wall_time=wall,
            )
        )
    return rows


def _run_replication_safe(args):
    plan, n, rep = args
    try:
        return (n, rep, _run_replication(plan, n, rep), None)
    except Exception as exc:  # recorded, fatal only in bulk
        return (n, rep, None, f"{type(exc).__name__}: {exc}")


def run_experiment(
    plan: ExperimentPlan, threads: int | None = None
) -> ExperimentReport:
    """Run the sweep and, when the plan names an output directory, write the
    row CSV, aggregate CSV, plan echo and timing sidecar there.

    threads overrides plan.parallelism at run time without touching the
    written plan echo, so outputs stay identical across worker counts.
    """
    workers = plan.parallelism if threads is None else max(1, int(threads))
    tasks = [(plan, n, rep) for n in plan.sample_sizes for rep in range(plan.replications)]

    if workers == 1 or len(tasks) == 1:
        outcomes = [_run_replication_safe(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_replication_safe, tasks))

    rows: list[ReplicationRow] = []
    failures: list[FailureRecord] = []
    for n, rep, result, error in outcomes:
        if error is None:
            rows.extend(result)
        else:
            failures.append(FailureRecord(n=n, replication=rep, message=error))
    if failures and len(failures) > 0.1 * len(tasks):
        details = "; ".join(
            f"n={f.n} rep={f.replication}: {f.message}" for f in failures[:5]
        )
        raise RuntimeError(
            f"{len(failures)} of {len(tasks)} replications failed: {details}"
        )

    report = ExperimentReport(plan=plan, rows=rows, failures=failures)
    if plan.output_dir is not None:
        write_report(report, plan.output_dir)
    return report


def aggregate_report(report: ExperimentReport) -> list[dict]:
    """Per (n, mode) summary rows recomputable from the replication rows."""
    p = report.plan.scenario.p
    out = []
    for n in report.plan.sample_sizes:
        for mode in report.plan.modes:
            rows = report.rows_for(n, mode)
            if not rows:
                continue
            mse = np.array([r.test_mse for r in rows])
            mse_noisy = np.array([r.test_mse_noisy for r in rows])
            weights = np.vstack([r.weights for r in rows])
            norm = np.vstack([r.normalized_weights for r in rows])
            agg = {
                "n": n,
                "mode": mode,
                "replications": len(rows),
                "test_mse_mean": float(np.mean(mse)),
                "test_mse_median": float(np.median(mse)),
                "test_mse_q10": float(np.quantile(mse, 0.1)),
                "test_mse_q90": float(np.quantile(mse, 0.9)),
                "test_mse_noisy_mean": float(np.mean(mse_noisy)),
            }
            for j in range(p):
                agg[f"weight_median_{j + 1}"] = float(np.median(weights[:, j]))
            for j in range(p):
                agg[f"norm_weight_mean_{j + 1}"] = float(np.mean(norm[:, j]))
            out.append(agg)
    return out


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_report(report: ExperimentReport, directory: str) -> None:
    os.makedirs(directory, exist_ok=True)
    p = report.plan.scenario.p
    header = [
        "n",
        "mode",
        "replication",
        "test_mse",
        "test_mse_noisy",
        "q_value",
        "evaluations",
        "fallback_count",
        "norm_uniform",
    ]
    header += [f"weight_{j + 1}" for j in range(p)]
    header += [f"norm_weight_{j + 1}" for j in range(p)]
    with open(os.path.join(directory, ROWS_FILE), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in report.rows:
            record = [
                r.n,
                r.mode,
                r.replication,
                _fmt(r.test_mse),
                _fmt(r.test_mse_noisy),
                _fmt(r.q_value),
                r.evaluations,
                r.fallback_count,
                int(r.norm_uniform),
            ]
            record += [_fmt(v) for v in r.weights]
            record += [_fmt(v) for v in r.normalized_weights]
            writer.writerow(record)

    aggregates = aggregate_report(report)
    if aggregates:
        with open(os.path.join(directory, AGGREGATE_FILE), "w", newline="") as fh:
            writer = csv.writer(fh)
            keys = list(aggregates[0].keys())
            writer.writerow(keys)
            for agg in aggregates:
                writer.writerow(
                    [agg[k] if isinstance(agg[k], (str, int)) else _fmt(agg[k]) for k in keys]
                )

    with open(os.path.join(directory, PLAN_FILE), "w") as fh:
        json.dump(plan_to_dict(report.plan), fh, indent=2, sort_keys=True)
        fh.write("\n")

    timings = {
        "rows": [
            {"n": r.n, "mode": r.mode, "replication": r.replication, "seconds": r.wall_time}
            for r in report.rows
        ],
        "total_seconds": float(sum(r.wall_time for r in report.rows)),
    }
    with open(os.path.join(directory, TIMINGS_FILE), "w") as fh:
        json.dump(timings, fh, indent=2)
        fh.write("\n")


def read_report(directory: str) -> ExperimentReport:
    """Rebuild a report (without wall times) from a written output directory."""
    with open(os.path.join(directory, PLAN_FILE)) as fh:
        plan = plan_from_dict(json.load(fh))
    rows = []
    with open(os.path.join(directory, ROWS_FILE), newline="") as fh:
        reader = csv.DictReader(fh)
        p = plan.scenario.p
        for rec in reader:
            rows.append(
                ReplicationRow(
                    n=int(rec["n"]),
                    mode=rec["mode"],
                    replication=int(rec["replication"]),
                    test_mse=float(rec["test_mse"]),
                    test_mse_noisy=float(rec["test_mse_noisy"]),
                    q_value=float(rec["q_value"]),
                    evaluations=int(rec["evaluations"]),
                    fallback_count=int(rec["fallback_count"]),
                    weights=np.array(
                        [float(rec[f"weight_{j + 1}"]) for j in range(p)]
                    ),
                    normalized_weights=np.array(
                        [float(rec[f"norm_weight_{j + 1}"]) for j in range(p)]
                    ),
                    norm_uniform=rec["norm_uniform"] == "1",
                    wall_time=0.0,
                )
            )
    return ExperimentReport(plan=plan, rows=rows, failures=[])


def plan_to_dict(plan: ExperimentPlan) -> dict:
    base = plan.cv.kernel.categorical_base
    return {
        "scenario": {
            "p_fun": plan.scenario.p_fun,
            "q_fun": plan.scenario.q_fun,
            "p_cat": plan.scenario.p_cat,
            "q_cat": plan.scenario.q_cat,
            "grid_length": plan.scenario.grid_length,
            "test_size": plan.scenario.test_size,
        },
        "sample_sizes": list(plan.sample_sizes),
        "replications": plan.replications,
        "modes": list(plan.modes),
        "base_seed": plan.base_seed,
        "parallelism": plan.parallelism,
        "output_dir": plan.output_dir,
        "cv": {
            "kernel": plan.cv.kernel.functional_kernel,
            "categorical_base": (
                float(base) if isinstance(base, (int, float)) else list(base)
            ),
            "starts": plan.cv.starts,
            "max_evals": plan.cv.max_evals,
            "rel_tol": plan.cv.rel_tol,
            "weight_cap": plan.cv.weight_cap,
        },
    }


def plan_from_dict(payload: dict) -> ExperimentPlan:
    """Build a plan from a JSON payload, resolving an optional scenario preset."""
    scenario_fields = dict(payload.get("scenario", {}))
    preset = payload.get("preset")
    if preset is not None:
        from .simdata import PRESETS

        if preset not in PRESETS:
            raise ValueError(f"unknown preset {preset!r}")
        merged = dict(PRESETS[preset])
        merged.update(scenario_fields)
        scenario_fields = merged
    sample_sizes = tuple(int(n) for n in payload["sample_sizes"])
    scenario = ScenarioConfig(n=sample_sizes[0], seed=0, **scenario_fields)
    cv_fields = dict(payload.get("cv", {}))
    kernel = KernelSpec(
        functional_kernel=cv_fields.pop("kernel", "picard"),
        categorical_base=_base_from_json(cv_fields.pop("categorical_base", np.e)),
    )
    max_evals = cv_fields.pop("max_evals", None)
    cv = CvConfig(
        kernel=kernel,
        starts=int(cv_fields.pop("starts", 3)),
        max_evals=None if max_evals is None else int(max_evals),
        rel_tol=float(cv_fields.pop("rel_tol", 1e-6)),
        weight_cap=float(cv_fields.pop("weight_cap", 1e6)),
    )
    if cv_fields:
        raise ValueError(f"unknown cv settings: {sorted(cv_fields)}")
    return ExperimentPlan(
        scenario=scenario,
        sample_sizes=sample_sizes,
        replications=int(payload["replications"]),
        modes=tuple(payload.get("modes", ["free"])),
        base_seed=int(payload.get("base_seed", 0)),
        parallelism=int(payload.get("parallelism", 1)),
        output_dir=payload.get("output_dir"),
        cv=cv,
    )


def _base_from_json(base):
    return float(base) if isinstance(base, (int, float)) else tuple(base)


def rate_diagnostics(report: ExperimentReport) -> dict:
    """Per-covariate growth summary of the selected weights across n.

    For every covariate: the median fitted weight and median normalized
    weight at each sample size (free mode only), the least-squares slope of
    log median weight against log n, and monotonicity verdicts. The slope is
    0 for a flat series and None when a non-flat series touches zero.
    """
    sizes = [n for n in report.plan.sample_sizes if report.rows_for(n, "free")]
    if len(sizes) < 3:
        raise InsufficientDataError(
            "rate diagnostics need free-mode rows for at least 3 sample sizes"
        )
    p = report.plan.scenario.p
    mask = report.plan.scenario.relevant_mask()
    med_w = np.empty((len(sizes), p))
    med_norm = np.empty((len(sizes), p))
    for i, n in enumerate(sizes):
        rows = report.rows_for(n, "free")
        med_w[i] = np.median(np.vstack([r.weights for r in rows]), axis=0)
        med_norm[i] = np.median(
            np.vstack([r.normalized_weights for r in rows]), axis=0
        )
    log_n = np.log(np.asarray(sizes, dtype=float))
    covariates = []
    for j in range(p):
        series = med_w[:, j]
        if np.all(series == series[0]):
            slope = 0.0
        elif np.any(series <= 0.0):
            slope = None
        else:
            slope = float(np.polyfit(log_n, np.log(series), 1)[0])
        covariates.append(
            {
                "index": j + 1,
                "relevant": bool(mask[j]),
                "median_weights": [float(v) for v in series],
                "median_normalized_weights": [float(v) for v in med_norm[:, j]],
                "slope": slope,
                "median_weight_increasing": bool(np.all(np.diff(series) > 0)),
                "median_norm_weight_decreasing": bool(
                    np.all(np.diff(med_norm[:, j]) < 0)
                ),
            }
        )
    return {"sample_sizes": [int(n) for n in sizes], "covariates": covariates}
