"""Reading and writing datasets, fit results and predictions.

A dataset directory holds one CSV per functional covariate (one row per
sample, one column per grid point), a categorical label CSV, a one-column
response CSV and a metadata JSON with the grid and schema description.
Floats are written with repr, which round-trips float64 exactly, so a
write/read cycle reproduces arrays bit for bit.
"""

from __future__ import annotations

import csv
import json
import os
from typing import Any

import numpy as np

from .data import CovariateBlock, Dataset, DatasetSchema
from .grids import Grid
from .kernels import KernelSpec, WeightVector
from .selection import FitResult

METADATA_FILE = "metadata.json"


def _write_matrix(path: str, matrix: np.ndarray, fmt) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.atleast_2d(matrix):
            writer.writerow([fmt(v) for v in row])


def _read_matrix(path: str, dtype) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[dtype(v) for v in row] for row in csv.reader(fh) if row]
    return np.array(rows, dtype=dtype)


def write_dataset(directory: str, ds: Dataset, truth: np.ndarray | None = None) -> None:
    """Write a dataset (and optional noiseless truth) to a directory."""
    os.makedirs(directory, exist_ok=True)
    schema = ds.schema
    meta: dict[str, Any] = {
        "p_fun": schema.p_fun,
        "p_cat": schema.p_cat,
        "grids": [
            {"start": g.start, "step": g.step, "count": g.count} for g in schema.grids
        ],
        "cardinalities": list(schema.cardinalities),
        "categorical_distance": list(schema.categorical_distance),
        "response": (
            {"kind": "continuous"}
            if ds.response_kind == "continuous"
            else {"kind": "class", "n_classes": ds.n_classes}
        ),
        "has_truth": truth is not None,
    }
    with open(os.path.join(directory, METADATA_FILE), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for j in range(schema.p_fun):
        _write_matrix(
            os.path.join(directory, f"functional_{j + 1}.csv"),
            ds.functional[j],
            lambda v: repr(float(v)),
        )
    _write_matrix(
        os.path.join(directory, "categorical.csv"),
        ds.categorical,
        lambda v: str(int(v)),
    )
    if ds.response_kind == "continuous":
        _write_matrix(
            os.path.join(directory, "responses.csv"),
            ds.y[:, None],
            lambda v: repr(float(v)),
        )
    else:
        _write_matrix(
            os.path.join(directory, "responses.csv"),
            ds.y[:, None],
            lambda v: str(int(v)),
        )
    if truth is not None:
        _write_matrix(
            os.path.join(directory, "truth.csv"),
            np.asarray(truth)[:, None],
            lambda v: repr(float(v)),
        )


def _read_schema_and_covariates(directory: str):
    meta_path = os.path.join(directory, METADATA_FILE)
    with open(meta_path) as fh:
        meta = json.load(fh)
    schema = DatasetSchema(
        grids=tuple(
            Grid(g["start"], g["step"], g["count"]) for g in meta["grids"]
        ),
        cardinalities=tuple(meta["cardinalities"]),
        categorical_distance=tuple(meta["categorical_distance"]),
    )
    functional = [
        _read_matrix(os.path.join(directory, f"functional_{j + 1}.csv"), float)
        for j in range(schema.p_fun)
    ]
    categorical = _read_matrix(os.path.join(directory, "categorical.csv"), int)
    n = functional[0].shape[0] if schema.p_fun else categorical.shape[0]
    categorical = categorical.reshape(n, schema.p_cat)
    return meta, schema, functional, categorical


def read_covariates(directory: str) -> CovariateBlock:
    """Read only the covariate rows of a dataset directory (for query sets)."""
    _, schema, functional, categorical = _read_schema_and_covariates(directory)
    return CovariateBlock(schema, functional, categorical)


def read_dataset(directory: str) -> tuple[Dataset, np.ndarray | None]:
    """Read a dataset directory written by write_dataset."""
    meta, schema, functional, categorical = _read_schema_and_covariates(directory)
    if meta["response"]["kind"] == "continuous":
        y = _read_matrix(os.path.join(directory, "responses.csv"), float).ravel()
        ds = Dataset.regression(schema, functional, categorical, y)
    else:
        labels = _read_matrix(os.path.join(directory, "responses.csv"), int).ravel()
        ds = Dataset.classification(
            schema, functional, categorical, labels, meta["response"]["n_classes"]
        )
    truth = None
    if meta.get("has_truth"):
        truth = _read_matrix(os.path.join(directory, "truth.csv"), float).ravel()
    return ds, truth


def write_fit_result(
    path: str, result: FitResult, mode: str, kernel: KernelSpec
) -> None:
    """Persist a fit result with its mode and kernel settings as JSON."""
    base = kernel.categorical_base
    payload = {
        "weights": [float(w) for w in result.weights.omega],
        "q_value": result.q_value,
        "evaluations": result.evaluations,
        "fallback_count": result.fallback_count,
        "start_index": result.start_index,
        "mode": mode,
        "kernel": {
            "functional_kernel": kernel.functional_kernel,
            "categorical_base": (
                float(base) if isinstance(base, (int, float)) else list(base)
            ),
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_fit_result(path: str) -> tuple[FitResult, str, KernelSpec]:
    with open(path) as fh:
        payload = json.load(fh)
    base = payload["kernel"]["categorical_base"]
    kernel = KernelSpec(
        functional_kernel=payload["kernel"]["functional_kernel"],
        categorical_base=base if isinstance(base, float) else tuple(base),
    )
    result = FitResult(
        weights=WeightVector(np.array(payload["weights"], dtype=float)),
        q_value=payload["q_value"],
        evaluations=payload["evaluations"],
        fallback_count=payload["fallback_count"],
        start_index=payload["start_index"],
    )
    return result, payload["mode"], kernel


def write_predictions_csv(
    path: str,
    values: np.ndarray | None,
    posterior: np.ndarray | None,
    fallback: np.ndarray,
) -> None:
    """Predictions CSV: regression gets a value column, classification gets
    the argmax label plus one posterior column per class."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if values is not None:
            writer.writerow(["index", "prediction", "fallback"])
            for i, (v, fb) in enumerate(zip(values, fallback)):
                writer.writerow([i, repr(float(v)), int(fb)])
        else:
            n_classes = posterior.shape[1]
            writer.writerow(
                ["index", "label"]
                + [f"posterior_{g}" for g in range(1, n_classes + 1)]
                + ["fallback"]
            )
            for i in range(posterior.shape[0]):
                label = int(np.argmax(posterior[i])) + 1
                writer.writerow(
                    [i, label]
                    + [repr(float(v)) for v in posterior[i]]
                    + [int(fallback[i])]
                )
