"""Shared test utilities: random dataset factories and independent
leave-one-out oracles that rebuild the reduced dataset explicitly."""

from __future__ import annotations

import numpy as np

from mixkernel import (
    ClassResponse,
    ContinuousResponse,
    Curve,
    Dataset,
    DatasetSchema,
    Grid,
    KernelSpec,
    WeightVector,
    predict_posterior,
    predict_regression,
)


def unit_grid(count: int = 16) -> Grid:
    return Grid(0.0, 1.0 / (count - 1), count)


def random_schema(
    rng: np.random.Generator, p_fun: int, p_cat: int, grid_length: int = 16
) -> DatasetSchema:
    grid = unit_grid(grid_length)
    cards = tuple(int(rng.integers(2, 5)) for _ in range(p_cat))
    kinds = tuple(
        "ordinal" if rng.integers(0, 2) == 1 else "discrete" for _ in range(p_cat)
    )
    return DatasetSchema((grid,) * p_fun, cards, kinds)


def random_dataset(
    rng: np.random.Generator,
    n: int,
    p_fun: int,
    p_cat: int,
    kind: str = "continuous",
    n_classes: int = 3,
    grid_length: int = 16,
) -> Dataset:
    schema = random_schema(rng, p_fun, p_cat, grid_length)
    functional = [rng.normal(size=(n, grid_length)) for _ in range(p_fun)]
    categorical = np.column_stack(
        [rng.integers(1, schema.cardinalities[j] + 1, size=n) for j in range(p_cat)]
    ) if p_cat else np.empty((n, 0), dtype=int)
    if kind == "continuous":
        y = rng.normal(size=n)
        return Dataset.regression(schema, functional, categorical, y)
    labels = rng.integers(1, n_classes + 1, size=n)
    return Dataset.classification(schema, functional, categorical, labels, n_classes)


def random_weights(rng: np.random.Generator, p: int, scale: float = 3.0) -> WeightVector:
    return WeightVector(rng.uniform(0.0, scale, size=p))


def dataset_without(ds: Dataset, drop: int) -> Dataset:
    """Rebuild the dataset sample by sample, leaving out row `drop`."""
    samples = [ds.sample(i) for i in range(ds.n) if i != drop]
    if ds.response_kind == "continuous":
        responses = [
            ContinuousResponse(float(ds.y[i])) for i in range(ds.n) if i != drop
        ]
    else:
        responses = [
            ClassResponse(int(ds.y[i]), ds.n_classes)
            for i in range(ds.n)
            if i != drop
        ]
    return Dataset.from_samples(ds.schema, samples, responses)


def brute_q_regression(ds: Dataset, w: WeightVector, spec: KernelSpec) -> float:
    """CV score via explicit dataset removal and fresh single predictions."""
    total = 0.0
    for i in range(ds.n):
        reduced = dataset_without(ds, i)
        pred = predict_regression(reduced, w, ds.sample(i), spec)
        total += (float(ds.y[i]) - pred.value) ** 2
    return total / ds.n


def brute_q_classification(ds: Dataset, w: WeightVector, spec: KernelSpec) -> float:
    total = 0.0
    for i in range(ds.n):
        reduced = dataset_without(ds, i)
        pred = predict_posterior(reduced, w, ds.sample(i), spec)
        onehot = np.zeros(ds.n_classes)
        onehot[int(ds.y[i]) - 1] = 1.0
        total += float(np.sum((onehot - pred.posterior) ** 2))
    return total / ds.n


def constant_curve(value: float, grid: Grid) -> Curve:
    return Curve(grid, np.full(grid.count, float(value)))
