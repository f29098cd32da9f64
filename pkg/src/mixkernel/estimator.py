"""Kernel-weighted prediction for regression and classification.

Predictions are ratios of kernel-weighted sums over the training sample, so
they are invariant to any positive rescaling of the kernel row. When every
kernel weight underflows to zero (possible with the boxcar kernel and large
weights), the prediction falls back to the training mean or the empirical
class frequencies and the result is flagged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CovariateBlock, Dataset, MixedSample, check_sample
from .distances import categorical_distance_rows, l2_distance_rows
from .exceptions import (
    EmptyDatasetError,
    ResponseKindError,
    TooFewSamplesError,
)
from .kernels import KernelSpec, WeightVector, kernel_values

# A kernel mass at or below this threshold triggers the fallback prediction.
FALLBACK_EPS = 1e-300

_DEFAULT_SPEC = KernelSpec()


@dataclass(frozen=True)
class Prediction:
    """A point prediction (regression) or posterior vector (classification)."""

    value: float | None
    posterior: np.ndarray | None
    fallback_used: bool

    def label(self) -> int:
        """Most probable class, lowest label on ties."""
        if self.posterior is None:
            raise ResponseKindError("prediction has no posterior")
        return int(np.argmax(self.posterior)) + 1


def pairwise_distances(
    block_a: CovariateBlock, block_b: CovariateBlock | None = None
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Per-covariate distance matrices between two covariate blocks.

    With block_b omitted, distances are between block_a rows and themselves.
    Returns (functional matrices, categorical matrices), each of shape
    (block_a.n, block_b.n).
    """
    if block_b is None:
        block_b = block_a
    schema = block_a.schema
    if block_b.schema != schema:
        raise ValueError("blocks have different schemas")
    fun = [
        l2_distance_rows(block_a.functional[j], block_b.functional[j], schema.grids[j])
        for j in range(schema.p_fun)
    ]
    cat = [
        categorical_distance_rows(
            block_a.categorical[:, j],
            block_b.categorical[:, j],
            schema.categorical_distance[j],
        )
        for j in range(schema.p_cat)
    ]
    return fun, cat


def _query_distances(
    ds: Dataset, x: MixedSample
) -> tuple[list[np.ndarray], list[np.ndarray]]:
    schema = ds.schema
    check_sample(schema, x)
    fun = [
        l2_distance_rows(ds.functional[j], x.functional[j].values, schema.grids[j])[
            :, 0
        ]
        for j in range(schema.p_fun)
    ]
    cat = [
        categorical_distance_rows(
            ds.categorical[:, j],
            np.array([x.categorical[j].label]),
            schema.categorical_distance[j],
        )[:, 0]
        for j in range(schema.p_cat)
    ]
    return fun, cat


def kernel_row(
    ds: Dataset,
    w: WeightVector,
    x: MixedSample,
    spec: KernelSpec = _DEFAULT_SPEC,
    exclude: int | None = None,
) -> np.ndarray:
    """Kernel weight of every training sample against the query x."""
    fun, cat = _query_distances(ds, x)
    row = kernel_values(spec, w.omega, fun, cat)
    if exclude is not None:
        row = row.copy()
        row[exclude] = 0.0
    return row


def regression_from_kernel_row(
    row: np.ndarray, y: np.ndarray, fallback_value: float | None = None
) -> Prediction:
    """Kernel-weighted mean of y, or the fallback when the row mass vanishes."""
    denom = float(np.sum(row))
    if denom <= FALLBACK_EPS:
        if fallback_value is None:
            fallback_value = float(np.mean(y))
        return Prediction(fallback_value, None, True)
    return Prediction(float(np.sum(row * y) / denom), None, False)


def posterior_from_kernel_row(
    row: np.ndarray,
    labels: np.ndarray,
    n_classes: int,
    fallback_posterior: np.ndarray | None = None,
) -> Prediction:
    """Kernel-weighted class frequencies, or the fallback on vanishing mass."""
    denom = float(np.sum(row))
    if denom <= FALLBACK_EPS:
        if fallback_posterior is None:
            fallback_posterior = np.bincount(
                labels, minlength=n_classes + 1
            )[1:] / float(labels.size)
        return Prediction(None, np.asarray(fallback_posterior, dtype=float), True)
    posterior = np.array(
        [float(np.sum(row * (labels == g))) / denom for g in range(1, n_classes + 1)]
    )
    return Prediction(None, posterior, False)


def _require_kind(ds: Dataset, kind: str) -> None:
    if ds.response_kind != kind:
        raise ResponseKindError(
            f"operation needs {kind} responses, dataset has {ds.response_kind}"
        )


def predict_regression(
    ds: Dataset, w: WeightVector, x: MixedSample, spec: KernelSpec = _DEFAULT_SPEC
) -> Prediction:
    """Kernel-weighted mean response at the query point."""
    _require_kind(ds, "continuous")
    if ds.n == 0:
        raise EmptyDatasetError("cannot predict from an empty dataset")
    return regression_from_kernel_row(kernel_row(ds, w, x, spec), ds.y)


def predict_posterior(
    ds: Dataset, w: WeightVector, x: MixedSample, spec: KernelSpec = _DEFAULT_SPEC
) -> Prediction:
    """Kernel-weighted posterior class probabilities at the query point."""
    _require_kind(ds, "class")
    if ds.n == 0:
        raise EmptyDatasetError("cannot predict from an empty dataset")
    return posterior_from_kernel_row(kernel_row(ds, w, x, spec), ds.y, ds.n_classes)


def classify(
    ds: Dataset, w: WeightVector, x: MixedSample, spec: KernelSpec = _DEFAULT_SPEC
) -> int:
    """Most probable class at the query point, lowest label on ties."""
    return predict_posterior(ds, w, x, spec).label()


def loo_predict(
    ds: Dataset, w: WeightVector, i: int, spec: KernelSpec = _DEFAULT_SPEC
) -> Prediction:
    """Prediction at training sample i from the other n-1 samples."""
    if ds.n < 2:
        raise TooFewSamplesError("leave-one-out needs at least 2 samples")
    row = kernel_row(ds, w, ds.sample(i), spec, exclude=i)
    keep = np.arange(ds.n) != i
    if ds.response_kind == "continuous":
        return regression_from_kernel_row(row, ds.y, float(np.mean(ds.y[keep])))
    loo_freq = np.bincount(ds.y[keep], minlength=ds.n_classes + 1)[1:] / float(
        ds.n - 1
    )
    return posterior_from_kernel_row(row, ds.y, ds.n_classes, loo_freq)


def predict_regression_block(
    ds: Dataset,
    w: WeightVector,
    block: CovariateBlock,
    spec: KernelSpec = _DEFAULT_SPEC,
    cross_distances: tuple[list[np.ndarray], list[np.ndarray]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Regression predictions for a batch of query rows.

    cross_distances may carry precomputed (query x train) distance matrices
    from pairwise_distances(block, ds.covariates). Returns (values, fallback
    flags).
    """
    _require_kind(ds, "continuous")
    if cross_distances is None:
        cross_distances = pairwise_distances(block, ds.covariates)
    K = kernel_values(spec, w.omega, *cross_distances)
    denom = K.sum(axis=1)
    fallback = denom <= FALLBACK_EPS
    safe = np.where(fallback, 1.0, denom)
    values = np.where(fallback, float(np.mean(ds.y)), (K @ ds.y) / safe)
    return values, fallback


def predict_posterior_block(
    ds: Dataset,
    w: WeightVector,
    block: CovariateBlock,
    spec: KernelSpec = _DEFAULT_SPEC,
    cross_distances: tuple[list[np.ndarray], list[np.ndarray]] | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Posterior matrices (rows x classes) for a batch of query rows."""
    _require_kind(ds, "class")
    if cross_distances is None:
        cross_distances = pairwise_distances(block, ds.covariates)
    K = kernel_values(spec, w.omega, *cross_distances)
    onehot = _onehot(ds.y, ds.n_classes)
    denom = K.sum(axis=1)
    fallback = denom <= FALLBACK_EPS
    safe = np.where(fallback, 1.0, denom)
    posterior = (K @ onehot) / safe[:, None]
    freq = onehot.mean(axis=0)
    posterior[fallback] = freq
    return posterior, fallback


def _onehot(labels: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((labels.size, n_classes), dtype=float)
    out[np.arange(labels.size), labels - 1] = 1.0
    return out


def loo_regression_values(K: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Leave-one-out predictions from a full pairwise kernel matrix.

    K[i, s] weights training sample s against query i on the same sample; the
    diagonal is zeroed here, so callers can pass the plain pairwise matrix.
    Returns (predictions, fallback flags).
    """
    n = y.size
    K = K.copy()
    np.fill_diagonal(K, 0.0)
    denom = K.sum(axis=1)
    fallback = denom <= FALLBACK_EPS
    safe = np.where(fallback, 1.0, denom)
    loo_mean = (np.sum(y) - y) / (n - 1)
    preds = np.where(fallback, loo_mean, (K @ y) / safe)
    return preds, fallback


def loo_posterior_values(
    K: np.ndarray, labels: np.ndarray, n_classes: int
) -> tuple[np.ndarray, np.ndarray]:
    """Leave-one-out posterior matrix from a full pairwise kernel matrix."""
    n = labels.size
    K = K.copy()
    np.fill_diagonal(K, 0.0)
    onehot = _onehot(labels, n_classes)
    denom = K.sum(axis=1)
    fallback = denom <= FALLBACK_EPS
    safe = np.where(fallback, 1.0, denom)
    posterior = (K @ onehot) / safe[:, None]
    loo_freq = (onehot.sum(axis=0)[None, :] - onehot) / (n - 1)
    posterior[fallback] = loo_freq[fallback]
    return posterior, fallback
