"""Scikit-learn style estimators around weight selection and prediction.

X is a CovariateBlock or a list of MixedSample rows; y is a 1-d response
array. fit selects per-covariate weights by leave-one-out cross-validation
(unless fixed weights are supplied) and predict applies the kernel-weighted
estimator, so the classes compose with sklearn tooling that relies on the
get_params/set_params/fit/predict protocol.
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, RegressorMixin

from .data import CovariateBlock, Dataset, DatasetSchema, MixedSample
from .kernels import KernelSpec, WeightVector
from .estimator import predict_posterior_block, predict_regression_block
from .selection import CvConfig, minimize_weights


def _as_block(X) -> CovariateBlock:
    if isinstance(X, CovariateBlock):
        return X
    samples = list(X)
    if not samples or not isinstance(samples[0], MixedSample):
        raise TypeError(
            "X must be a CovariateBlock or a nonempty list of MixedSample rows"
        )
    schema = DatasetSchema(
        grids=tuple(c.grid for c in samples[0].functional),
        cardinalities=tuple(c.cardinality for c in samples[0].categorical),
    )
    return CovariateBlock.from_samples(schema, samples)


class _WeightedKernelBase(BaseEstimator):
    def __init__(
        self,
        kernel="picard",
        categorical_base=math.e,
        mode="free",
        oracle_indices=None,
        starts=3,
        max_evals=None,
        rel_tol=1e-6,
        weight_cap=1e6,
        weights=None,
    ):
        self.kernel = kernel
        self.categorical_base = categorical_base
        self.mode = mode
        self.oracle_indices = oracle_indices
        self.starts = starts
        self.max_evals = max_evals
        self.rel_tol = rel_tol
        self.weight_cap = weight_cap
        self.weights = weights

    def _kernel_spec(self) -> KernelSpec:
        return KernelSpec(self.kernel, self.categorical_base)

    def _cv_config(self) -> CvConfig:
        return CvConfig(
            kernel=self._kernel_spec(),
            mode=self.mode,
            oracle_indices=(
                None if self.oracle_indices is None else tuple(self.oracle_indices)
            ),
            starts=self.starts,
            max_evals=self.max_evals,
            rel_tol=self.rel_tol,
            weight_cap=self.weight_cap,
        )

    def _fit_dataset(self, ds: Dataset) -> None:
        if self.weights is not None:
            self.weights_ = WeightVector(np.asarray(self.weights, dtype=float))
            self.fit_result_ = None
        else:
            self.fit_result_ = minimize_weights(ds, self._cv_config())
            self.weights_ = self.fit_result_.weights
        self.dataset_ = ds
        self.n_features_in_ = ds.schema.p


class WeightedKernelRegressor(_WeightedKernelBase, RegressorMixin):
    """Kernel-weighted mean regression with cross-validated covariate weights."""

    def fit(self, X, y):
        block = _as_block(X)
        ds = Dataset(block, np.asarray(y, dtype=float), "continuous")
        self._fit_dataset(ds)
        return self

    def predict(self, X) -> np.ndarray:
        block = _as_block(X)
        values, _ = predict_regression_block(
            self.dataset_, self.weights_, block, self._kernel_spec()
        )
        return values


class WeightedKernelClassifier(_WeightedKernelBase, ClassifierMixin):
    """Posterior-probability classification with cross-validated weights.

    Accepts arbitrary label values; they are encoded to 1..G internally and
    predict returns values from classes_.
    """

    def fit(self, X, y):
        block = _as_block(X)
        y = np.asarray(y)
        self.classes_, encoded = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ValueError("classification needs at least 2 distinct labels")
        ds = Dataset(block, encoded + 1, "class", n_classes=self.classes_.size)
        self._fit_dataset(ds)
        return self

    def predict_proba(self, X) -> np.ndarray:
        block = _as_block(X)
        posterior, _ = predict_posterior_block(
            self.dataset_, self.weights_, block, self._kernel_spec()
        )
        return posterior

    def predict(self, X) -> np.ndarray:
        posterior = self.predict_proba(X)
        return self.classes_[np.argmax(posterior, axis=1)]
