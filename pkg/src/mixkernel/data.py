"""Containers for mixed functional/categorical observations.

Data is stored column-wise: one value matrix per functional covariate and one
integer label matrix for the categorical block. Functional covariates always
come first in the covariate ordering, so weight j refers to functional
covariate j while j >= p_fun refers to categorical covariate j - p_fun.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .distances import CATEGORICAL_DISTANCES, CategoryValue
from .exceptions import (
    EmptyDatasetError,
    ResponseKindError,
    SchemaMismatchError,
)
from .grids import Curve, Grid

RESPONSE_KINDS = ("continuous", "class")


@dataclass(frozen=True)
class DatasetSchema:
    """Covariate layout shared by every sample in a dataset."""

    grids: tuple[Grid, ...]
    cardinalities: tuple[int, ...]
    categorical_distance: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        grids = tuple(self.grids)
        cards = tuple(int(c) for c in self.cardinalities)
        kinds = tuple(self.categorical_distance) or ("discrete",) * len(cards)
        if len(kinds) != len(cards):
            raise ValueError(
                f"{len(kinds)} distance kinds for {len(cards)} categorical covariates"
            )
        for kind in kinds:
            if kind not in CATEGORICAL_DISTANCES:
                raise ValueError(f"unknown categorical distance {kind!r}")
        if any(c < 2 for c in cards):
            raise ValueError("cardinalities must be at least 2")
        object.__setattr__(self, "grids", grids)
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "categorical_distance", kinds)

    @property
    def p_fun(self) -> int:
        return len(self.grids)

    @property
    def p_cat(self) -> int:
        return len(self.cardinalities)

    @property
    def p(self) -> int:
        return self.p_fun + self.p_cat


@dataclass(frozen=True)
class MixedSample:
    """One observation: a tuple of curves plus a tuple of category values."""

    functional: tuple[Curve, ...]
    categorical: tuple[CategoryValue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "functional", tuple(self.functional))
        object.__setattr__(self, "categorical", tuple(self.categorical))


@dataclass(frozen=True)
class ContinuousResponse:
    value: float


@dataclass(frozen=True)
class ClassResponse:
    label: int
    n_classes: int

    def __post_init__(self) -> None:
        if self.n_classes < 2:
            raise ValueError("a class response needs at least 2 classes")
        if not 1 <= self.label <= self.n_classes:
            raise ValueError(f"label {self.label} outside 1..{self.n_classes}")


Response = Union[ContinuousResponse, ClassResponse]


def check_sample(schema: DatasetSchema, x: MixedSample) -> None:
    """Raise SchemaMismatchError unless x conforms to the schema."""
    if len(x.functional) != schema.p_fun or len(x.categorical) != schema.p_cat:
        raise SchemaMismatchError(
            f"sample has {len(x.functional)} curves / {len(x.categorical)} "
            f"categories, schema wants {schema.p_fun} / {schema.p_cat}"
        )
    for j, curve in enumerate(x.functional):
        if curve.grid != schema.grids[j]:
            raise SchemaMismatchError(f"functional covariate {j}: grid mismatch")
    for j, cat in enumerate(x.categorical):
        if cat.cardinality != schema.cardinalities[j]:
            raise SchemaMismatchError(
                f"categorical covariate {j}: cardinality {cat.cardinality} "
                f"!= {schema.cardinalities[j]}"
            )


class CovariateBlock:
    """Column-wise covariate rows without responses (query batches, test sets)."""

    def __init__(
        self,
        schema: DatasetSchema,
        functional: list[np.ndarray],
        categorical: np.ndarray,
    ):
        self.schema = schema
        if len(functional) != schema.p_fun:
            raise SchemaMismatchError(
                f"{len(functional)} functional matrices for p_fun={schema.p_fun}"
            )
        self.functional = [np.asarray(m, dtype=float) for m in functional]
        self.categorical = np.asarray(categorical, dtype=int)
        if self.categorical.ndim != 2 or self.categorical.shape[1] != schema.p_cat:
            raise SchemaMismatchError(
                f"categorical block shape {self.categorical.shape} for p_cat={schema.p_cat}"
            )
        n = self.categorical.shape[0]
        for j, m in enumerate(self.functional):
            if m.shape != (n, schema.grids[j].count):
                raise SchemaMismatchError(
                    f"functional covariate {j}: shape {m.shape}, "
                    f"expected ({n}, {schema.grids[j].count})"
                )
            if not np.all(np.isfinite(m)):
                raise ValueError(f"functional covariate {j} has non-finite values")
        for j in range(schema.p_cat):
            col = self.categorical[:, j]
            if col.size and (col.min() < 1 or col.max() > schema.cardinalities[j]):
                raise SchemaMismatchError(
                    f"categorical covariate {j}: labels outside "
                    f"1..{schema.cardinalities[j]}"
                )
        self._n = n

    @property
    def n(self) -> int:
        return self._n

    def sample(self, i: int) -> MixedSample:
        """Materialize row i as a MixedSample."""
        curves = tuple(
            Curve(self.schema.grids[j], self.functional[j][i])
            for j in range(self.schema.p_fun)
        )
        cats = tuple(
            CategoryValue(int(self.categorical[i, j]), self.schema.cardinalities[j])
            for j in range(self.schema.p_cat)
        )
        return MixedSample(curves, cats)

    @classmethod
    def from_samples(
        cls, schema: DatasetSchema, samples: list[MixedSample]
    ) -> "CovariateBlock":
        for x in samples:
            check_sample(schema, x)
        functional = [
            np.vstack([x.functional[j].values for x in samples])
            if samples
            else np.empty((0, schema.grids[j].count))
            for j in range(schema.p_fun)
        ]
        categorical = np.array(
            [[cat.label for cat in x.categorical] for x in samples], dtype=int
        ).reshape(len(samples), schema.p_cat)
        return cls(schema, functional, categorical)


class Dataset:
    """A covariate block paired with responses of one kind."""

    def __init__(
        self,
        covariates: CovariateBlock,
        y: np.ndarray,
        response_kind: str,
        n_classes: int | None = None,
    ):
        if response_kind not in RESPONSE_KINDS:
            raise ValueError(f"unknown response kind {response_kind!r}")
        if covariates.n == 0:
            raise EmptyDatasetError("dataset needs at least one sample")
        self.covariates = covariates
        self.response_kind = response_kind
        if response_kind == "continuous":
            self.y = np.asarray(y, dtype=float)
            if not np.all(np.isfinite(self.y)):
                raise ValueError("responses must be finite")
            self.n_classes = None
        else:
            self.y = np.asarray(y, dtype=int)
            if n_classes is None or n_classes < 2:
                raise ValueError("class responses need n_classes >= 2")
            self.n_classes = int(n_classes)
            if self.y.size and (self.y.min() < 1 or self.y.max() > self.n_classes):
                raise ValueError(f"class labels outside 1..{self.n_classes}")
        if self.y.shape != (covariates.n,):
            raise ValueError(
                f"{self.y.shape} responses for {covariates.n} samples"
            )

    @property
    def schema(self) -> DatasetSchema:
        return self.covariates.schema

    @property
    def n(self) -> int:
        return self.covariates.n

    @property
    def functional(self) -> list[np.ndarray]:
        return self.covariates.functional

    @property
    def categorical(self) -> np.ndarray:
        return self.covariates.categorical

    def sample(self, i: int) -> MixedSample:
        return self.covariates.sample(i)

    def response(self, i: int) -> Response:
        if self.response_kind == "continuous":
            return ContinuousResponse(float(self.y[i]))
        return ClassResponse(int(self.y[i]), self.n_classes)

    @classmethod
    def from_samples(
        cls,
        schema: DatasetSchema,
        samples: list[MixedSample],
        responses: list[Response],
    ) -> "Dataset":
        if len(samples) != len(responses):
            raise ValueError(
                f"{len(samples)} samples but {len(responses)} responses"
            )
        if not responses:
            raise EmptyDatasetError("dataset needs at least one sample")
        block = CovariateBlock.from_samples(schema, samples)
        first = responses[0]
        if isinstance(first, ContinuousResponse):
            if not all(isinstance(r, ContinuousResponse) for r in responses):
                raise ResponseKindError("responses mix continuous and class values")
            return cls(block, np.array([r.value for r in responses]), "continuous")
        if not all(isinstance(r, ClassResponse) for r in responses):
            raise ResponseKindError("responses mix continuous and class values")
        n_classes = first.n_classes
        if any(r.n_classes != n_classes for r in responses):
            raise ResponseKindError("class responses disagree on the class count")
        return cls(
            block, np.array([r.label for r in responses]), "class", n_classes
        )

    @classmethod
    def regression(
        cls,
        schema: DatasetSchema,
        functional: list[np.ndarray],
        categorical: np.ndarray,
        y: np.ndarray,
    ) -> "Dataset":
        return cls(CovariateBlock(schema, functional, categorical), y, "continuous")

    @classmethod
    def classification(
        cls,
        schema: DatasetSchema,
        functional: list[np.ndarray],
        categorical: np.ndarray,
        labels: np.ndarray,
        n_classes: int,
    ) -> "Dataset":
        return cls(
            CovariateBlock(schema, functional, categorical), labels, "class", n_classes
        )
