"""Distances between covariate values.

Curves are compared with the L2 distance discretized by the trapezoidal rule
on their shared grid. Category codes are compared either with the 0/1
mismatch indicator or, for ordered categories, the absolute label difference.
Both categorical distances take values in {0} union [1, inf), so a nonzero
distance is never smaller than 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import CardinalityMismatchError
from .grids import Curve, Grid, check_same_grid

CATEGORICAL_DISTANCES = ("discrete", "ordinal")

# Rows x grid chunk size for pairwise curve distances, bounds peak memory.
_CHUNK_ROWS = 32


@dataclass(frozen=True)
class CategoryValue:
    """A category code in {1, ..., cardinality}."""

    label: int
    cardinality: int

    def __post_init__(self) -> None:
        if self.cardinality < 2:
            raise ValueError(f"cardinality must be at least 2, got {self.cardinality}")
        if not 1 <= self.label <= self.cardinality:
            raise ValueError(
                f"label {self.label} outside 1..{self.cardinality}"
            )


def _check_cardinality(a: CategoryValue, b: CategoryValue) -> None:
    if a.cardinality != b.cardinality:
        raise CardinalityMismatchError(
            f"cardinalities differ: {a.cardinality} vs {b.cardinality}"
        )


def l2_distance(a: Curve, b: Curve) -> float:
    """L2 distance between two curves on a shared grid (trapezoidal rule)."""
    check_same_grid(a, b)
    diff = a.values - b.values
    sq = float(np.sum(diff * diff * a.grid.quadrature_weights()))
    return float(np.sqrt(sq if sq > 0.0 else 0.0))


def discrete_distance(a: CategoryValue, b: CategoryValue) -> float:
    """0 if the labels match, 1 otherwise."""
    _check_cardinality(a, b)
    return 0.0 if a.label == b.label else 1.0


def ordinal_distance(a: CategoryValue, b: CategoryValue) -> float:
    """Absolute difference of the labels, for ordered categories."""
    _check_cardinality(a, b)
    return float(abs(a.label - b.label))


def l2_distance_rows(values_a: np.ndarray, values_b: np.ndarray, grid: Grid) -> np.ndarray:
    """All pairwise L2 distances between sample rows of two value matrices.

    values_a has shape (m, count) and values_b shape (n, count); the result has
    shape (m, n). Row pairs are reduced with the same elementwise-product-and-sum
    used by l2_distance, so matrix entries agree bitwise with per-pair calls.
    """
    values_a = np.atleast_2d(np.asarray(values_a, dtype=float))
    values_b = np.atleast_2d(np.asarray(values_b, dtype=float))
    w = grid.quadrature_weights()
    if values_a.shape[1] != grid.count or values_b.shape[1] != grid.count:
        raise ValueError("value rows must match the grid length")
    m = values_a.shape[0]
    out = np.empty((m, values_b.shape[0]), dtype=float)
    buf = None
    for lo in range(0, m, _CHUNK_ROWS):
        hi = min(lo + _CHUNK_ROWS, m)
        shape = (hi - lo, values_b.shape[0], grid.count)
        if buf is None or buf.shape != shape:
            buf = np.empty(shape)
        np.subtract(values_a[lo:hi, None, :], values_b[None, :, :], out=buf)
        np.multiply(buf, buf, out=buf)
        np.multiply(buf, w, out=buf)
        sq = np.sum(buf, axis=-1)
        out[lo:hi] = np.sqrt(np.where(sq > 0.0, sq, 0.0))
    return out


def categorical_distance_rows(
    labels_a: np.ndarray, labels_b: np.ndarray, kind: str
) -> np.ndarray:
    """Pairwise 'discrete' or 'ordinal' distances between two label vectors."""
    labels_a = np.asarray(labels_a)
    labels_b = np.asarray(labels_b)
    if kind == "discrete":
        return (labels_a[:, None] != labels_b[None, :]).astype(float)
    if kind == "ordinal":
        return np.abs(labels_a[:, None].astype(float) - labels_b[None, :].astype(float))
    raise ValueError(f"unknown categorical distance {kind!r}")
