"""Sampled curves on uniform grids: containers, quadrature, standardization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GridMismatchError, TooFewSamplesError

# Below this pointwise standard deviation a grid location is centered only.
SD_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform sampling grid with points start, start+step, ..., start+step*(count-1)."""

    start: float
    step: float
    count: int

    def __post_init__(self) -> None:
        if not self.step > 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.count < 2:
            raise ValueError(f"grid count must be at least 2, got {self.count}")

    @property
    def stop(self) -> float:
        return self.start + self.step * (self.count - 1)

    def points(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count, dtype=float)

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoidal-rule weights: step at interior points, step/2 at the ends."""
        w = np.full(self.count, self.step, dtype=float)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w


@dataclass(frozen=True)
class Curve:
    """A real-valued function sampled on a uniform grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.count,):
            raise ValueError(
                f"curve needs {self.grid.count} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("curve values must be finite")
        object.__setattr__(self, "values", values)


def check_same_grid(a: Curve, b: Curve) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(f"grids differ: {a.grid} vs {b.grid}")


def integrate(f: Curve) -> float:
    """Trapezoidal-rule approximation of the integral of f over its grid.

    Exact for functions that are linear between grid points.
    """
    return float(np.sum(f.values * f.grid.quadrature_weights()))


def pointwise_combine(a: Curve, b: Curve, op: str) -> Curve:
    """Elementwise 'subtract' or 'multiply' of two curves on a shared grid."""
    check_same_grid(a, b)
    if op == "subtract":
        return Curve(a.grid, a.values - b.values)
    if op == "multiply":
        return Curve(a.grid, a.values * b.values)
    raise ValueError(f"unknown op {op!r}, expected 'subtract' or 'multiply'")


def standardize_values(values: np.ndarray) -> np.ndarray:
    """Center and scale sample rows at each grid point.

    Subtracts the cross-sample mean and divides by the cross-sample standard
    deviation (population convention) per column. Columns with standard
    deviation below SD_FLOOR are centered only.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 2:
        raise TooFewSamplesError("standardization needs at least 2 sample rows")
    mean = values.mean(axis=0)
    sd = values.std(axis=0)
    safe_sd = np.where(sd < SD_FLOOR, 1.0, sd)
    return (values - mean) / safe_sd


def standardize_sample(curves: list[Curve]) -> list[Curve]:
    """Pointwise center-and-scale transform of a sample of curves on one grid."""
    if len(curves) < 2:
        raise TooFewSamplesError("standardize_sample needs at least 2 curves")
    grid = curves[0].grid
    for c in curves[1:]:
        if c.grid != grid:
            raise GridMismatchError(f"grids differ: {grid} vs {c.grid}")
    stacked = np.vstack([c.values for c in curves])
    out = standardize_values(stacked)
    return [Curve(grid, row) for row in out]
