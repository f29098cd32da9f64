"""Scalar kernels and the weighted product kernel over per-covariate distances.

For a query x and a sample x', the product kernel multiplies one factor per
covariate: functional covariates contribute K(w_j * d_j), categorical ones
contribute base_j ** (-w_j * d_j). With the picard kernel and base e this
collapses to a single exponential of the weighted distance sum, which is the
fast path used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import LengthMismatchError

FUNCTIONAL_KERNELS = ("picard", "boxcar")


def picard(u: float) -> float:
    """One-sided exponential kernel: exp(-u) for u >= 0, else 0."""
    if u < 0.0:
        return 0.0
    return math.exp(-u)


def boxcar(u: float) -> float:
    """Indicator kernel of the closed interval [0, 1]."""
    return 1.0 if 0.0 <= u <= 1.0 else 0.0


_SCALAR_KERNELS = {"picard": picard, "boxcar": boxcar}


@dataclass(frozen=True)
class KernelSpec:
    """Kernel configuration: functional kernel name and categorical bases.

    categorical_base may be a single float applied to every categorical
    covariate or a sequence with one base per categorical covariate. Bases
    must exceed 1 so that a category mismatch always shrinks the kernel.
    """

    functional_kernel: str = "picard"
    categorical_base: float | tuple[float, ...] = math.e

    def __post_init__(self) -> None:
        if self.functional_kernel not in FUNCTIONAL_KERNELS:
            raise ValueError(
                f"unknown functional kernel {self.functional_kernel!r}, "
                f"expected one of {FUNCTIONAL_KERNELS}"
            )
        base = self.categorical_base
        if isinstance(base, (int, float)):
            if not base > 1.0:
                raise ValueError(f"categorical base must exceed 1, got {base}")
        else:
            base = tuple(float(b) for b in base)
            if any(not b > 1.0 for b in base):
                raise ValueError(f"every categorical base must exceed 1, got {base}")
            object.__setattr__(self, "categorical_base", base)

    def bases(self, p_cat: int) -> np.ndarray:
        """Per-covariate bases as an array of length p_cat."""
        base = self.categorical_base
        if isinstance(base, (int, float)):
            return np.full(p_cat, float(base))
        if len(base) != p_cat:
            raise LengthMismatchError(
                f"{len(base)} categorical bases for {p_cat} categorical covariates"
            )
        return np.asarray(base, dtype=float)


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative per-covariate weights, functional covariates first."""

    omega: np.ndarray

    def __post_init__(self) -> None:
        omega = np.asarray(self.omega, dtype=float)
        if omega.ndim != 1:
            raise ValueError("weights must be a 1-d vector")
        if not np.all(np.isfinite(omega)):
            raise ValueError("weights must be finite")
        if np.any(omega < 0.0):
            raise ValueError("weights must be nonnegative")
        object.__setattr__(self, "omega", omega)

    def __len__(self) -> int:
        return int(self.omega.size)

    @property
    def p(self) -> int:
        return int(self.omega.size)

    def normalized(self) -> np.ndarray:
        """omega / sum(omega), or the uniform vector 1/p when the sum is zero."""
        total = float(np.sum(self.omega))
        if total == 0.0:
            return np.full(self.p, 1.0 / self.p)
        return self.omega / total


def product_kernel(
    spec: KernelSpec, w: WeightVector, dists: np.ndarray, p_fun: int
) -> float:
    """Product kernel over per-covariate distances for one sample pair."""
    dists = np.asarray(dists, dtype=float)
    if dists.ndim != 1 or dists.size != w.p:
        raise LengthMismatchError(
            f"got {dists.size} distances for {w.p} weights"
        )
    if not 0 <= p_fun <= w.p:
        raise ValueError(f"p_fun {p_fun} outside 0..{w.p}")
    scalar_kernel = _SCALAR_KERNELS[spec.functional_kernel]
    value = 1.0
    for j in range(p_fun):
        value *= scalar_kernel(w.omega[j] * dists[j])
    if value == 0.0:
        return 0.0
    bases = spec.bases(w.p - p_fun)
    for j in range(p_fun, w.p):
        value *= math.exp(-math.log(bases[j - p_fun]) * w.omega[j] * dists[j])
    return value


def kernel_values(
    spec: KernelSpec,
    omega: np.ndarray,
    fun_dists: list[np.ndarray],
    cat_dists: list[np.ndarray],
) -> np.ndarray:
    """Evaluate the product kernel elementwise on stacked distance arrays.

    fun_dists and cat_dists hold one array per covariate (all the same shape,
    e.g. (n, n) pairwise or (m, n) cross distances). Returns the kernel value
    array of that shared shape. Weighted distances are accumulated as a single
    exponent wherever possible, so weights up to the search cap cannot overflow.
    """
    p_fun = len(fun_dists)
    p_cat = len(cat_dists)
    omega = np.asarray(omega, dtype=float)
    if omega.size != p_fun + p_cat:
        raise LengthMismatchError(
            f"{omega.size} weights for {p_fun + p_cat} covariates"
        )
    shape = fun_dists[0].shape if p_fun else cat_dists[0].shape
    exponent = np.zeros(shape, dtype=float)
    log_bases = np.log(spec.bases(p_cat)) if p_cat else None
    for j in range(p_cat):
        if omega[p_fun + j] != 0.0:
            exponent += (log_bases[j] * omega[p_fun + j]) * cat_dists[j]
    if spec.functional_kernel == "picard":
        for j in range(p_fun):
            if omega[j] != 0.0:
                exponent += omega[j] * fun_dists[j]
        return np.exp(-exponent)
    # boxcar: indicator factors on the functional block
    inside = np.ones(shape, dtype=bool)
    for j in range(p_fun):
        inside &= omega[j] * fun_dists[j] <= 1.0
    return np.exp(-exponent) * inside
