"""Leave-one-out cross-validation score and data-driven weight selection.

The CV score averages squared leave-one-out prediction errors (for class
responses, the squared error is summed over the indicator vector of each
class). Weights are chosen by a projected Nelder-Mead simplex search run from
several deterministic, scale-aware starting points; negative proposals are
projected to zero and coordinates are capped, so the search stays inside the
feasible box. Three restricted modes are supported:

* ``free``    - every coordinate varies independently,
* ``equal``   - a single scalar weight applied to all covariates,
* ``oracle``  - weights outside a given index set are pinned to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .data import Dataset, MixedSample
from .estimator import (
    loo_posterior_values,
    loo_regression_values,
    pairwise_distances,
)
from .exceptions import (
    InvalidModeError,
    ResponseKindError,
    TooFewSamplesError,
)
from .kernels import KernelSpec, WeightVector, kernel_values

MODES = ("free", "equal", "oracle")


@dataclass(frozen=True)
class CvConfig:
    """Cross-validation and optimizer settings.

    trimming, when given, is a predicate over MixedSample; leave-one-out
    errors at samples where it returns False are dropped from the score.
    extra_starts holds additional full-length starting weight vectors
    appended after the deterministic scale ladder.
    """

    kernel: KernelSpec = field(default_factory=KernelSpec)
    mode: str = "free"
    oracle_indices: tuple[int, ...] | None = None
    starts: int = 3
    max_evals: int | None = None
    rel_tol: float = 1e-6
    weight_cap: float = 1e6
    trimming: Callable[[MixedSample], bool] | None = None
    extra_starts: tuple = ()

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InvalidModeError(f"unknown mode {self.mode!r}, expected {MODES}")
        if self.starts < 1:
            raise ValueError("starts must be at least 1")
        if self.max_evals is not None and self.max_evals < 1:
            raise ValueError("max_evals must be at least 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if not self.weight_cap > 0:
            raise ValueError("weight_cap must be positive")


@dataclass(frozen=True)
class FitResult:
    """Selected weights with the score and search bookkeeping."""

    weights: WeightVector
    q_value: float
    evaluations: int
    fallback_count: int
    start_index: int


class CvObjective:
    """Reusable CV score bound to one dataset and config.

    Pairwise distances, the trimming vector and the response encoding are
    computed once, so repeated evaluations only pay for the kernel matrix.
    A precomputed pairwise_distances(ds.covariates) result can be passed in
    to share the distance matrices across several configs on the same data.
    """

    def __init__(self, ds: Dataset, cfg: CvConfig, distances=None):
        if ds.n < 2:
            raise TooFewSamplesError("cross-validation needs at least 2 samples")
        self.ds = ds
        self.cfg = cfg
        if distances is None:
            distances = pairwise_distances(ds.covariates)
        self.fun_dists, self.cat_dists = distances
        if cfg.trimming is None:
            self.v = None
        else:
            self.v = np.array(
                [1.0 if cfg.trimming(ds.sample(i)) else 0.0 for i in range(ds.n)]
            )
        if ds.response_kind == "class":
            self._onehot = np.zeros((ds.n, ds.n_classes))
            self._onehot[np.arange(ds.n), ds.y - 1] = 1.0

    def q_and_fallbacks(self, omega: np.ndarray) -> tuple[float, int]:
        K = kernel_values(self.cfg.kernel, omega, self.fun_dists, self.cat_dists)
        if self.ds.response_kind == "continuous":
            preds, fallback = loo_regression_values(K, self.ds.y)
            errors = (self.ds.y - preds) ** 2
        else:
            posterior, fallback = loo_posterior_values(
                K, self.ds.y, self.ds.n_classes
            )
            errors = ((self._onehot - posterior) ** 2).sum(axis=1)
        if self.v is not None:
            errors = errors * self.v
        return float(np.mean(errors)), int(np.count_nonzero(fallback))

    def q(self, omega: np.ndarray) -> float:
        return self.q_and_fallbacks(omega)[0]

    def functional_medians(self) -> np.ndarray:
        """Median pairwise distance per functional covariate."""
        n = self.ds.n
        iu = np.triu_indices(n, k=1)
        return np.array([float(np.median(D[iu])) for D in self.fun_dists])


def cv_objective_regression(ds: Dataset, w: WeightVector, cfg: CvConfig) -> float:
    """Mean squared leave-one-out prediction error at the given weights."""
    if ds.response_kind != "continuous":
        raise ResponseKindError("cv_objective_regression needs continuous responses")
    return CvObjective(ds, cfg).q(w.omega)


def cv_objective_classification(ds: Dataset, w: WeightVector, cfg: CvConfig) -> float:
    """Mean summed squared error of leave-one-out posteriors at the weights."""
    if ds.response_kind != "class":
        raise ResponseKindError("cv_objective_classification needs class responses")
    return CvObjective(ds, cfg).q(w.omega)


def _start_scales(n_starts: int) -> np.ndarray:
    # geometric ladder centered at 1: three starts give 0.1, 1, 10
    return 10.0 ** (np.arange(n_starts) - (n_starts - 1) / 2.0)


def _nelder_mead(
    fn: Callable[[np.ndarray], float],
    x0: np.ndarray,
    steps: np.ndarray,
    max_evals: int,
    rel_tol: float,
    cap: float,
) -> tuple[np.ndarray, float, int]:
    """Projected Nelder-Mead on the box [0, cap]^dim.

    Proposals are clipped into the box before evaluation. Stops when the
    simplex infinity-norm diameter relative to the best vertex drops below
    rel_tol or the evaluation budget runs out. Ties in the vertex ordering
    are broken by creation order, so the search is fully deterministic.
    """
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    evals = 0
    seq = 0

    def make(x: np.ndarray) -> list:
        nonlocal evals, seq
        x = np.clip(x, 0.0, cap)
        evals += 1
        seq += 1
        return [fn(x), seq, x]

    simplex = [make(x0)]
    for i in range(x0.size):
        vec = x0.copy()
        vec[i] += steps[i]
        simplex.append(make(vec))

    while evals < max_evals:
        simplex.sort(key=lambda v: (v[0], v[1]))
        best = simplex[0]
        scale = max(1.0, float(np.max(np.abs(best[2]))))
        diameter = max(float(np.max(np.abs(v[2] - best[2]))) for v in simplex[1:])
        if diameter / scale < rel_tol:
            break
        centroid = np.mean([v[2] for v in simplex[:-1]], axis=0)
        worst = simplex[-1]
        reflected = make(centroid + alpha * (centroid - worst[2]))
        if reflected[0] < best[0]:
            expanded = make(centroid + gamma * (centroid - worst[2]))
            simplex[-1] = expanded if expanded[0] < reflected[0] else reflected
            continue
        if reflected[0] < simplex[-2][0]:
            simplex[-1] = reflected
            continue
        if reflected[0] < worst[0]:
            contracted = make(centroid + rho * (reflected[2] - centroid))
            if contracted[0] <= reflected[0]:
                simplex[-1] = contracted
                continue
        else:
            contracted = make(centroid - rho * (centroid - worst[2]))
            if contracted[0] < worst[0]:
                simplex[-1] = contracted
                continue
        simplex = [best] + [
            make(best[2] + sigma * (v[2] - best[2])) for v in simplex[1:]
        ]

    simplex.sort(key=lambda v: (v[0], v[1]))
    return simplex[0][2], simplex[0][0], evals


def _mode_mapping(ds: Dataset, cfg: CvConfig):
    """Free-coordinate dimension and the embedding into full weight space."""
    p = ds.schema.p
    if cfg.mode == "free":
        return p, lambda z: z
    if cfg.mode == "equal":
        return 1, lambda z: np.full(p, z[0])
    indices = cfg.oracle_indices
    if indices is None or len(indices) == 0:
        raise InvalidModeError("oracle mode needs a nonempty index set")
    indices = tuple(sorted(set(int(i) for i in indices)))
    if indices[0] < 0 or indices[-1] >= p:
        raise InvalidModeError(
            f"oracle indices {indices} outside 0..{p - 1}"
        )

    def embed(z: np.ndarray, idx=indices) -> np.ndarray:
        full = np.zeros(p)
        full[list(idx)] = z
        return full

    return len(indices), embed


def _free_start(
    full_start: np.ndarray, ds: Dataset, cfg: CvConfig
) -> np.ndarray:
    """Project a full-length start vector onto the mode's free coordinates."""
    p = ds.schema.p
    full_start = np.asarray(full_start, dtype=float)
    if full_start.shape != (p,):
        raise InvalidModeError(f"extra start must have length {p}")
    if cfg.mode == "free":
        return full_start
    if cfg.mode == "equal":
        if np.ptp(full_start) != 0.0:
            raise InvalidModeError("equal mode extra starts must be constant vectors")
        return full_start[:1].copy()
    indices = tuple(sorted(set(int(i) for i in cfg.oracle_indices or ())))
    outside = np.delete(full_start, list(indices))
    if np.any(outside != 0.0):
        raise InvalidModeError("oracle mode extra starts must be zero off the index set")
    return full_start[list(indices)].copy()


def minimize_weights(ds: Dataset, cfg: CvConfig, distances=None) -> FitResult:
    """Select weights by minimizing the leave-one-out CV score.

    Runs one simplex search per starting point and keeps the best result;
    ties go to the earliest start. The returned q_value is re-evaluated at
    the final weights, and fallback_count is the number of leave-one-out
    terms that hit the vanishing-kernel fallback there. distances may carry
    a precomputed pairwise_distances(ds.covariates) result.
    """
    objective = CvObjective(ds, cfg, distances)
    free_dim, embed = _mode_mapping(ds, cfg)
    p = ds.schema.p
    p_fun = ds.schema.p_fun

    medians = objective.functional_medians()
    base = np.ones(p)
    for j in range(p_fun):
        base[j] = 1.0 / medians[j] if medians[j] > 0 else 1.0
    if cfg.mode == "equal":
        pooled = (
            float(np.median(np.concatenate([
                D[np.triu_indices(ds.n, k=1)] for D in objective.fun_dists
            ])))
            if p_fun
            else 0.0
        )
        free_base = np.array([1.0 / pooled if pooled > 0 else 1.0])
    elif cfg.mode == "oracle":
        indices = tuple(sorted(set(int(i) for i in cfg.oracle_indices or ())))
        free_base = base[list(indices)]
    else:
        free_base = base

    starts = [
        np.minimum(scale * free_base, cfg.weight_cap)
        for scale in _start_scales(cfg.starts)
    ]
    starts.extend(_free_start(extra, ds, cfg) for extra in cfg.extra_starts)

    max_evals = cfg.max_evals if cfg.max_evals is not None else 400 * free_dim
    score = lambda z: objective.q(embed(z))

    best = None
    total_evals = 0
    for k, x0 in enumerate(starts):
        steps = 0.5 * np.maximum(x0, free_base)
        z, q, evals = _nelder_mead(
            score, x0, steps, max_evals, cfg.rel_tol, cfg.weight_cap
        )
        total_evals += evals
        if best is None or q < best[0]:
            best = (q, k, z)

    omega = embed(best[2])
    q_final, fallbacks = objective.q_and_fallbacks(omega)
    return FitResult(
        weights=WeightVector(omega),
        q_value=q_final,
        evaluations=total_evals,
        fallback_count=fallbacks,
        start_index=best[1],
    )
