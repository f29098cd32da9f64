"""Seeded generator for the benchmark simulation model.

Functional covariates are mixtures of five random sine terms sampled on an
integer grid and then standardized pointwise across the sample. Categorical
covariates are fair binary draws with labels {1, 2}. The continuous response
is a functional-linear term with a gamma-density coefficient function plus
twice the sum of the relevant binary covariates (coded 0/1) plus standard
normal noise. Only the first q_fun functional and first q_cat categorical
covariates enter the response; the rest are pure noise.

Randomness comes from a counter-based generator (Philox) with one split
stream per role: relevant curves, relevant categories, noise covariates,
response noise, and the held-out test draw. Regenerating the noise covariates
under a different sub-seed therefore leaves the responses untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .data import Dataset, DatasetSchema
from .grids import Grid, standardize_values

PRESETS = {
    "minimal": dict(p_fun=2, q_fun=1, p_cat=2, q_cat=1),
    "sparse": dict(p_fun=8, q_fun=2, p_cat=8, q_cat=2),
}

_SINE_TERMS = 5
_FUN_COEFF = 5.0
_CAT_COEFF = 2.0
_GAMMA_SHAPE = 3.0
_GAMMA_RATE = 1.0 / 3.0
_GAMMA_TIME_SCALE = 10.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Simulation scenario: sizes, relevance split, grid length and seed."""

    n: int
    p_fun: int
    q_fun: int
    p_cat: int
    q_cat: int
    grid_length: int = 300
    seed: int = 0
    test_size: int = 100

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not 1 <= self.q_fun <= self.p_fun:
            raise ValueError("need 1 <= q_fun <= p_fun")
        if not 0 <= self.q_cat <= self.p_cat:
            raise ValueError("need 0 <= q_cat <= p_cat")
        if self.grid_length < 2:
            raise ValueError("grid_length must be at least 2")
        if self.test_size < 2:
            raise ValueError("test_size must be at least 2 (test draws are standardized)")

    @classmethod
    def preset(cls, name: str, n: int, seed: int = 0, **overrides) -> "ScenarioConfig":
        if name not in PRESETS:
            raise ValueError(f"unknown preset {name!r}, expected {tuple(PRESETS)}")
        fields = dict(PRESETS[name])
        fields.update(overrides)
        return cls(n=n, seed=seed, **fields)

    @property
    def p(self) -> int:
        return self.p_fun + self.p_cat

    def grid(self) -> Grid:
        return Grid(start=1.0, step=1.0, count=self.grid_length)

    def schema(self) -> DatasetSchema:
        return DatasetSchema(
            grids=(self.grid(),) * self.p_fun,
            cardinalities=(2,) * self.p_cat,
        )

    def relevant_mask(self) -> np.ndarray:
        mask = np.zeros(self.p, dtype=bool)
        mask[: self.q_fun] = True
        mask[self.p_fun : self.p_fun + self.q_cat] = True
        return mask


@dataclass(frozen=True)
class SimDraw:
    """One simulated replication: training data, noiseless truth, relevance
    mask and a disjoint test draw with its own truth."""

    dataset: Dataset
    truth: np.ndarray
    relevant_mask: np.ndarray
    test: Dataset
    test_truth: np.ndarray


def gamma_density(a: float, b: float, t) -> np.ndarray | float:
    """Density of the gamma distribution with shape a and rate b; 0 for t <= 0."""
    if a <= 0 or b <= 0:
        raise ValueError("gamma_density needs a > 0 and b > 0")
    t_arr = np.asarray(t, dtype=float)
    positive = t_arr > 0
    safe_t = np.where(positive, t_arr, 1.0)
    density = (
        b**a / math.gamma(a) * safe_t ** (a - 1.0) * np.exp(-b * safe_t)
    )
    result = np.where(positive, density, 0.0)
    return result if result.ndim else float(result)


def sine_mixture_eval(
    amplitudes: np.ndarray, shifts: np.ndarray, grid_length: int
) -> np.ndarray:
    """Evaluate the sine-mixture formula for given term parameters.

    amplitudes and shifts have shape (n, terms); each sample curve is the sum
    over terms of B*sin((t/T)(5-B)*2*pi) - M at t = 1, ..., T.
    """
    amplitudes = np.atleast_2d(np.asarray(amplitudes, dtype=float))
    shifts = np.atleast_2d(np.asarray(shifts, dtype=float))
    t = np.arange(1, grid_length + 1, dtype=float)
    angle = (
        t[None, None, :] / grid_length * (5.0 - amplitudes)[:, :, None] * 2.0 * np.pi
    )
    return np.sum(amplitudes[:, :, None] * np.sin(angle), axis=1) - np.sum(
        shifts, axis=1
    )[:, None]


def sine_mixture_curves(
    rng: np.random.Generator, n: int, n_covariates: int, grid_length: int
) -> np.ndarray:
    """Raw (unstandardized) sine-mixture curves, shape (n_covariates, n, T).

    Term parameters are drawn per covariate: B uniform on [0, 5] and M
    uniform on [0, 2*pi], five terms per curve.
    """
    out = np.empty((n_covariates, n, grid_length))
    for j in range(n_covariates):
        amp = rng.uniform(0.0, 5.0, size=(n, _SINE_TERMS))
        shift = rng.uniform(0.0, 2.0 * np.pi, size=(n, _SINE_TERMS))
        out[j] = sine_mixture_eval(amp, shift, grid_length)
    return out


def gen_functional(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    """Raw curves for all p_fun covariates from a single stream."""
    return sine_mixture_curves(rng, cfg.n, cfg.p_fun, cfg.grid_length)


def binary_labels(rng: np.random.Generator, n: int, n_covariates: int) -> np.ndarray:
    """Fair binary labels in {1, 2}, shape (n, n_covariates)."""
    return rng.integers(1, 3, size=(n, n_covariates))


def gen_categorical(cfg: ScenarioConfig, rng: np.random.Generator) -> np.ndarray:
    return binary_labels(rng, cfg.n, cfg.p_cat)


def response_coefficient(grid_length: int) -> np.ndarray:
    """Gamma-density coefficient function evaluated on the response grid."""
    t = np.arange(1, grid_length + 1, dtype=float)
    return gamma_density(_GAMMA_SHAPE, _GAMMA_RATE, t / _GAMMA_TIME_SCALE)


def gen_response(
    cfg: ScenarioConfig,
    curves: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Responses and noiseless truth from standardized curves and labels.

    curves has shape (p_fun, n, T) and should already be standardized; labels
    in {1, 2} are recoded to 0/1 for the response sum.
    """
    n = curves.shape[1] if cfg.p_fun else labels.shape[0]
    grid = Grid(1.0, 1.0, cfg.grid_length)
    weights = response_coefficient(cfg.grid_length) * grid.quadrature_weights()
    truth = np.zeros(n)
    for j in range(cfg.q_fun):
        truth += _FUN_COEFF * np.sum(curves[j] * weights, axis=1)
    for j in range(cfg.q_cat):
        truth += _CAT_COEFF * (labels[:, j] - 1.0)
    y = truth + rng.standard_normal(n)
    return y, truth


def _draw_block(
    cfg: ScenarioConfig,
    n: int,
    rng_fun: np.random.Generator,
    rng_cat: np.random.Generator,
    rng_noise: np.random.Generator,
    rng_eps: np.random.Generator,
) -> tuple[Dataset, np.ndarray]:
    """One standardized draw of size n with responses and truth."""
    relevant = sine_mixture_curves(rng_fun, n, cfg.q_fun, cfg.grid_length)
    rel_cat = binary_labels(rng_cat, n, cfg.q_cat)
    noise_fun = sine_mixture_curves(
        rng_noise, n, cfg.p_fun - cfg.q_fun, cfg.grid_length
    )
    noise_cat = binary_labels(rng_noise, n, cfg.p_cat - cfg.q_cat)

    raw = np.concatenate([relevant, noise_fun], axis=0)
    curves = np.stack([standardize_values(raw[j]) for j in range(cfg.p_fun)])
    labels = np.concatenate([rel_cat, noise_cat], axis=1)

    y, truth = gen_response(cfg, curves, labels, rng_eps)
    ds = Dataset.regression(cfg.schema(), list(curves), labels, y)
    return ds, truth


def draw_scenario(cfg: ScenarioConfig, noise_seed: int | None = None) -> SimDraw:
    """Deterministic replication draw: training set plus disjoint test set.

    noise_seed, when given, replaces the sub-stream used for the training
    noise covariates; everything else (relevant covariates, responses, test
    draw) is unchanged, which makes the independence of truth from the noise
    covariates directly checkable.
    """
    root = np.random.SeedSequence(cfg.seed)
    kids = root.spawn(5)
    if noise_seed is not None:
        kids[2] = np.random.SeedSequence(noise_seed)
    rngs = [np.random.Generator(np.random.Philox(k)) for k in kids[:4]]
    dataset, truth = _draw_block(cfg, cfg.n, rngs[0], rngs[1], rngs[2], rngs[3])

    test_kids = kids[4].spawn(4)
    test_rngs = [np.random.Generator(np.random.Philox(k)) for k in test_kids]
    test, test_truth = _draw_block(
        cfg, cfg.test_size, test_rngs[0], test_rngs[1], test_rngs[2], test_rngs[3]
    )
    return SimDraw(
        dataset=dataset,
        truth=truth,
        relevant_mask=cfg.relevant_mask(),
        test=test,
        test_truth=test_truth,
    )


def threshold_classification(draw: SimDraw) -> SimDraw:
    """Binary-classification variant: label 2 where truth exceeds the median
    training truth, label 1 otherwise. The training median is also the test
    threshold."""
    cut = float(np.median(draw.truth))
    train_labels = np.where(draw.truth > cut, 2, 1)
    test_labels = np.where(draw.test_truth > cut, 2, 1)
    train = Dataset(draw.dataset.covariates, train_labels, "class", 2)
    test = Dataset(draw.test.covariates, test_labels, "class", 2)
    return replace(draw, dataset=train, test=test)


def derive_seed(base_seed: int, *keys: int) -> int:
    """Stable 64-bit seed for a replication stream keyed by integers."""
    seq = np.random.SeedSequence((int(base_seed),) + tuple(int(k) for k in keys))
    return int(seq.generate_state(1, np.uint64)[0])
