"""Dataset directory round-trips and fit-result serialization."""

import numpy as np
import pytest

from mixkernel import KernelSpec, ScenarioConfig, draw_scenario, threshold_classification
from mixkernel.io import (
    read_covariates,
    read_dataset,
    read_fit_result,
    write_dataset,
    write_fit_result,
    write_predictions_csv,
)
from mixkernel.selection import FitResult
from mixkernel.kernels import WeightVector


@pytest.fixture
def draw():
    cfg = ScenarioConfig.preset("minimal", n=12, seed=31, grid_length=25, test_size=4)
    return draw_scenario(cfg)


def test_regression_dataset_roundtrip_bitwise(tmp_path, draw):
    where = str(tmp_path / "ds")
    write_dataset(where, draw.dataset, truth=draw.truth)
    ds, truth = read_dataset(where)
    assert ds.response_kind == "continuous"
    assert ds.schema == draw.dataset.schema
    for j in range(ds.schema.p_fun):
        assert np.array_equal(ds.functional[j], draw.dataset.functional[j])
    assert np.array_equal(ds.categorical, draw.dataset.categorical)
    assert np.array_equal(ds.y, draw.dataset.y)
    assert np.array_equal(truth, draw.truth)


def test_classification_dataset_roundtrip(tmp_path, draw):
    converted = threshold_classification(draw)
    where = str(tmp_path / "cls")
    write_dataset(where, converted.dataset)
    ds, truth = read_dataset(where)
    assert ds.response_kind == "class"
    assert ds.n_classes == 2
    assert np.array_equal(ds.y, converted.dataset.y)
    assert truth is None


def test_read_covariates_only(tmp_path, draw):
    where = str(tmp_path / "ds")
    write_dataset(where, draw.dataset)
    block = read_covariates(where)
    assert block.n == draw.dataset.n
    assert block.schema == draw.dataset.schema


def test_roundtrip_without_categorical_covariates(tmp_path):
    from helpers import random_dataset

    ds = random_dataset(np.random.default_rng(4), n=6, p_fun=2, p_cat=0)
    where = str(tmp_path / "fun_only")
    write_dataset(where, ds)
    back, _ = read_dataset(where)
    assert back.schema == ds.schema
    assert back.categorical.shape == (6, 0)
    assert np.array_equal(back.y, ds.y)


def test_fit_result_roundtrip_bitwise(tmp_path):
    result = FitResult(
        weights=WeightVector(np.array([0.1234567890123456789, 0.0, 7.25e-3])),
        q_value=1.0000000000012345,
        evaluations=321,
        fallback_count=2,
        start_index=1,
    )
    path = str(tmp_path / "fit.json")
    write_fit_result(path, result, "free", KernelSpec("boxcar", (2.0, 3.0)))
    loaded, mode, kernel = read_fit_result(path)
    assert np.array_equal(loaded.weights.omega, result.weights.omega)
    assert loaded.q_value == result.q_value
    assert loaded.evaluations == result.evaluations
    assert loaded.fallback_count == result.fallback_count
    assert loaded.start_index == result.start_index
    assert mode == "free"
    assert kernel == KernelSpec("boxcar", (2.0, 3.0))


def test_predictions_csv_regression(tmp_path):
    path = str(tmp_path / "pred.csv")
    values = np.array([1.5, -0.25])
    write_predictions_csv(path, values, None, np.array([False, True]))
    lines = open(path).read().strip().splitlines()
    assert lines[0] == "index,prediction,fallback"
    assert lines[1] == "0,1.5,0"
    assert lines[2] == "1,-0.25,1"


def test_predictions_csv_classification(tmp_path):
    path = str(tmp_path / "pred.csv")
    posterior = np.array([[0.25, 0.75], [0.5, 0.5]])
    write_predictions_csv(path, None, posterior, np.array([False, False]))
    lines = open(path).read().strip().splitlines()
    assert lines[0] == "index,label,posterior_1,posterior_2,fallback"
    assert lines[1] == "0,2,0.25,0.75,0"
    assert lines[2] == "1,1,0.5,0.5,0"  # tie goes to the lowest label
