"""Distance measures: L2 between curves, discrete and ordinal between labels."""

import numpy as np
import pytest

from mixkernel import (
    CardinalityMismatchError,
    CategoryValue,
    Curve,
    GridMismatchError,
    discrete_distance,
    l2_distance,
    ordinal_distance,
)
from mixkernel.distances import categorical_distance_rows, l2_distance_rows

from helpers import constant_curve, unit_grid


def test_l2_identity_of_indiscernibles():
    rng = np.random.default_rng(0)
    g = unit_grid(20)
    c = Curve(g, rng.normal(size=g.count))
    assert l2_distance(c, c) == 0.0


def test_l2_constant_difference_unit_domain():
    g = unit_grid(30)
    assert l2_distance(constant_curve(0.0, g), constant_curve(1.0, g)) == pytest.approx(
        1.0, rel=1e-12
    )


def test_l2_identity_vs_zero_closed_form():
    # sqrt of the integral of t^2 over [0, 1] is 1/sqrt(3)
    g = unit_grid(2001)
    f = Curve(g, g.points())
    zero = constant_curve(0.0, g)
    assert l2_distance(f, zero) == pytest.approx(1.0 / np.sqrt(3.0), abs=2e-4)


def test_l2_grid_mismatch():
    with pytest.raises(GridMismatchError):
        l2_distance(
            constant_curve(1.0, unit_grid(4)), constant_curve(1.0, unit_grid(5))
        )


def test_l2_axioms_randomized():
    rng = np.random.default_rng(77)
    g = unit_grid(17)
    for _ in range(300):
        a = Curve(g, rng.normal(size=g.count))
        b = Curve(g, rng.normal(size=g.count))
        c = Curve(g, rng.normal(size=g.count))
        assert l2_distance(a, b) == l2_distance(b, a)
        assert l2_distance(a, a) == 0.0
        assert l2_distance(a, c) <= l2_distance(a, b) + l2_distance(b, c) + 1e-9


def test_discrete_distance_cases():
    assert discrete_distance(CategoryValue(1, 2), CategoryValue(1, 2)) == 0.0
    assert discrete_distance(CategoryValue(1, 2), CategoryValue(2, 2)) == 1.0
    assert discrete_distance(CategoryValue(3, 5), CategoryValue(3, 5)) == 0.0


def test_ordinal_distance_cases():
    assert ordinal_distance(CategoryValue(2, 4), CategoryValue(2, 4)) == 0.0
    assert ordinal_distance(CategoryValue(1, 4), CategoryValue(3, 4)) == 2.0
    assert ordinal_distance(CategoryValue(5, 5), CategoryValue(1, 5)) == 4.0
    assert ordinal_distance(CategoryValue(1, 5), CategoryValue(5, 5)) == 4.0


def test_cardinality_mismatch():
    with pytest.raises(CardinalityMismatchError):
        discrete_distance(CategoryValue(1, 2), CategoryValue(1, 3))
    with pytest.raises(CardinalityMismatchError):
        ordinal_distance(CategoryValue(1, 2), CategoryValue(1, 3))


def test_categorical_distances_zero_or_at_least_one():
    rng = np.random.default_rng(13)
    for _ in range(200):
        card = int(rng.integers(2, 7))
        a = CategoryValue(int(rng.integers(1, card + 1)), card)
        b = CategoryValue(int(rng.integers(1, card + 1)), card)
        for dist in (discrete_distance, ordinal_distance):
            d = dist(a, b)
            assert d == 0.0 or d >= 1.0


def test_category_value_validation():
    with pytest.raises(ValueError):
        CategoryValue(0, 3)
    with pytest.raises(ValueError):
        CategoryValue(4, 3)
    with pytest.raises(ValueError):
        CategoryValue(1, 1)


def test_l2_matrix_matches_pairwise_calls_bitwise():
    rng = np.random.default_rng(42)
    g = unit_grid(25)
    a = rng.normal(size=(40, g.count))
    b = rng.normal(size=(7, g.count))
    D = l2_distance_rows(a, b, g)
    for i in range(a.shape[0]):
        for j in range(b.shape[0]):
            expected = l2_distance(Curve(g, a[i]), Curve(g, b[j]))
            assert D[i, j] == expected


def test_categorical_matrix_matches_scalar_calls():
    rng = np.random.default_rng(43)
    card = 4
    a = rng.integers(1, card + 1, size=12)
    b = rng.integers(1, card + 1, size=9)
    for kind, dist in (("discrete", discrete_distance), ("ordinal", ordinal_distance)):
        D = categorical_distance_rows(a, b, kind)
        for i in range(a.size):
            for j in range(b.size):
                assert D[i, j] == dist(
                    CategoryValue(int(a[i]), card), CategoryValue(int(b[j]), card)
                )
