import numpy as np
import pytest

from exactsharpe import DimensionMismatch, NotSpd, ReturnSeries, estimate_moments, min_variance_weights
from exactsharpe.estimation import sample_moments

from conftest import random_spd


def test_perfectly_correlated_pair_is_rejected():
    series = ReturnSeries(("a", "b"), [[0.1, 0.2], [0.3, 0.4]])
    mu, cov = sample_moments(series.returns)
    np.testing.assert_allclose(mu, [0.2, 0.3], rtol=1e-15)
    np.testing.assert_allclose(cov, [[0.02, 0.02], [0.02, 0.02]], rtol=1e-12)
    with pytest.raises(NotSpd) as info:
        estimate_moments(series)
    assert info.value.diagnostic["periods"] == 2


def test_constant_column_is_rejected():
    series = ReturnSeries(("a", "b"), [[0.1, 0.01], [0.3, 0.01], [-0.2, 0.01]])
    with pytest.raises(NotSpd) as info:
        estimate_moments(series)
    assert info.value.diagnostic["zero_variance_assets"] == ["b"]


def test_hand_computed_covariance():
    series = ReturnSeries(("a", "b"), [[0.1, 0.0], [-0.1, 0.0], [0.0, 0.1], [0.0, -0.1]])
    m = estimate_moments(series)
    np.testing.assert_array_equal(m.mu, [0.0, 0.0])
    # sum of squares 0.02 over T - 1 = 3
    np.testing.assert_allclose(m.omega, np.diag([0.02 / 3, 0.02 / 3]), rtol=1e-15)
    assert m.labels == ("a", "b")


def test_matches_numpy_cov(rng):
    r = rng.standard_normal((50, 6)) * 0.02
    m = estimate_moments(ReturnSeries(tuple("abcdef"), r))
    np.testing.assert_allclose(m.omega, np.cov(r, rowvar=False), rtol=1e-12)
    np.testing.assert_allclose(m.mu, r.mean(axis=0), rtol=1e-12)
    assert np.array_equal(m.omega, m.omega.T)


@pytest.mark.parametrize(
    "names, data",
    [
        (("a",), [[0.1], [0.2]]),
        (("a", "b"), [[0.1, 0.2]]),
        (("a", "a"), [[0.1, 0.2], [0.2, 0.1]]),
        (("a", "b"), [[0.1, np.nan], [0.2, 0.1]]),
    ],
)
def test_invalid_series(names, data):
    with pytest.raises(DimensionMismatch):
        ReturnSeries(names, data)


@pytest.mark.parametrize(
    "omega, expected",
    [
        (np.eye(2), [0.5, 0.5]),
        (np.diag([0.04, 0.09]), [9 / 13, 4 / 13]),
        ([[0.04, 0.01], [0.01, 0.09]], [8 / 11, 3 / 11]),
    ],
)
def test_min_variance_weights(omega, expected):
    w = min_variance_weights(omega)
    np.testing.assert_allclose(w, expected, rtol=1e-14)
    grad = np.asarray(omega) @ w
    assert np.ptp(grad) <= 1e-9 * np.abs(grad).max()


def test_min_variance_beats_random_budget_portfolios(rng):
    for n in (2, 4, 9):
        omega = random_spd(rng, n)
        w = min_variance_weights(omega)
        g_min = w @ omega @ w
        others = rng.standard_normal((1000, n))
        others += (1.0 - others.sum(axis=1, keepdims=True)) / n
        g = np.einsum("ki,ij,kj->k", others, omega, others)
        assert np.all(g_min <= g + 1e-12)
