import numpy as np
import pytest

from exactsharpe import (
    AssetMoments,
    DegenerateNormalization,
    grid_search_max,
    kkt_residual,
    pairwise_ratio_check,
    solve_weights,
    tangency_weights,
)
from exactsharpe.oracle import (
    check_solution,
    directional_derivatives,
    grid_step,
    null_space_residual,
    random_instance,
)


def test_kkt_at_example1_optimum(ex1):
    w, _ = solve_weights(ex1)
    k = kkt_residual(w, ex1)
    assert k.norm <= 1e-10
    assert k.residuals.shape == (2,)


def test_kkt_example1_by_hand(ex1):
    # at (0.5, 0.5): f = 0.15, g = 0.0375, omega w = (0.025, 0.05)
    # 2 mu_i g - f g_i = (0.0075 - 0.0075, 0.015 - 0.015) = 0
    k = kkt_residual([0.5, 0.5], ex1)
    assert np.abs(k.residuals).max() <= 1e-17
    assert abs(k.lambda_hat) <= 1e-14


def test_kkt_corner_not_stationary(ex1):
    assert kkt_residual([1.0, 0.0], ex1).norm > 1e-6


def test_kkt_symmetric_exact_zero():
    m = AssetMoments.from_arrays([1.0, 1.0], np.eye(2))
    k = kkt_residual([0.5, 0.5], m)
    np.testing.assert_array_equal(k.residuals, [0.0, 0.0])
    assert k.norm == 0.0


def test_pairwise_ratio_example1(ex1):
    assert pairwise_ratio_check([0.5, 0.5], ex1) <= 1e-12


def test_pairwise_ratio_random(rng):
    for n in range(2, 11):
        for _ in range(20):
            m = random_instance(rng, n)
            w, t = solve_weights(m, require_max=False)
            assert pairwise_ratio_check(w, m) <= 1e-8
            dev = pairwise_ratio_check(t.alpha, m.permuted(t.permutation))
            assert np.isfinite(dev) and dev >= 0


@pytest.mark.parametrize(
    "mu, omega, expected",
    [
        ([0.1, 0.2, 0.3], np.eye(3), [1 / 6, 1 / 3, 1 / 2]),
        ([1.0, 1.0], np.eye(2), [0.5, 0.5]),
        ([0.1, 0.2], [[0.04, 0.01], [0.01, 0.09]], [0.5, 0.5]),
    ],
)
def test_tangency_weights(mu, omega, expected):
    w = tangency_weights(AssetMoments.from_arrays(mu, omega))
    np.testing.assert_allclose(w, expected, atol=1e-15)


def test_tangency_degenerate():
    with pytest.raises(DegenerateNormalization):
        tangency_weights(AssetMoments.from_arrays([1.0, -1.0], np.eye(2)))


def test_grid_search_example1(ex1):
    w_star, _ = solve_weights(ex1)
    q_star = ex1.mu @ w_star / np.sqrt(w_star @ ex1.omega @ w_star)
    w, q = grid_search_max(ex1, 0.5, 10001, center=w_star)
    assert q <= q_star + 1e-9
    assert np.abs(w - [0.5, 0.5]).max() <= 1e-4


def test_grid_search_symmetric():
    m = AssetMoments.from_arrays([1.0, 1.0], np.eye(2))
    w, _ = grid_search_max(m, 0.5, 1001)
    assert np.abs(w - 0.5).max() <= grid_step(0.5, 1001)


def test_grid_search_three_assets():
    m = AssetMoments.from_arrays([0.1, 0.2, 0.3], np.eye(3))
    w, _ = grid_search_max(m, 0.5, 501)
    assert np.abs(w - [1 / 6, 1 / 3, 1 / 2]).max() <= grid_step(0.5, 501)


def test_grid_search_is_deterministic(rng):
    m = random_instance(rng, 3)
    a = grid_search_max(m, 0.5, 301)
    b = grid_search_max(m, 0.5, 301)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


def test_grid_search_rejects_large_n(rng):
    with pytest.raises(ValueError):
        grid_search_max(random_instance(rng, 4), 0.5, 101)


def test_directional_derivatives_vanish_at_optimum(rng):
    for n in (2, 5, 15):
        m = random_instance(rng, n)
        w, _ = solve_weights(m, require_max=False)
        q = m.mu @ w / np.sqrt(w @ m.omega @ w)
        d = directional_derivatives(w, m, 100, rng)
        assert np.abs(d).max() <= 1e-5 * abs(q)


def test_directional_derivative_nonzero_off_optimum(ex1):
    assert np.abs(directional_derivatives([1.0, 0.0], ex1, 10, 0)).max() > 1e-3


def test_null_space_residual(rng):
    m = random_instance(rng, 6)
    w, _ = solve_weights(m, require_max=False)
    assert null_space_residual(w, m) <= 1e-9
    assert null_space_residual(np.full(6, 1 / 6), m) > 1e-6


def test_check_solution_passes_example1(ex1):
    checks = check_solution(ex1, grid_resolution=1001, rng=0)
    names = {c.name: c for c in checks}
    assert not any(c.failed for c in checks)
    assert names["kkt"].value <= 1e-10
    assert names["grid_search"].status == "pass"


def test_check_solution_flags_corner(ex1):
    failed = {c.name for c in check_solution(ex1, [1.0, 0.0], rng=0) if c.failed}
    assert "kkt" in failed and "pairwise_ratio" in failed


def test_check_solution_skips_maximality_for_minimizer():
    m = AssetMoments.from_arrays([-0.1, -0.2], [[0.04, 0.01], [0.01, 0.09]])
    checks = {c.name: c for c in check_solution(m, rng=0)}
    assert checks["dominance"].status == "skip"
    assert checks["grid_search"].status == "skip"
    assert checks["kkt"].status == "pass"


def test_random_instance_recipe():
    rng = np.random.default_rng(0)
    m = random_instance(rng, 6)
    assert np.min(np.diff(np.sort(m.mu))) > 1e-6
    assert np.array_equal(m.omega, m.omega.T)
    assert np.linalg.eigvalsh(m.omega).min() >= 6e-3 * (1 - 1e-9)
