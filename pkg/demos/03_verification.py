"""Auditing a solution with independent oracles.

Every check below avoids the closed-form pipeline: first-order conditions,
finite differences, the tangency formula and a brute-force grid.
"""
import numpy as np

from exactsharpe import (
    AssetMoments,
    check_solution,
    grid_search_max,
    kkt_residual,
    pairwise_ratio_check,
    solve_weights,
)

m = AssetMoments.from_arrays(
    [0.05, 0.09, 0.12],
    [[0.020, 0.004, 0.002],
     [0.004, 0.050, 0.010],
     [0.002, 0.010, 0.090]],
)
w, _ = solve_weights(m)
print("w* =", w)

# At w* the implied Lagrange multiplier is the same for every asset.
# Q does not change when w is scaled, so it is zero here.
k = kkt_residual(w, m)
print("KKT norm", k.norm, "lambda", k.lambda_hat)

# A corner portfolio is far from stationary.
corner = np.array([1.0, 0.0, 0.0])
print("corner KKT norm", kkt_residual(corner, m).norm)
print("corner ratio deviation", pairwise_ratio_check(corner, m))

# Brute force over the budget plane: no grid point beats w*.
w_grid, q_grid = grid_search_max(m, half_width=0.5, resolution=401)
print("grid best", w_grid, q_grid)

# All checks at once, as ``exactsharpe verify`` runs them.
for c in check_solution(m, grid_resolution=401, rng=0):
    value = "" if c.value is None else f"{c.value:.2e}"
    print(f"  {c.name:18s} {c.status:4s} {value}")
