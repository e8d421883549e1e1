"""What the solver does with inputs the closed form cannot handle.

Each case raises a named error or sets a flag; none is silently patched.
"""
import numpy as np

from exactsharpe import (
    AssetMoments,
    EqualConsecutiveMeans,
    NotSpd,
    StationaryPointNotMax,
    solve_weights,
)

# Two assets share a mean, a third does not. The recursion divides by the
# gap between neighbouring means, so this is rejected.
try:
    solve_weights(AssetMoments.from_arrays([1.0, 2.0, 2.0], np.eye(3)))
except EqualConsecutiveMeans as exc:
    print("tied means:", exc)

# If every mean is equal, maximizing Q means minimizing variance.
w, trace = solve_weights(AssetMoments.from_arrays([1.0, 1.0], [[1.0, 0.0], [0.0, 3.0]]))
print("all equal:", w, trace.flags)

# A singular covariance matrix is refused at construction.
try:
    AssetMoments.from_arrays([0.1, 0.2], [[0.02, 0.02], [0.02, 0.02]])
except NotSpd as exc:
    print("singular:", exc, exc.diagnostic)

# When 1' omega^-1 mu < 0 the only budget-feasible stationary point is the
# worst portfolio, not the best: Q has no maximum on the budget plane.
m = AssetMoments.from_arrays([-0.1, 0.05], [[0.04, 0.0], [0.0, 0.09]])
try:
    solve_weights(m)
except StationaryPointNotMax as exc:
    print("minimizer:", exc.weights)
    print("candidates:", {k: np.round(v, 4) for k, v in exc.candidates.items()})

# It can still be inspected on request.
w, trace = solve_weights(m, require_max=False)
print("stationary point", w, "is_max", trace.is_max)
