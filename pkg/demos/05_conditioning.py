"""Accuracy when the optimum is almost undefined.

As 1' omega^-1 mu approaches zero the optimal weights grow without bound,
and the step t* is a difference of nearly equal products. The solver keeps
those scalars in compensated (roughly double-double) arithmetic, so the
error stays near what the input rounding alone would cause.
"""
from fractions import Fraction

import numpy as np

from exactsharpe import AssetMoments, solve_weights, tangency_weights

omega = np.array([[0.9223605398863177, 0.5915622443638522],
                  [0.5915622443638522, 1.0348876225875998]])
mu = np.array([0.41569297324030163, -0.5555106657354365])
m = AssetMoments.from_arrays(mu, omega)


def exact_tangency(mu, omega):
    """omega^-1 mu / sum(omega^-1 mu) in rational arithmetic (2x2 only)."""
    (a, b), (_, d) = [[Fraction(x) for x in row] for row in omega.tolist()]
    m1, m2 = (Fraction(x) for x in mu.tolist())
    p = (d * m1 - b * m2, a * m2 - b * m1)
    s = p[0] + p[1]
    return np.array([float(p[0] / s), float(p[1] / s)])


w, _ = solve_weights(m, require_max=False)
exact = exact_tangency(mu, omega)
print("weights        ", w)
print("error, solver  ", np.abs(w - exact).max())
print("error, tangency", np.abs(tangency_weights(m) - exact).max())
