"""Two assets, solved by hand and by the general pipeline.

A bond with mean 0.1 and a stock with mean 0.2, variances 0.04 and 0.09,
covariance 0.01. The best return-to-risk portfolio splits the budget evenly.
"""
import numpy as np

from exactsharpe import (
    AssetMoments,
    min_variance_weights,
    portfolio_metrics,
    solve_weights,
    two_asset_weights,
)

m = AssetMoments.from_arrays([0.1, 0.2], [[0.04, 0.01], [0.01, 0.09]], labels=["bond", "stock"])

# The general solver returns the weights and every intermediate it used.
w, trace = solve_weights(m)
print("weights      ", w)
print("alpha, beta  ", trace.alpha, trace.beta)
print("t*           ", trace.t_star)

# w is alpha moved t* units along the budget-neutral direction beta.
print("alpha + t*beta", trace.alpha + trace.t_star * trace.beta)

# The two-asset formula, written out term by term, agrees.
print("expanded     ", two_asset_weights(m))

# f is the expected return, g the variance, q = f / sqrt(g).
report = portfolio_metrics(w, m)
print(f"f = {report.f:.4f}  g = {report.g:.4f}  Q = {report.q:.10f}")

# Compare with the minimum-variance portfolio: less risk, less return per risk.
w_mv = min_variance_weights(m.omega)
mv = portfolio_metrics(w_mv, m)
print("min variance ", w_mv, f"Q = {mv.q:.6f}")
assert report.q > mv.q

# Q is a ratio of degree-one terms, so doubling every weight changes nothing;
# only the direction of w matters and the budget just fixes its scale.
print("Q(2w) - Q(w) =", portfolio_metrics(2 * w, m).q - report.q)
np.testing.assert_allclose(w, [0.5, 0.5])
