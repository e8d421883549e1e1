"""Exact maximizer of the risk-adjusted return under the budget constraint.

The optimal weights are found without any iterative optimizer:

1. order the assets so the highest and lowest means come last (see
   :func:`solver_order`);
2. build recursion coefficients ``a_i, b_i`` from consecutive means and run
   the backward recursion that spans the null space of the mean-difference
   matrix ``B`` with two basis vectors ``u`` and ``v``;
3. map that basis through ``omega^-1`` and impose the budget, giving a
   feasible point ``alpha`` and a budget-neutral direction ``beta``;
4. move along ``beta`` to the stationary step ``t*`` of
   ``Q(alpha + t beta)``, which is linear in ``t``.

The 2- and 3-asset closed forms are kept as separate, fully expanded
reference implementations for cross-checking.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DegenerateDenominator,
    DegenerateNormalization,
    DimensionMismatch,
    EqualConsecutiveMeans,
    StationaryPointNotMax,
)
from .estimation import min_variance_weights
from .linalg import (
    as_vector, axpy2, diff_of_products2, div2, dots2, quad_form, quad_forms2, solve,
)
from .moments import AssetMoments

RTOL = 1e-12


@dataclass(frozen=True)
class RecursionCoeffs:
    a: NDArray[np.float64]
    b: NDArray[np.float64]


@dataclass(frozen=True)
class PortfolioReport:
    """Expected return ``f``, variance ``g`` and risk-adjusted return ``q = f / sqrt(g)``."""

    f: float
    g: float
    q: float


@dataclass(frozen=True)
class ClosedFormTrace:
    """Every intermediate of the closed-form solve.

    ``coeffs``, ``u``, ``v``, ``alpha`` and ``beta`` are expressed in the
    solver's internal asset order: ``permutation[k]`` is the original index
    of the k-th internal asset. ``weights`` is in the caller's order.

    On the all-means-equal path the recursion is never run, the intermediates
    are None and ``all_means_equal`` is set.
    """

    weights: NDArray[np.float64]
    permutation: NDArray[np.intp]
    coeffs: RecursionCoeffs | None = None
    u: NDArray[np.float64] | None = None
    v: NDArray[np.float64] | None = None
    alpha: NDArray[np.float64] | None = None
    beta: NDArray[np.float64] | None = None
    t_star: float | None = None
    all_means_equal: bool = False
    is_max: bool = True

    @property
    def flags(self) -> list[str]:
        out = []
        if self.all_means_equal:
            out.append("AllMeansEqual")
        if not self.is_max:
            out.append("StationaryPointNotMax")
        return out


def recursion_coefficients(mu: ArrayLike) -> RecursionCoeffs:
    """Coefficients ``a_i, b_i`` of the backward recursion ``z_i = a_i z_{i+1} + b_i z_{i+2}``.

    Raises :class:`EqualConsecutiveMeans` with the (0-based) row index when
    ``mu[i+2]`` and ``mu[i+1]`` coincide to within ``1e-12 * max|mu|``.
    """
    mu = as_vector(mu)
    n = mu.shape[0]
    if n < 2:
        raise DimensionMismatch("at least two assets are required")
    eps = RTOL * float(np.max(np.abs(mu)))
    den = mu[2:] - mu[1:-1]
    bad = np.flatnonzero(np.abs(den) <= eps)
    if bad.size:
        raise EqualConsecutiveMeans(int(bad[0]))
    a = (mu[2:] - mu[:-2]) / den
    b = (mu[:-2] - mu[1:-1]) / den
    return RecursionCoeffs(a, b)


def build_uv(mu: ArrayLike, coeffs: RecursionCoeffs | None = None):
    """Null-space basis ``(u, v)`` of ``B``, with ``u`` ending ``(1, 0)`` and ``v`` ending ``(0, 1)``."""
    mu = as_vector(mu)
    n = mu.shape[0]
    if coeffs is None:
        coeffs = recursion_coefficients(mu)
    u = np.zeros(n)
    v = np.zeros(n)
    u[n - 2] = 1.0
    v[n - 1] = 1.0
    for i in range(n - 3, -1, -1):
        u[i] = coeffs.a[i] * u[i + 1] + coeffs.b[i] * u[i + 2]
        v[i] = coeffs.a[i] * v[i + 1] + coeffs.b[i] * v[i + 2]
    return u, v


def build_B(mu: ArrayLike) -> NDArray[np.float64]:
    """The (n-2) x n banded matrix of mean differences; ``B @ omega @ w = 0`` at every stationary ``w``."""
    mu = as_vector(mu)
    n = mu.shape[0]
    B = np.zeros((max(n - 2, 0), n))
    for i in range(n - 2):
        B[i, i] = mu[i + 2] - mu[i + 1]
        B[i, i + 1] = mu[i] - mu[i + 2]
        B[i, i + 2] = mu[i + 1] - mu[i]
    return B


def compute_alpha_beta(omega: ArrayLike, u: ArrayLike, v: ArrayLike):
    """Budget-feasible point ``alpha`` and budget-neutral direction ``beta``.

    ``alpha = omega^-1 u / sum(omega^-1 u)`` and
    ``beta = omega^-1 v - sum(omega^-1 v) * alpha``.
    """
    omega = np.asarray(omega, dtype=float)
    n = omega.shape[0]
    x = solve(omega, np.column_stack([as_vector(u, n), as_vector(v, n)]))
    xu, xv = x[:, 0], x[:, 1]
    su = math.fsum(xu)
    if abs(su) <= RTOL * np.abs(xu).sum():
        raise DegenerateNormalization("sum(omega^-1 u) vanishes; cannot normalize alpha")
    alpha = xu / su
    beta = xv - math.fsum(xv) * alpha
    return alpha, beta


def compute_t_star(mu: ArrayLike, omega: ArrayLike, alpha: ArrayLike, beta: ArrayLike) -> float:
    """Stationary step ``t*`` of ``Q(alpha + t beta)``, rounded to a float.

    See :func:`t_star_parts`.
    """
    return t_star_parts(mu, omega, alpha, beta)[0]


def t_star_parts(
    mu: ArrayLike, omega: ArrayLike, alpha: ArrayLike, beta: ArrayLike
) -> tuple[float, float]:
    """Stationary step ``t*`` of ``Q(alpha + t beta)``.

    The stationarity condition ``2 f_t g - f g_t = 0`` has no ``t**2`` term,
    so ``t*`` is the root of a linear equation. Raises
    :class:`DegenerateDenominator` when its slope vanishes, i.e. ``Q`` has
    no interior stationary point along ``beta``.

    Returns ``(hi, lo)`` with ``t* ~ hi + lo``.
    """
    mu = as_vector(mu)
    omega = np.asarray(omega, dtype=float)
    alpha = as_vector(alpha, mu.shape[0])
    beta = as_vector(beta, mu.shape[0])
    # Both numerator and denominator cancel heavily when the optimum has
    # large weights, so the scalars are carried in compensated form.
    mb, ma = dots2(np.stack([mu, mu]), np.stack([beta, alpha]))
    aa, ab, bb = quad_forms2(np.stack([alpha, alpha, beta]), omega, np.stack([alpha, beta, beta]))
    den = diff_of_products2(mb, ab, ma, bb)
    if abs(den[0]) <= RTOL * (abs(ma[0]) * bb[0] + abs(mb[0] * ab[0])):
        raise DegenerateDenominator("t* denominator vanishes; Q is monotone along beta")
    num = diff_of_products2(mb, aa, ma, ab)
    hi, lo = div2(num, den)
    return -hi, -lo


def risk_adjusted_return(w: ArrayLike, mu: ArrayLike, omega: ArrayLike) -> float:
    w = np.asarray(w, dtype=float)
    return float(w @ mu) / math.sqrt(float(w @ omega @ w))


def portfolio_metrics(w: ArrayLike, moments: AssetMoments) -> PortfolioReport:
    w = as_vector(w, moments.n)
    f = float(w @ moments.mu)
    g = quad_form(w, moments.omega, w)
    return PortfolioReport(f, g, f / math.sqrt(g))


def _all_means_equal(mu: NDArray[np.float64]) -> bool:
    return float(mu.max() - mu.min()) <= RTOL * float(np.max(np.abs(mu)))


def solver_order(mu: ArrayLike, mv_return: float) -> NDArray[np.intp]:
    """Asset order used internally by :func:`solve_weights`.

    Every tie between means is rejected with :class:`EqualConsecutiveMeans`
    (index into the descending sort) unless all means are tied.

    The closed-form intermediates depend only on the last two assets of the
    order: ``u`` and ``v`` scale like ``1 / (mu[n-2] - mu[n-1])`` and
    ``alpha``, ``beta`` like ``1 / (mv_return - mu[n-1])``, where
    ``mv_return`` is the expected return of the minimum-variance portfolio.
    The highest and lowest means therefore go last, with the one farther
    from ``mv_return`` in the final slot; the rest keep descending order.
    """
    mu = as_vector(mu)
    desc = np.argsort(-mu, kind="stable")
    eps = RTOL * float(np.max(np.abs(mu)))
    ties = np.flatnonzero(np.abs(np.diff(mu[desc])) <= eps)
    if ties.size:
        k = int(ties[0])
        raise EqualConsecutiveMeans(
            k, f"assets {int(desc[k])} and {int(desc[k + 1])} have equal expected returns"
        )
    hi, lo = desc[0], desc[-1]
    if abs(mu[hi] - mv_return) >= abs(mu[lo] - mv_return):
        tail = [lo, hi]
    else:
        tail = [hi, lo]
    return np.concatenate([desc[1:-1], tail])


def _restore_budget(w: NDArray[np.float64]) -> None:
    """Put ``w`` back on the budget plane, in place.

    ``Q`` is invariant to scaling, so dividing by the sum removes drift
    without turning the portfolio; the last ulp of residual then goes to the
    smallest weight.
    """
    w /= math.fsum(w)
    k = int(np.argmin(np.abs(w)))
    w[k] -= math.fsum(w) - 1.0


def solve_weights(moments: AssetMoments, *, require_max: bool = True):
    """Weights maximizing ``Q(w) = mu'w / sqrt(w' omega w)`` subject to ``sum(w) = 1``.

    Short positions are allowed. Returns ``(weights, trace)``.

    When every mean is equal, ``Q`` is proportional to ``1 / sqrt(g)`` on the
    budget plane and the minimum-variance portfolio is returned with the
    ``AllMeansEqual`` flag.

    The closed form only imposes first-order conditions. If the stationary
    point does not beat both ``alpha`` and the minimum-variance portfolio
    (this happens when ``1' omega^-1 mu < 0``) it is a minimizer of ``Q``;
    with ``require_max`` a :class:`StationaryPointNotMax` is raised,
    otherwise it is returned with ``trace.is_max`` False.

    Raises
    ------
    EqualConsecutiveMeans
        Some, but not all, means are tied.
    DegenerateNormalization, DegenerateDenominator
        The closed form has a vanishing denominator for this input.
    StationaryPointNotMax
        See above.
    """
    mu, omega = moments.mu, moments.omega
    n = moments.n
    w_mv = min_variance_weights(omega)
    if _all_means_equal(mu):
        return w_mv, ClosedFormTrace(
            weights=w_mv, permutation=np.argsort(-mu, kind="stable"), all_means_equal=True
        )
    order = solver_order(mu, float(w_mv @ mu))

    mu_s = mu[order]
    omega_s = omega[np.ix_(order, order)]
    coeffs = recursion_coefficients(mu_s)
    u, v = build_uv(mu_s, coeffs)
    alpha, beta = compute_alpha_beta(omega_s, u, v)
    t_star, t_lo = t_star_parts(mu_s, omega_s, alpha, beta)
    w = np.empty(n)
    w[order] = axpy2(alpha, (t_star, t_lo), beta)
    _restore_budget(w)

    q = risk_adjusted_return(w, mu, omega)
    rivals = {
        "alpha": risk_adjusted_return(alpha, mu_s, omega_s),
        "min_variance": risk_adjusted_return(w_mv, mu, omega),
    }
    is_max = q >= max(rivals.values()) - RTOL * max(1.0, abs(q))
    trace = ClosedFormTrace(
        weights=w, permutation=order, coeffs=coeffs, u=u, v=v,
        alpha=alpha, beta=beta, t_star=t_star, is_max=is_max,
    )
    if require_max and not is_max:
        alpha_orig = np.empty(n)
        alpha_orig[order] = alpha
        raise StationaryPointNotMax(
            f"stationary point has Q = {q!r}, below "
            f"max(Q(alpha), Q(min_variance)) = {max(rivals.values())!r}; "
            "it minimizes the risk-adjusted return",
            weights=w,
            candidates={"alpha": alpha_orig, "min_variance": w_mv},
            trace=trace,
        )
    return w, trace


def _exact(a):
    """Floats as integers sharing one power-of-two scale.

    The expanded formulas are ratios of homogeneous polynomials of equal
    degree, so the common scale cancels and integer arithmetic is exact.
    """
    a = np.asarray(a, dtype=float)
    ratios = [x.as_integer_ratio() for x in a.ravel().tolist()]
    scale = max(d for _, d in ratios)
    ints = [num * (scale // d) for num, d in ratios]
    return np.array(ints, dtype=object).reshape(a.shape).tolist()


def _check_den(den: int, scale: int) -> None:
    if abs(den) <= RTOL * scale:
        raise DegenerateDenominator("closed-form denominator vanishes")


def two_asset_weights(moments: AssetMoments) -> NDArray[np.float64]:
    """Expanded two-asset solution, written out term by term.

    Evaluated in exact rational arithmetic and rounded once, so it serves
    as an accurate reference even for nearly degenerate inputs.
    """
    if moments.n != 2:
        raise DimensionMismatch("two_asset_weights needs exactly 2 assets")
    m1, m2 = _exact(moments.mu)
    S = _exact(moments.omega)
    s11, s12, s22 = S[0][0], S[0][1], S[1][1]
    den = m1 * (s22 - s12) + m2 * (s11 - s12)
    _check_den(den, abs(m1) * (abs(s22) + abs(s12)) + abs(m2) * (abs(s11) + abs(s12)))
    return np.array([float((m1 * s22 - m2 * s12) / den), float((m2 * s11 - m1 * s12) / den)])


def three_asset_weights(moments: AssetMoments) -> NDArray[np.float64]:
    """Expanded three-asset solution with the common denominator ``delta``.

    Evaluated exactly, like :func:`two_asset_weights`.
    """
    if moments.n != 3:
        raise DimensionMismatch("three_asset_weights needs exactly 3 assets")
    m1, m2, m3 = _exact(moments.mu)
    S = _exact(moments.omega)
    s11, s12, s13 = S[0][0], S[0][1], S[0][2]
    s22, s23, s33 = S[1][1], S[1][2], S[2][2]

    n1 = (m3 * (s13 * s22 - s12 * s23)
          + m2 * (s12 * s33 - s13 * s23)
          + m1 * (s23 ** 2 - s22 * s33))
    n2 = (m3 * (s11 * s23 - s12 * s13)
          + m2 * (s13 ** 2 - s11 * s33)
          + m1 * (s12 * s33 - s13 * s23))
    n3 = (m3 * (s12 ** 2 - s11 * s22)
          + m2 * (s11 * s23 - s12 * s13)
          + m1 * (s13 * s22 - s12 * s23))
    delta = (m3 * (s12 ** 2 - (s13 + s23) * s12 + (s13 - s11) * s22 + s11 * s23)
             + m2 * (-s13 * (s12 - s13 + s23) + s11 * (s23 - s33) + s12 * s33)
             + m1 * (s13 * (s22 - s23) + s23 * (s23 - s12) + (s12 - s22) * s33))
    scale = (abs(m1) + abs(m2) + abs(m3)) * max(abs(x) for row in S for x in row) ** 2
    _check_den(delta, scale)
    return np.array([float(n1 / delta), float(n2 / delta), float(n3 / delta)])
