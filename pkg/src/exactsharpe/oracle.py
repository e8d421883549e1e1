"""Independent checks on a candidate optimum.

None of these routines use the closed-form machinery: the first-order
conditions are evaluated directly from ``f = mu'w`` and ``g = w' omega w``,
the tangency portfolio comes from a single linear solve, and the grid search
is plain enumeration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .closed_form import build_B, risk_adjusted_return, solve_weights
from .errors import DegenerateDenominator, DegenerateNormalization, DimensionMismatch
from .estimation import min_variance_weights
from .linalg import as_vector, solve
from .moments import AssetMoments

RTOL = 1e-12


@dataclass(frozen=True)
class KktResidual:
    """Implied multiplier and per-asset violation of ``2 f_i g - f g_i = 2 g^1.5 lambda``."""

    lambda_hat: float
    residuals: NDArray[np.float64]
    norm: float


def kkt_residual(w: ArrayLike, moments: AssetMoments) -> KktResidual:
    """First-order residuals of the Lagrangian ``Q(w) - lambda (sum(w) - 1)``.

    With ``f_i = mu_i`` and ``g_i = 2 (omega w)_i`` the left-hand side
    ``2 f_i g - f g_i`` must be the same for every asset at a stationary
    point. ``lambda_hat`` is its mean divided by ``2 g^1.5``, so the
    residuals measure only the spread across assets. ``norm`` is the largest
    residual relative to ``2 g^1.5 |lambda_hat| + |f| * max|g_i|``.
    """
    w = as_vector(w, moments.n)
    mu, omega = moments.mu, moments.omega
    f = float(mu @ w)
    grad_g = 2.0 * (omega @ w)
    g = float(w @ omega @ w)
    lhs = 2.0 * mu * g - f * grad_g
    g32 = 2.0 * g ** 1.5
    lam = float(np.mean(lhs)) / g32
    residuals = lhs - g32 * lam
    scale = g32 * abs(lam) + abs(f) * float(np.max(np.abs(grad_g)))
    peak = float(np.max(np.abs(residuals)))
    return KktResidual(lam, residuals, peak / scale if scale > 0 else peak)


def pairwise_ratio_check(w: ArrayLike, moments: AssetMoments) -> float:
    """Largest relative gap between ``(g_{i+1} - g_i) / (f_{i+1} - f_i)`` and ``2 g / f``.

    Assets are taken in descending order of mean. The consecutive ratios all
    equal ``2 g / f`` at a stationary point.
    """
    w = as_vector(w, moments.n)
    mu, omega = moments.mu, moments.omega
    order = np.argsort(-mu, kind="stable")
    f = float(mu @ w)
    g = float(w @ omega @ w)
    if abs(f) <= RTOL * float(np.abs(mu * w).sum()):
        raise DegenerateDenominator("portfolio expected return is zero")
    df = np.diff(mu[order])
    if np.any(np.abs(df) <= RTOL * float(np.max(np.abs(mu)))):
        raise DegenerateDenominator("two assets have equal expected returns")
    dg = np.diff(2.0 * (omega @ w)[order])
    target = 2.0 * g / f
    return float(np.max(np.abs(dg / df - target)) / abs(target))


def tangency_weights(moments: AssetMoments) -> NDArray[np.float64]:
    """Classical tangency portfolio ``omega^-1 mu / sum(omega^-1 mu)``."""
    x = solve(moments.omega, moments.mu)
    s = math.fsum(x)
    if abs(s) <= RTOL * float(np.abs(x).sum()):
        raise DegenerateNormalization("sum(omega^-1 mu) vanishes")
    return x / s


def _q_on_grid(moments: AssetMoments, axes: list[NDArray[np.float64]]):
    """Q evaluated on the tensor grid of the first n-1 weights; the last one closes the budget."""
    mu, omega = moments.mu, moments.omega
    mesh = np.meshgrid(*axes, indexing="ij")
    cols = [m.ravel() for m in mesh]
    cols.append(1.0 - np.sum(cols, axis=0))
    W = np.stack(cols, axis=1)
    f = W @ mu
    g = np.einsum("ki,ij,kj->k", W, omega, W)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(g > 0, f / np.sqrt(np.maximum(g, 0.0)), -np.inf)
    return W, q


def grid_search_max(
    moments: AssetMoments,
    half_width: float,
    resolution: int,
    center: ArrayLike | None = None,
    fixed_box: tuple[float, float] = (-2.0, 3.0),
):
    """Brute-force maximum of Q over the budget plane, for 2 or 3 assets.

    Two uniform grids of ``resolution`` points per free axis are swept: a box
    of ``+-half_width`` around ``center`` (default: the tangency portfolio) and
    the fixed box ``fixed_box`` on every free axis. Returns the best grid
    point and its Q; ties go to the first point in lexicographic grid order,
    the centered box first.
    """
    n = moments.n
    if n not in (2, 3):
        raise DimensionMismatch("grid search supports 2 or 3 assets")
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    if center is None:
        center = tangency_weights(moments)
    center = as_vector(center, n)
    boxes = [
        [np.linspace(c - half_width, c + half_width, resolution) for c in center[:-1]],
        [np.linspace(*fixed_box, resolution) for _ in range(n - 1)],
    ]
    best_w, best_q = None, -np.inf
    for axes in boxes:
        W, q = _q_on_grid(moments, axes)
        k = int(np.argmax(q))
        if q[k] > best_q:
            best_w, best_q = W[k].copy(), float(q[k])
    return best_w, best_q


def grid_step(half_width: float, resolution: int, fixed_box=(-2.0, 3.0)) -> float:
    """Coarsest spacing among the two boxes swept by :func:`grid_search_max`."""
    return max(2.0 * half_width, fixed_box[1] - fixed_box[0]) / (resolution - 1)


def directional_derivatives(
    w: ArrayLike, moments: AssetMoments, n_directions: int = 100, rng=None
) -> NDArray[np.float64]:
    """Central-difference derivatives of Q along random budget-neutral directions.

    Each direction has zero sum and unit max-norm; the step is
    ``1e-6 * max|w|``.
    """
    w = as_vector(w, moments.n)
    rng = np.random.default_rng(rng)
    mu, omega = moments.mu, moments.omega

    def q(x):
        return float(mu @ x) / math.sqrt(float(x @ omega @ x))

    h = 1e-6 * float(np.max(np.abs(w)))
    out = np.empty(n_directions)
    for k in range(n_directions):
        d = rng.standard_normal(moments.n)
        d -= d.mean()
        d /= np.max(np.abs(d))
        out[k] = (q(w + h * d) - q(w - h * d)) / (2.0 * h)
    return out


def random_instance(rng: np.random.Generator, n: int, eps: float = 1e-3) -> AssetMoments:
    """Well-conditioned random test problem.

    ``omega = A'A + n * eps * I`` with standard normal ``A``; ``mu`` is standard
    normal, redrawn until sorted neighbours differ by more than ``1e-6``.
    """
    A = rng.standard_normal((n, n))
    omega = A.T @ A + n * eps * np.eye(n)
    omega = np.triu(omega) + np.triu(omega, 1).T
    while True:
        mu = rng.standard_normal(n)
        if np.min(np.diff(np.sort(mu))) > 1e-6:
            return AssetMoments(mu, omega)


# Tolerances used by check_solution; each one is a pass/fail threshold.
TOL_BUDGET = 1e-12
TOL_NULL_SPACE = 1e-9
TOL_BASIS = 1e-10
TOL_KKT = 1e-8
TOL_RATIO = 1e-8
TOL_TANGENCY = 1e-8
TOL_FD = 1e-5
TOL_DOMINANCE = 1e-12
TOL_GRID = 1e-6


@dataclass(frozen=True)
class Check:
    name: str
    status: str  # "pass", "fail" or "skip"
    value: float | None = None
    tolerance: float | None = None
    note: str = ""

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def _check(name, value, tol, note=""):
    ok = bool(np.isfinite(value) and value <= tol)
    return Check(name, "pass" if ok else "fail", float(value), tol, note)


def null_space_residual(w: ArrayLike, moments: AssetMoments) -> float:
    """``|B omega w|_inf / (|B|_inf |omega|_inf |w|_inf)`` with ``B`` in the caller's asset order."""
    w = as_vector(w, moments.n)
    B = build_B(moments.mu)
    scale = (np.abs(B).sum(axis=1).max() * np.abs(moments.omega).sum(axis=1).max()
             * np.abs(w).max())
    return float(np.abs(B @ (moments.omega @ w)).max() / scale)


def check_solution(
    moments: AssetMoments,
    weights: ArrayLike | None = None,
    *,
    grid_resolution: int = 1001,
    grid_half_width: float = 0.5,
    fd_directions: int = 100,
    rng=None,
) -> list[Check]:
    """Run every applicable oracle against the closed-form solution.

    ``weights`` replaces the solver output in the weight-dependent checks,
    which is how a suspect portfolio is audited. Checks that presuppose a
    maximum (dominance, grid search) are skipped when the stationary point
    is a minimizer of Q; the grid search also needs n <= 3.
    """
    rng = np.random.default_rng(rng)
    w_star, trace = solve_weights(moments, require_max=False)
    w = w_star if weights is None else as_vector(weights, moments.n)
    mu, omega = moments.mu, moments.omega
    checks = [_check("budget", abs(math.fsum(w) - 1.0), TOL_BUDGET)]

    if trace.all_means_equal:
        note = "all means equal: minimum-variance fallback"
        checks.append(Check("structure", "skip", note=note))
    else:
        c = trace.coeffs
        ab = (float(np.max(np.abs(c.a + c.b - 1.0) / (np.abs(c.a) + np.abs(c.b))))
              if c.a.size else 0.0)
        checks.append(_check("alpha_budget", abs(math.fsum(trace.alpha) - 1.0), TOL_BUDGET))
        checks.append(_check("beta_budget", abs(math.fsum(trace.beta)), TOL_BUDGET))
        checks.append(_check("recursion_coeffs", ab, TOL_BUDGET, "|a+b-1| / (|a|+|b|)"))
        if moments.n >= 3:
            B = build_B(mu[trace.permutation])
            nb = np.abs(B).sum(axis=1).max()
            basis = max(np.abs(B @ trace.u).max() / (nb * np.abs(trace.u).max()),
                        np.abs(B @ trace.v).max() / (nb * np.abs(trace.v).max()))
            checks.append(_check("null_space_basis", basis, TOL_BASIS))

    if moments.n >= 3:
        checks.append(_check("null_space", null_space_residual(w, moments), TOL_NULL_SPACE))

    checks.append(_check("kkt", kkt_residual(w, moments).norm, TOL_KKT))
    try:
        checks.append(_check("pairwise_ratio", pairwise_ratio_check(w, moments), TOL_RATIO))
    except DegenerateDenominator as exc:
        checks.append(Check("pairwise_ratio", "skip", note=str(exc)))

    if trace.all_means_equal:
        checks.append(Check("tangency", "skip", note="all means equal"))
    else:
        try:
            t = tangency_weights(moments)
            checks.append(_check("tangency", float(np.max(np.abs(w - t))), TOL_TANGENCY))
        except DegenerateNormalization as exc:
            checks.append(Check("tangency", "skip", note=str(exc)))

    q = risk_adjusted_return(w, mu, omega)
    d = directional_derivatives(w, moments, fd_directions, rng)
    checks.append(_check("finite_difference", float(np.max(np.abs(d))) / abs(q), TOL_FD,
                         "max |dQ/dd| / |Q|"))

    if not trace.is_max:
        note = "stationary point minimizes Q"
        checks.append(Check("dominance", "skip", note=note))
        if moments.n <= 3:
            checks.append(Check("grid_search", "skip", note=note))
        return checks

    q_mv = risk_adjusted_return(min_variance_weights(omega), mu, omega)
    gap = q_mv - q
    if trace.all_means_equal:
        checks.append(_check("dominance", abs(gap), 1e-9, "fallback: Q equals min-variance Q"))
    else:
        checks.append(_check("dominance", gap, TOL_DOMINANCE, "Q(min_variance) - Q(w)"))
    if moments.n <= 3:
        _, q_best = grid_search_max(moments, grid_half_width, grid_resolution, center=w)
        checks.append(_check("grid_search", q_best - q, TOL_GRID * max(1.0, abs(q)),
                             "best grid Q - Q(w)"))
    return checks
