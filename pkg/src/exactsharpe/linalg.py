"""Small dense symmetric linear algebra used by the solver.

Covariance matrices are factorized with Cholesky; a failed or nearly
singular factorization is reported as :class:`NotSpd` rather than patched
with regularization.
"""
from __future__ import annotations

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .errors import DimensionMismatch, NotSpd

PIVOT_RTOL = 1e-12


def as_sym_matrix(omega: ArrayLike) -> NDArray[np.float64]:
    """Return ``omega`` as a float array, requiring exact symmetry and n >= 2."""
    omega = np.array(omega, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
        raise DimensionMismatch(f"covariance must be square, got shape {omega.shape}")
    if omega.shape[0] < 2:
        raise DimensionMismatch("at least two assets are required")
    if not np.all(np.isfinite(omega)):
        raise NotSpd("covariance contains non-finite entries")
    if not np.array_equal(omega, omega.T):
        raise NotSpd("covariance matrix is not exactly symmetric")
    omega.setflags(write=False)
    return omega


def as_vector(x: ArrayLike, n: int | None = None) -> NDArray[np.float64]:
    x = np.array(x, dtype=float)
    if x.ndim != 1:
        raise DimensionMismatch(f"expected a vector, got shape {x.shape}")
    if n is not None and x.shape[0] != n:
        raise DimensionMismatch(f"expected length {n}, got {x.shape[0]}")
    return x


def _factor(omega: NDArray[np.float64]):
    """Cholesky factor plus the smallest pivot relative to the threshold.

    Returns ``(factor, min_pivot, threshold)``; ``factor`` is None when LAPACK
    rejects the matrix outright.
    """
    threshold = PIVOT_RTOL * float(np.max(np.diag(omega)))
    try:
        factor = cho_factor(omega, lower=True, check_finite=False)
    except LinAlgError:
        return None, float("nan"), threshold
    pivots = np.diag(factor[0]) ** 2
    return factor, float(pivots.min()), threshold


def check_spd(omega: ArrayLike) -> bool:
    """True iff every Cholesky pivot exceeds ``1e-12 * max(diag(omega))``.

    The threshold is relative, so rescaling returns (percent vs decimal)
    does not change the verdict.
    """
    omega = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(omega)) or np.max(np.diag(omega)) <= 0:
        return False
    factor, min_pivot, threshold = _factor(omega)
    return factor is not None and min_pivot > threshold


def cholesky(omega: ArrayLike):
    """Factorize ``omega`` or raise :class:`NotSpd` with the failing pivot."""
    omega = np.asarray(omega, dtype=float)
    if np.max(np.diag(omega)) <= 0:
        raise NotSpd("covariance has no positive diagonal entry",
                     {"max_diagonal": float(np.max(np.diag(omega)))})
    factor, min_pivot, threshold = _factor(omega)
    if factor is None or not min_pivot > threshold:
        raise NotSpd(
            "covariance matrix is not symmetric positive definite",
            {"min_pivot": min_pivot if factor is not None else None,
             "pivot_threshold": threshold},
        )
    return factor


def solve(omega: ArrayLike, b: ArrayLike) -> NDArray[np.float64]:
    """Solve ``omega @ x = b`` for SPD ``omega``.

    ``b`` may be a vector or an (n, k) block of right-hand sides.
    """
    omega = np.asarray(omega, dtype=float)
    b = np.asarray(b, dtype=float)
    if omega.ndim != 2 or omega.shape[0] != omega.shape[1] or b.shape[0] != omega.shape[0]:
        raise DimensionMismatch(f"cannot solve {omega.shape} system with rhs {b.shape}")
    return cho_solve(cholesky(omega), b, check_finite=False)


def quad_form(x: ArrayLike, omega: ArrayLike, y: ArrayLike) -> float:
    """Bilinear form ``x' omega y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    omega = np.asarray(omega, dtype=float)
    if omega.ndim != 2 or x.shape != (omega.shape[0],) or y.shape != (omega.shape[1],):
        raise DimensionMismatch(
            f"quad_form shapes incompatible: {x.shape}, {omega.shape}, {y.shape}"
        )
    return float(x @ omega @ y)


# Compensated (roughly double-double) reductions. Products are split exactly
# into value + rounding error and the pieces summed with math.fsum, so the
# result is accurate even when the sum cancels heavily.

_SPLITTER = 134217729.0  # 2**27 + 1


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """``(p, e)`` with ``p = fl(a * b)`` and ``p + e == a * b`` exactly (elementwise)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def _hi_lo(terms) -> tuple[float, float]:
    terms = np.ravel(terms).tolist()
    hi = math.fsum(terms)
    terms.append(-hi)
    return hi, math.fsum(terms)


def dot2(x: ArrayLike, y: ArrayLike) -> tuple[float, float]:
    """``x . y`` as an unevaluated sum ``hi + lo``."""
    return dots2(np.atleast_2d(x), np.atleast_2d(y))[0]


def dots2(xs: ArrayLike, ys: ArrayLike) -> list[tuple[float, float]]:
    """Row-wise :func:`dot2` for stacked vectors."""
    p, e = two_prod(xs, ys)
    # the error terms are ~2**-53 of the products; plain summation suffices
    tails = e.sum(axis=-1)
    return [_hi_lo(np.append(p[k], tails[k])) for k in range(p.shape[0])]


def quad_form2(x: ArrayLike, omega: ArrayLike, y: ArrayLike) -> tuple[float, float]:
    """``x' omega y`` as an unevaluated sum ``hi + lo``."""
    return quad_forms2(np.atleast_2d(x), omega, np.atleast_2d(y))[0]


def quad_forms2(xs: ArrayLike, omega: ArrayLike, ys: ArrayLike) -> list[tuple[float, float]]:
    """:func:`quad_form2` for each row pair of ``xs`` and ``ys``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    p, e = two_prod(xs[:, :, None], np.asarray(omega, dtype=float)[None])
    p2, e2 = two_prod(p, ys[:, None, :])
    tails = (e2 + e * ys[:, None, :]).sum(axis=(1, 2))
    return [_hi_lo(np.append(p2[k].ravel(), tails[k])) for k in range(xs.shape[0])]


def diff_of_products2(a, b, c, d) -> tuple[float, float]:
    """``a*b - c*d`` for ``hi + lo`` pairs, keeping the cancellation accurate."""
    terms = []
    for (h1, l1), (h2, l2), sign in ((a, b, 1.0), (c, d, -1.0)):
        p, e = _two_prod_scalar(h1, h2)
        terms += [sign * p, sign * e, sign * h1 * l2, sign * l1 * h2, sign * l1 * l2]
    hi = math.fsum(terms)
    terms.append(-hi)
    return hi, math.fsum(terms)


def _two_prod_scalar(a: float, b: float) -> tuple[float, float]:
    p = a * b
    c = _SPLITTER * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLITTER * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def div2(num: tuple[float, float], den: tuple[float, float]) -> tuple[float, float]:
    """``num / den`` for ``hi + lo`` pairs."""
    hi = num[0] / den[0]
    p, e = _two_prod_scalar(hi, den[0])
    rem = math.fsum([num[0], num[1], -p, -e, -hi * den[1]])
    return hi, rem / den[0]


def axpy2(y: ArrayLike, a: tuple[float, float], x: ArrayLike) -> NDArray[np.float64]:
    """``y + a x`` rounded once per component, with ``a`` a ``hi + lo`` pair."""
    y = np.asarray(y, dtype=float)
    p, e = two_prod(a[0], x)
    lo = a[1] * np.asarray(x, dtype=float)
    return np.array([math.fsum(t) for t in zip(y.tolist(), p.tolist(), e.tolist(), lo.tolist())])
