"""Sample moments from historical returns and the minimum-variance baseline.

Returns are simple per-period returns; no annualization or log transform is
applied here. Covariance uses the unbiased ``T - 1`` divisor.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateNormalization, DimensionMismatch, NotSpd
from .linalg import as_sym_matrix, solve
from .moments import AssetMoments


@dataclass(frozen=True)
class ReturnSeries:
    """T x n matrix of per-period simple returns with one label per column."""

    asset_names: tuple[str, ...]
    returns: NDArray[np.float64]

    def __post_init__(self):
        returns = np.array(self.returns, dtype=float)
        names = tuple(self.asset_names)
        if returns.ndim != 2:
            raise DimensionMismatch(f"returns must be 2-D, got shape {returns.shape}")
        t, n = returns.shape
        if n < 2:
            raise DimensionMismatch("at least two assets are required")
        if t < 2:
            raise DimensionMismatch("at least two periods are required")
        if len(names) != n:
            raise DimensionMismatch(f"{len(names)} asset names for {n} columns")
        if len(set(names)) != n:
            raise DimensionMismatch("asset names must be unique")
        if not np.all(np.isfinite(returns)):
            raise DimensionMismatch("returns contain missing or non-finite values")
        returns.setflags(write=False)
        object.__setattr__(self, "returns", returns)
        object.__setattr__(self, "asset_names", names)

    @property
    def periods(self) -> int:
        return self.returns.shape[0]


def sample_moments(returns: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Sample mean and exactly symmetric sample covariance (divisor T - 1)."""
    returns = np.asarray(returns, dtype=float)
    mu = returns.mean(axis=0)
    dev = returns - mu
    cov = dev.T @ dev / (returns.shape[0] - 1)
    # gemm need not return a bitwise-symmetric product
    cov = np.triu(cov) + np.triu(cov, 1).T
    return mu, cov


def estimate_moments(series: ReturnSeries) -> AssetMoments:
    """Estimate ``AssetMoments`` from a return series.

    Raises
    ------
    NotSpd
        If the sample covariance is singular or nearly so (too few periods,
        a constant column, collinear assets). The diagnostic records T, n and
        the failing pivot.
    """
    mu, cov = sample_moments(series.returns)
    try:
        return AssetMoments(mu, cov, series.asset_names)
    except NotSpd as exc:
        diag = dict(exc.diagnostic)
        diag.update(periods=series.periods, assets=len(series.asset_names))
        variances = np.diag(cov)
        flat = [series.asset_names[i] for i in np.flatnonzero(variances <= 0)]
        if flat:
            diag["zero_variance_assets"] = flat
        hint = " (fewer periods than assets)" if series.periods <= len(series.asset_names) else ""
        raise NotSpd(f"sample covariance is not positive definite{hint}", diag) from None


def min_variance_weights(omega: ArrayLike) -> NDArray[np.float64]:
    """Budget-constrained minimum-variance weights ``omega^-1 1 / sum(omega^-1 1)``."""
    omega = as_sym_matrix(omega)
    x = solve(omega, np.ones(omega.shape[0]))
    s = math.fsum(x)
    if abs(s) <= 1e-12 * np.abs(x).sum():
        raise DegenerateNormalization("sum of inverse-covariance row sums vanishes")
    return x / s
