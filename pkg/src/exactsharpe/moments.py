"""Container for the first two moments of asset returns."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DimensionMismatch
from .linalg import as_sym_matrix, as_vector, cholesky


@dataclass(frozen=True)
class AssetMoments:
    """Expected returns ``mu`` and covariance ``omega`` for n >= 2 assets.

    Construction validates the covariance: it must be exactly symmetric and
    pass the Cholesky pivot test, otherwise :class:`~exactsharpe.errors.NotSpd`
    is raised. ``labels`` defaults to ``asset_1 .. asset_n``.
    """

    mu: NDArray[np.float64]
    omega: NDArray[np.float64]
    labels: tuple[str, ...] = field(default=())

    def __post_init__(self):
        omega = as_sym_matrix(self.omega)
        mu = as_vector(self.mu, omega.shape[0])
        if not np.all(np.isfinite(mu)):
            raise DimensionMismatch("expected returns contain non-finite values")
        mu.setflags(write=False)
        cholesky(omega)
        labels = tuple(self.labels) or tuple(f"asset_{i + 1}" for i in range(mu.shape[0]))
        if len(labels) != mu.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {mu.shape[0]} assets")
        if len(set(labels)) != len(labels):
            raise DimensionMismatch("asset labels must be unique")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.mu.shape[0]

    @classmethod
    def from_arrays(cls, mu: ArrayLike, omega: ArrayLike, labels=()) -> "AssetMoments":
        return cls(np.asarray(mu, dtype=float), np.asarray(omega, dtype=float), tuple(labels))

    def permuted(self, order) -> "AssetMoments":
        order = np.asarray(order)
        return AssetMoments(
            self.mu[order], self.omega[np.ix_(order, order)],
            tuple(self.labels[i] for i in order),
        )
