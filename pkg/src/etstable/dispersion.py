"""Dispersion-matrix algebra: Cholesky factors, the standard-deviation /
correlation split, and linear maps of elliptical laws."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NotPositiveDefinite, ParameterError, SingularTransform

if TYPE_CHECKING:
    from .charfn import EtsParams

SYMMETRY_TOL = 1e-12
PIVOT_TOL = 1e-13


def _check_symmetric(sigma: np.ndarray) -> np.ndarray:
    sigma = np.asarray(sigma, dtype=float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {sigma.shape}")
    if not np.all(np.isfinite(sigma)):
        raise ParameterError("matrix has non-finite entries")
    if np.max(np.abs(sigma - sigma.T), initial=0.0) > SYMMETRY_TOL * max(1.0, np.max(np.abs(sigma))):
        raise ParameterError("matrix is not symmetric")
    return sigma


def cholesky(sigma) -> np.ndarray:
    """Lower-triangular ``L`` with positive diagonal and ``L @ L.T == sigma``.

    Raises :class:`NotPositiveDefinite` when a pivot falls below
    ``1e-13 * max(diag(sigma))``.
    """
    a = _check_symmetric(sigma)
    n = a.shape[0]
    scale = np.max(np.diag(a), initial=0.0)
    if not scale > 0:
        raise NotPositiveDefinite("matrix has no positive diagonal entry")
    low = np.zeros_like(a)
    for j in range(n):
        pivot = a[j, j] - np.dot(low[j, :j], low[j, :j])
        if pivot <= PIVOT_TOL * scale:
            raise NotPositiveDefinite(f"pivot {pivot:.3e} at index {j} is not positive")
        low[j, j] = np.sqrt(pivot)
        for i in range(j + 1, n):
            low[i, j] = (a[i, j] - np.dot(low[i, :j], low[j, :j])) / low[j, j]
    return low


@dataclass(frozen=True)
class DispersionDecomposition:
    sigma_vec: np.ndarray
    corr: np.ndarray
    chol_corr: np.ndarray

    def recompose(self) -> np.ndarray:
        d = np.diag(self.sigma_vec)
        return d @ self.corr @ d


def decompose(sigma) -> DispersionDecomposition:
    """Split ``sigma = diag(s) P diag(s)`` into standard deviations and correlations."""
    a = _check_symmetric(sigma)
    cholesky(a)
    s = np.sqrt(np.diag(a))
    corr = a / np.outer(s, s)
    corr = 0.5 * (corr + corr.T)
    np.fill_diagonal(corr, 1.0)
    return DispersionDecomposition(s, corr, cholesky(corr))


def check_lower_triangular(delta) -> np.ndarray:
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1]:
        raise ParameterError("transform must be a square matrix")
    if np.any(np.triu(delta, 1) != 0):
        raise ParameterError("transform must be lower-triangular")
    if np.any(np.diag(delta) <= PIVOT_TOL):
        raise SingularTransform("transform has a non-positive diagonal entry")
    return delta


def transform_law(p: "EtsParams", delta) -> "EtsParams":
    """Parameters of ``delta @ X`` for ``X`` with parameters ``p``."""
    delta = check_lower_triangular(delta)
    if delta.shape[0] != p.dim:
        raise ParameterError("transform dimension does not match the law")
    sigma = delta @ p.sigma @ delta.T
    return dataclasses.replace(p, mu=delta @ p.mu, sigma=0.5 * (sigma + sigma.T))
