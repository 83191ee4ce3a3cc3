"""Density recovery from characteristic functions on uniform 1D/2D grids.

The state grid on each axis is ``x_j = center - L + j dx`` with
``dx = 2L / N``; the matched frequency grid is ``u_k = (k - N/2) du`` with
``du = pi / L``, so ``du * dx = 2 pi / N``. The density is the Riemann sum

    p(x) = (2 pi)^-n  sum_k  exp(-i <u_k, x>) phi(u_k) du^n,

evaluated with one FFT per axis.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import AliasingSuspected, CoverageError, MassDeficit, ParameterError

TOL_MASS = 1e-3
TOL_NEG = 1e-6
ALIAS_TOL = 1e-8


class NegativeDensityWarning(UserWarning):
    pass


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid on ``prod_i [center_i - L_i, center_i + L_i)``."""

    center: tuple
    half_width: tuple
    n: tuple

    def __init__(self, center: Sequence[float], half_width: Sequence[float], n: Sequence[int]):
        center = tuple(float(c) for c in np.atleast_1d(center))
        half_width = tuple(float(h) for h in np.atleast_1d(half_width))
        n = tuple(int(k) for k in np.atleast_1d(n))
        if not (len(center) == len(half_width) == len(n)) or len(n) not in (1, 2):
            raise ParameterError("grid must be 1D or 2D with matching axis specs")
        for h, k in zip(half_width, n):
            if not h > 0:
                raise ParameterError("half-width must be positive")
            if k < 64 or k > 2 ** 16 or k & (k - 1):
                raise ParameterError(f"point count {k} must be a power of two in [64, 65536]")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "half_width", half_width)
        object.__setattr__(self, "n", n)

    @classmethod
    def uniform(cls, dim: int, half_width: float, n: int, center: float = 0.0) -> "GridSpec":
        return cls([center] * dim, [half_width] * dim, [n] * dim)

    @property
    def dim(self) -> int:
        return len(self.n)

    @property
    def dx(self) -> tuple:
        return tuple(2.0 * h / k for h, k in zip(self.half_width, self.n))

    @property
    def du(self) -> tuple:
        return tuple(np.pi / h for h in self.half_width)

    def x_axes(self) -> list[np.ndarray]:
        return [c - h + np.arange(k) * d
                for c, h, k, d in zip(self.center, self.half_width, self.n, self.dx)]

    def u_axes(self) -> list[np.ndarray]:
        return [(np.arange(k) - k // 2) * d for k, d in zip(self.n, self.du)]

    def x_points(self) -> np.ndarray:
        """State grid as an array of shape ``(*n, dim)``."""
        return np.stack(np.meshgrid(*self.x_axes(), indexing="ij"), axis=-1)

    def u_points(self) -> np.ndarray:
        """Frequency grid as an array of shape ``(*n, dim)``."""
        return np.stack(np.meshgrid(*self.u_axes(), indexing="ij"), axis=-1)

    def to_json(self) -> dict:
        return {"center": list(self.center), "half_width": list(self.half_width), "n": list(self.n)}

    @classmethod
    def from_json(cls, obj: dict) -> "GridSpec":
        return cls(obj["center"], obj["half_width"], obj["n"])


@dataclass(frozen=True, eq=False)
class DensityGrid:
    grid: GridSpec
    values: np.ndarray
    mass: float
    min_value: float

    def marginal(self, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """``(x, p)`` of the 1D marginal along ``axis``."""
        if not 0 <= axis < self.grid.dim:
            raise ParameterError(f"axis {axis} out of range")
        x = self.grid.x_axes()
        p = self.values
        if self.grid.dim == 2:
            other = 1 - axis
            p = np.trapezoid(p, x[other], axis=other)
        return x[axis], p

    def cdf(self, axis: int = 0) -> tuple[np.ndarray, np.ndarray]:
        """Marginal CDF by cumulative trapezoid, normalised to end at 1."""
        x, p = self.marginal(axis)
        c = integrate.cumulative_trapezoid(p, x, initial=0.0)
        return x, c / c[-1]


def _trapezoid_mass(values: np.ndarray, grid: GridSpec) -> float:
    m = values
    for ax in reversed(grid.x_axes()):
        m = np.trapezoid(m, ax, axis=-1)
    return float(m)


def invert_values(cf_values, grid: GridSpec, tol_mass: float = TOL_MASS,
                  tol_neg: float = TOL_NEG, check_aliasing: bool = True) -> DensityGrid:
    """Invert characteristic-function values sampled on ``grid.u_points()``."""
    phi = np.asarray(cf_values, dtype=complex)
    if phi.shape != grid.n:
        raise ParameterError(f"CF values have shape {phi.shape}, grid expects {grid.n}")
    if check_aliasing:
        edge = _boundary_max(phi)
        if edge > ALIAS_TOL:
            raise AliasingSuspected(
                f"|cf| = {edge:.3e} at the frequency-grid boundary exceeds {ALIAS_TOL:g}; "
                "refine the state grid (smaller dx)")
    shifted = phi
    for axis, (u, c, h) in enumerate(zip(grid.u_axes(), grid.center, grid.half_width)):
        shape = [1] * grid.dim
        shape[axis] = u.size
        shifted = shifted * np.exp(-1j * u * (c - h)).reshape(shape)
    spec = np.fft.fftn(shifted)
    for axis, k in enumerate(grid.n):
        shape = [1] * grid.dim
        shape[axis] = k
        sign = np.where(np.arange(k) % 2 == 0, 1.0, -1.0).reshape(shape)
        spec = spec * sign
    scale = np.prod(grid.du) / (2.0 * np.pi) ** grid.dim
    values = np.real(spec) * scale
    mass = _trapezoid_mass(values, grid)
    min_value = float(values.min())
    if abs(mass - 1.0) > tol_mass:
        raise MassDeficit(f"density mass {mass:.6f} differs from 1 by more than {tol_mass:g}")
    if min_value < -tol_neg:
        warnings.warn(f"density has negative excursion {min_value:.3e}", NegativeDensityWarning,
                      stacklevel=2)
    values.setflags(write=False)
    return DensityGrid(grid, values, mass, min_value)


def _boundary_max(phi: np.ndarray) -> float:
    m = 0.0
    for axis in range(phi.ndim):
        for idx in (0, -1):
            m = max(m, float(np.max(np.abs(np.take(phi, idx, axis=axis)))))
    return m


def invert_cf(cf: Callable[[np.ndarray], np.ndarray], grid: GridSpec, **kwargs) -> DensityGrid:
    """Density of the law whose characteristic function is ``cf``.

    ``cf`` is called once with the ``(*n, dim)`` frequency array (for 1D
    grids the trailing axis has length 1).
    """
    u = grid.u_points()
    phi = np.asarray(cf(u), dtype=complex).reshape(grid.n)
    if abs(phi[tuple(k // 2 for k in grid.n)] - 1.0) > 1e-12:
        raise ParameterError("cf(0) must equal 1")
    return invert_values(phi, grid, **kwargs)


def default_grid(sigma, dim: int, n: int = 4096, center=None) -> GridSpec:
    """Grid of half-width ``8 sqrt(max eigenvalue of sigma)`` per axis."""
    lmax = float(np.max(np.linalg.eigvalsh(np.atleast_2d(sigma))))
    c = np.zeros(dim) if center is None else np.asarray(center, dtype=float)
    return GridSpec(c, [8.0 * np.sqrt(lmax)] * dim, [n] * dim)


def ks_distance(batch, density: DensityGrid, axis: int = 0, tol_mass: float = TOL_MASS) -> float:
    """Kolmogorov-Smirnov statistic of one sample coordinate against a grid density."""
    values = np.asarray(getattr(batch, "values", batch), dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if not 0 <= axis < values.shape[1] or axis >= density.grid.dim:
        raise ParameterError(f"axis {axis} out of range")
    sample = values[:, axis]
    x, c = density.cdf(axis)
    outside = np.mean((sample < x[0]) | (sample > x[-1]))
    if outside > tol_mass:
        raise CoverageError(f"{outside:.2%} of samples fall outside the density grid")
    return float(stats.kstest(sample, lambda s: np.interp(s, x, c)).statistic)


def ks_critical_value(n: int, level: float = 0.99) -> float:
    """Asymptotic KS critical value; 1.63 / sqrt(n) at the 99% level."""
    coeff = {0.95: 1.36, 0.99: 1.63}.get(level)
    if coeff is None:
        coeff = float(stats.kstwobign.ppf(level))
    return coeff / np.sqrt(n)
