"""Characteristic functions.

Every family is available both as an exponent (``*_exponent``) and as the
characteristic function itself. Exponents are computed in forms that avoid
cancellation near ``u = 0`` (``expm1``/``log1p``), so the Gaussian and
small-argument limits are resolved to full precision.

Arguments ``u`` may be a single point of shape ``(dim,)`` or an array of
points of shape ``(..., dim)``; scalar families accept any array shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .dispersion import cholesky
from .errors import DomainError, ParameterError, PoleError
from .measures import SpectralMeasure, symmetrize
from .specfun import gamma, kummer_1f1m1_array

UNDERFLOW_EXPONENT = -700.0


@dataclass(frozen=True, eq=False)
class EtsParams:
    """Elliptical tempered stable law: index, tempering scale, location, dispersion."""

    alpha: float
    lam: float
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.lam > 0 or not math.isfinite(self.lam):
            raise DomainError(f"lambda must be positive, got {self.lam}")
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float))
        sigma = np.atleast_2d(np.asarray(self.sigma, dtype=float))
        if mu.ndim != 1 or sigma.shape != (mu.size, mu.size):
            raise ParameterError("mu must be (n,) and sigma (n, n)")
        cholesky(sigma)
        mu.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)

    @property
    def dim(self) -> int:
        return self.mu.size

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "lambda": self.lam,
                "mu": self.mu.tolist(), "sigma": self.sigma.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "EtsParams":
        return cls(float(obj["alpha"]), float(obj["lambda"]), obj["mu"], obj["sigma"])

    @classmethod
    def standard(cls, alpha: float, lam: float, dim: int) -> "EtsParams":
        return cls(alpha, lam, np.zeros(dim), np.eye(dim))


@dataclass(frozen=True)
class SubordinatorParams:
    alpha: float
    theta: float

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.theta > 0 or not math.isfinite(self.theta):
            raise DomainError(f"theta must be positive, got {self.theta}")

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "theta": self.theta}

    @classmethod
    def from_json(cls, obj: dict) -> "SubordinatorParams":
        return cls(float(obj["alpha"]), float(obj["theta"]))


@dataclass(frozen=True, eq=False)
class TidParams:
    """TID law: index, spectral measure and location.

    With the alternative kernel the location is read as the alternative
    location vector of that parameterisation.
    """

    alpha: float
    r: SpectralMeasure
    m: np.ndarray = field(default=None)

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        m = np.zeros(self.r.dim) if self.m is None else np.atleast_1d(np.asarray(self.m, dtype=float))
        if m.shape != (self.r.dim,):
            raise ParameterError("location must match the measure dimension")
        self.r.moment_condition(self.alpha)
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def dim(self) -> int:
        return self.r.dim

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "measure": self.r.to_json(), "m": self.m.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "TidParams":
        return cls(float(obj["alpha"]), SpectralMeasure.from_json(obj["measure"]), obj.get("m"))


def _out(x):
    x = np.asarray(x)
    return x.item() if x.ndim == 0 else x


def _points(u, dim: int) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.ndim == 0 and dim == 1:
        u = u.reshape(1)
    if u.shape[-1] != dim:
        raise ParameterError(f"probe dimension {u.shape[-1]} does not match law dimension {dim}")
    return u


def _clog1p(w):
    # numpy's complex log1p loses accuracy for tiny |w|
    w = np.asarray(w, dtype=complex)
    x, y = w.real, w.imag
    return 0.5 * np.log1p(2.0 * x + x * x + y * y) + 1j * np.arctan2(y, 1.0 + x)


def cf_from_exponent(z, with_flag: bool = False):
    """``exp(z)``, returning exactly 0 where ``Re z < -700``."""
    z = np.asarray(z, dtype=complex)
    under = z.real < UNDERFLOW_EXPONENT
    val = np.where(under, 0.0, np.exp(np.where(under, 0.0, z)))
    if with_flag:
        return _out(val), _out(under)
    return _out(val)


def psi_coefficients(alpha: float) -> tuple[float, float]:
    """Prefactors of the even and odd parts of the TID kernel."""
    c = 2.0 ** (-0.5 * alpha - 1.0)
    c_re = c * gamma(-0.5 * alpha)
    c_im = c * math.sqrt(2.0) * gamma(0.5 * (1.0 - alpha))
    return c_re, c_im


def psi_alpha(s, alpha: float):
    """TID kernel with both hypergeometric brackets shifted by -1."""
    if alpha == 1.0:
        raise PoleError("the TID kernel has a pole at alpha = 1")
    if not 0 < alpha < 2:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    c_re, c_im = psi_coefficients(alpha)
    return _out(kernels.psi_kernel(np.asarray(s, dtype=float), alpha, c_re, c_im, True))


def psi_alpha0(s, alpha: float):
    """Alternative TID kernel, valid for ``0 < alpha < 1``; odd bracket un-shifted."""
    if not 0 < alpha < 1:
        raise DomainError(f"the alternative kernel needs alpha in (0, 1), got {alpha}")
    c_re, c_im = psi_coefficients(alpha)
    return _out(kernels.psi_kernel(np.asarray(s, dtype=float), alpha, c_re, c_im, False))


def tid_exponent(p: TidParams, u, alternative: bool = False):
    u = _points(u, p.dim)
    kernel = psi_alpha0 if alternative else psi_alpha
    drift = 1j * (u @ p.m)
    if len(p.r) == 0:
        return _out(drift + 0.0)
    proj = u @ p.r.locations.T
    vals = np.asarray(kernel(proj, p.alpha))
    return _out(vals @ p.r.weights + drift)


def tid_cf(p: TidParams, u, alternative: bool = False):
    """Characteristic function of a TID law."""
    return cf_from_exponent(tid_exponent(p, u, alternative))


def symmetric_tid_exponent(r: SpectralMeasure, alpha: float, u):
    if not 0 < alpha < 2:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    u = _points(u, r.dim)
    if len(r) == 0:
        return _out(np.zeros(u.shape[:-1]))
    r = symmetrize(r)
    proj = u @ r.locations.T
    c = 2.0 ** (-0.5 * alpha - 1.0) * gamma(-0.5 * alpha)
    return _out(c * (kummer_1f1m1_array(-0.5 * alpha, 0.5, -0.5 * proj * proj) @ r.weights))


def symmetric_tid_cf(r: SpectralMeasure, alpha: float, u):
    """Real characteristic function of the symmetric TID law; ``r`` is symmetrised first."""
    z = symmetric_tid_exponent(r, alpha, u)
    return _out(np.where(np.asarray(z) < UNDERFLOW_EXPONENT, 0.0, np.exp(z)))


def ets_quadratic(p: EtsParams, u) -> np.ndarray:
    u = _points(u, p.dim)
    return np.einsum("...i,ij,...j->...", u, p.sigma, u)


def ets_exponent(p: EtsParams, u):
    u = _points(u, p.dim)
    q = ets_quadratic(p, u)
    real = -(2.0 * p.lam / p.alpha) * np.expm1(0.5 * p.alpha * np.log1p(q / (2.0 * p.lam)))
    return _out(real + 1j * (u @ p.mu))


def ets_cf(p: EtsParams, u):
    """Characteristic function of the elliptical tempered stable law."""
    return cf_from_exponent(ets_exponent(p, u))


def subordinator_exponent(p: SubordinatorParams, u):
    u = np.asarray(u, dtype=float)
    w = np.expm1(0.5 * p.alpha * _clog1p(-1j * u / p.theta))
    return _out(-(2.0 * p.theta / p.alpha) * w)


def subordinator_cf(p: SubordinatorParams, u):
    """Characteristic function of the unit-mean tempered stable subordinator."""
    return cf_from_exponent(subordinator_exponent(p, u))


def subordinator_laplace(p: SubordinatorParams, s):
    """``E exp(-s T)`` for ``s >= 0``."""
    s = np.asarray(s, dtype=float)
    return _out(np.exp(-(2.0 * p.theta / p.alpha) * np.expm1(0.5 * p.alpha * np.log1p(s / p.theta))))
