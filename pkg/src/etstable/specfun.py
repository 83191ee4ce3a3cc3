"""Scalar special functions used by the characteristic-function formulas.

Gamma at negative non-integer arguments, the upper incomplete Gamma function
for small real orders, and Kummer's confluent hypergeometric function on the
non-positive real axis. Array versions of the hypergeometric function are
served by the kernel backend (compiled when available).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ._backend import kernels
from .errors import DomainError, NonConvergence, PoleError

MAX_TERMS = 500


@dataclass(frozen=True)
class SpecFunResult:
    value: float
    est_error: float
    terms_used: int

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NonConvergence(f"non-finite special-function value {self.value!r}")
        if self.est_error < 0 or self.terms_used < 1:
            raise ValueError("est_error must be >= 0 and terms_used >= 1")

    def __float__(self):
        return self.value


def gamma(x: float) -> float:
    """Gamma function, reflected into the right half-line for ``x < 0.5``."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x}")
    if x >= 0.5:
        return math.gamma(x)
    # sin(pi x) with the argument reduced to [-1, 1) keeps full accuracy near integers
    r = math.fmod(x, 2.0)
    if r >= 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    return math.pi / (math.sin(math.pi * r) * math.gamma(1.0 - x))


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Upper incomplete Gamma function for ``a`` in (-2, 2) and ``x > 0``.

    Non-positive orders are lifted with
    ``Gamma(a, x) = (Gamma(a + 1, x) - x**a * exp(-x)) / a``.
    """
    a, x = float(a), float(x)
    if not x > 0:
        raise DomainError(f"upper_incomplete_gamma needs x > 0, got {x}")
    if not -2.0 < a < 2.0:
        raise DomainError(f"order {a} outside (-2, 2)")
    if a > 0:
        return float(special.gammaincc(a, x) * math.gamma(a))
    if a == 0.0:
        return float(special.exp1(x))
    return (upper_incomplete_gamma(a + 1.0, x) - x ** a * math.exp(-x)) / a


def kummer_1f1(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> SpecFunResult:
    """Confluent hypergeometric function 1F1(a, b; z) for ``z <= 0``.

    Uses ``1F1(a, b; z) = exp(z) 1F1(b - a, b; -z)`` so the summed series has
    a positive argument. ``est_error`` is the magnitude of the last term
    added, scaled by ``exp(z)``.
    """
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    if z > 0:
        raise DomainError(f"kummer_1f1 is implemented for z <= 0 only, got {z}")
    if z == 0:
        return SpecFunResult(1.0, 0.0, 1)
    val, err, n = kernels.hyp1f1_neg(float(a), float(b), np.array([float(z)]), max_terms)
    return SpecFunResult(float(val[0]), float(err[0]), int(n[0]))


def kummer_1f1_direct(a: float, b: float, z: float, max_terms: int = MAX_TERMS) -> float:
    """Plain power series for 1F1; only sensible for moderate ``|z|``."""
    total = term = 1.0
    for k in range(max_terms):
        term *= (a + k) * z / ((b + k) * (k + 1.0))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            return total
    raise NonConvergence(f"direct 1F1 series did not converge at z={z}")


def kummer_1f1_array(a: float, b: float, z, max_terms: int = MAX_TERMS) -> np.ndarray:
    """Vectorised 1F1(a, b; z) for an array of ``z <= 0``."""
    z = np.asarray(z, dtype=float)
    if np.any(z > 0):
        raise DomainError("kummer_1f1_array is implemented for z <= 0 only")
    return kernels.hyp1f1_neg(float(a), float(b), z, max_terms)[0]


def kummer_1f1m1_array(a: float, b: float, z, max_terms: int = MAX_TERMS) -> np.ndarray:
    """Vectorised ``1F1(a, b; z) - 1`` without cancellation at small ``|z|``."""
    z = np.asarray(z, dtype=float)
    if np.any(z > 0):
        raise DomainError("kummer_1f1m1_array is implemented for z <= 0 only")
    return kernels.hyp1f1m1_neg(float(a), float(b), z, max_terms)
