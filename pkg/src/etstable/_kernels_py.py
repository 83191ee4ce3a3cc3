"""Pure-Python (numpy-vectorised) kernels.

Fallback for :mod:`etstable._kernels`; both modules expose the same three
functions with identical semantics. Series are advanced for the whole array
at once and elements drop out of the update once converged.

For ``z <= -ASYMP_CUTOFF`` the large-argument expansion

    1F1(a, b; -x) ~ Gamma(b) / Gamma(b - a) x^-a  sum_s (a)_s (a - b + 1)_s / s! x^-s

is used whenever the exponentially small companion term it drops is below
rounding; elsewhere Kummer's transformation and the positive-argument series.
"""

import math

import numpy as np

from .errors import NonConvergence

EPS = 2.0 ** -53
DIRECT_CUTOFF = 0.5
ASYMP_CUTOFF = 50.0
LOG_NEGLECT = math.log(EPS) - 5.0


def asymptotic_constants(a, b):
    """``(log|Gamma(b)/Gamma(b-a)|, sign, log|Gamma(b-a)/Gamma(a)|)`` or None.

    None when ``b - a`` is a non-positive integer, where the leading
    expansion vanishes and only the exponential companion survives.
    """
    c = b - a
    if c <= 0 and c == math.floor(c):
        return None
    sign = math.copysign(1.0, math.gamma(b)) * math.copysign(1.0, math.gamma(c))
    log_pref = math.lgamma(b) - math.lgamma(c)
    if a <= 0 and a == math.floor(a):
        log_ratio = -math.inf
    else:
        log_ratio = math.lgamma(c) - math.lgamma(a)
    return log_pref, sign, log_ratio


def _asymptotic_mask(a, b, x, consts):
    if consts is None:
        return np.zeros(x.shape, dtype=bool)
    with np.errstate(divide="ignore"):
        neglect = -x + (2.0 * a - b) * np.log(x) + consts[2]
    return (x >= ASYMP_CUTOFF) & (neglect < LOG_NEGLECT)


def _asymptotic_series(a, b, x, consts, max_terms):
    # returns values, last-term error and term counts; NaN where the series stalls
    log_pref, sign, _ = consts
    total = np.ones_like(x)
    term = np.ones_like(x)
    nterms = np.ones(x.shape, dtype=np.int64)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        ratio = (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * x[active])
        if k >= max_terms:
            total[active] = np.nan
            break
        t = term[active] * ratio
        s = total[active] + t
        grew = np.abs(ratio) >= 1.0
        term[active] = t
        total[active] = np.where(grew, np.nan, s)
        nterms[active] += 1
        done = grew | (np.abs(t) <= EPS * np.abs(s))
        active[np.flatnonzero(active)[done]] = False
        k += 1
    scale = sign * np.exp(log_pref - a * np.log(x))
    return scale * total, np.abs(scale * term), nterms


def _positive_series(c, b, x, max_terms):
    # sum_k (c)_k / (b)_k x^k / k!  for x >= 0
    total = np.ones_like(x)
    term = np.ones_like(x)
    nterms = np.ones(x.shape, dtype=np.int64)
    active = np.ones(x.shape, dtype=bool)
    k = 0
    while active.any():
        if k >= max_terms:
            raise NonConvergence(
                f"1F1 series did not converge in {max_terms} terms "
                f"(max |z| = {float(np.max(x[active])):.4g})")
        ratio = (c + k) * x[active] / ((b + k) * (k + 1.0))
        t = term[active] * ratio
        s = total[active] + t
        term[active] = t
        total[active] = s
        nterms[active] += 1
        done = (np.abs(t) <= EPS * np.abs(s)) & (np.abs(ratio) < 0.5)
        active[np.flatnonzero(active)[done]] = False
        k += 1
    return total, np.abs(term), nterms


def _direct_m1(a, b, z, max_terms):
    # sum_{k>=1} (a)_k / (b)_k z^k / k!  for small |z|
    term = a * z / b
    total = term.copy()
    active = np.abs(term) > 0
    k = 1
    while active.any():
        if k >= max_terms:
            raise NonConvergence("direct 1F1 series did not converge")
        t = term[active] * ((a + k) * z[active] / ((b + k) * (k + 1.0)))
        s = total[active] + t
        term[active] = t
        total[active] = s
        done = np.abs(t) <= EPS * np.abs(s)
        active[np.flatnonzero(active)[done]] = False
        k += 1
    return total


def hyp1f1_neg(a, b, z, max_terms=500):
    """1F1(a, b; z) for z <= 0.

    Returns ``(values, est_error, terms_used)`` arrays shaped like ``z``.
    """
    z = np.asarray(z, dtype=float)
    x = -z
    val = np.empty_like(x)
    err = np.empty_like(x)
    cnt = np.empty(x.shape, dtype=np.int64)
    consts = asymptotic_constants(a, b)
    asym = _asymptotic_mask(a, b, x, consts)
    if asym.any():
        val[asym], err[asym], cnt[asym] = _asymptotic_series(a, b, x[asym], consts, max_terms)
        asym[asym] = np.isfinite(val[asym])
    rest = ~asym
    if rest.any():
        series, last, nterms = _positive_series(b - a, b, x[rest], max_terms)
        scale = np.exp(z[rest])
        val[rest], err[rest], cnt[rest] = scale * series, scale * last, nterms
    return val, err, cnt


def hyp1f1m1_neg(a, b, z, max_terms=500):
    """1F1(a, b; z) - 1 for z <= 0, without cancellation near z = 0."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < DIRECT_CUTOFF
    if small.any():
        out[small] = _direct_m1(a, b, z[small], max_terms)
    big = ~small
    if big.any():
        out[big] = hyp1f1_neg(a, b, z[big], max_terms)[0] - 1.0
    return out


def psi_kernel(s, alpha, c_re, c_im, shifted=True, max_terms=500):
    """Evaluate the TID kernel on an array of projections ``s``.

    ``c_re`` and ``c_im`` are the Gamma-function prefactors of the even and
    odd parts; ``shifted=False`` drops the "-1" from the odd bracket.
    """
    s = np.asarray(s, dtype=float)
    z = -0.5 * s * s
    even = hyp1f1m1_neg(-0.5 * alpha, 0.5, z, max_terms)
    odd = hyp1f1m1_neg(0.5 - 0.5 * alpha, 1.5, z, max_terms)
    if not shifted:
        odd = odd + 1.0
    return c_re * even + 1j * (c_im * s * odd)
