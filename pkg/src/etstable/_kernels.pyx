# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hypergeometric series and the TID kernel.

Same API and semantics as :mod:`etstable._kernels_py`.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, fabs, log

from ._kernels_py import ASYMP_CUTOFF as _ASYMP_CUTOFF, asymptotic_constants
from .errors import NonConvergence

cnp.import_array()

cdef double EPS = 2.0 ** -53
cdef double DIRECT_CUTOFF = 0.5
cdef double ASYMP_CUTOFF = _ASYMP_CUTOFF
cdef double LOG_NEGLECT = log(EPS) - 5.0


cdef struct Asym:
    bint ok
    double log_pref
    double sign
    double log_ratio


cdef Asym _asym_constants(double a, double b):
    cdef Asym c
    consts = asymptotic_constants(a, b)
    c.ok = consts is not None
    if c.ok:
        c.log_pref, c.sign, c.log_ratio = consts
    return c


cdef int _asymptotic(double a, double b, double x, Asym *c, int max_terms,
                     double *total, double *last) nogil:
    # 0 when the expansion is not applicable here or stalls
    cdef double s = 1.0, t = 1.0, ratio, scale
    cdef int k = 0
    if not c.ok or x < ASYMP_CUTOFF:
        return 0
    if -x + (2.0 * a - b) * log(x) + c.log_ratio >= LOG_NEGLECT:
        return 0
    while True:
        if k >= max_terms:
            return 0
        ratio = (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * x)
        if fabs(ratio) >= 1.0:
            return 0
        t = t * ratio
        s = s + t
        k += 1
        if fabs(t) <= EPS * fabs(s):
            break
    scale = c.sign * exp(c.log_pref - a * log(x))
    total[0] = scale * s
    last[0] = fabs(scale * t)
    return k + 1

cdef int _positive_series(double c, double b, double x, int max_terms,
                          double *total, double *last) nogil:
    cdef double s = 1.0, t = 1.0, ratio
    cdef int k = 0
    while True:
        if k >= max_terms:
            return -1
        ratio = (c + k) * x / ((b + k) * (k + 1.0))
        t = t * ratio
        s = s + t
        k += 1
        if fabs(t) <= EPS * fabs(s) and fabs(ratio) < 0.5:
            break
    total[0] = s
    last[0] = fabs(t)
    return k + 1


cdef int _direct_m1(double a, double b, double z, int max_terms,
                    double *total) nogil:
    cdef double t = a * z / b
    cdef double s = t
    cdef int k = 1
    while t != 0.0:
        if k >= max_terms:
            return -1
        t = t * ((a + k) * z / ((b + k) * (k + 1.0)))
        s = s + t
        k += 1
        if fabs(t) <= EPS * fabs(s):
            break
    total[0] = s
    return k


cdef double _m1(double a, double b, double z, Asym *c, int max_terms) except? -1e308 nogil:
    cdef double total, last
    if _asymptotic(a, b, -z, c, max_terms, &total, &last) > 0:
        return total - 1.0
    if fabs(z) < DIRECT_CUTOFF:
        if _direct_m1(a, b, z, max_terms, &total) < 0:
            with gil:
                raise NonConvergence("direct 1F1 series did not converge")
        return total
    if _positive_series(b - a, b, -z, max_terms, &total, &last) < 0:
        with gil:
            raise NonConvergence(
                f"1F1 series did not converge in {max_terms} terms (|z| = {-z:.4g})")
    return exp(z) * total - 1.0


def hyp1f1_neg(double a, double b, z, int max_terms=500):
    z = np.asarray(z, dtype=float)
    cdef cnp.ndarray[double, ndim=1] zf = np.ascontiguousarray(z).ravel()
    cdef Py_ssize_t n = zf.shape[0], i
    cdef cnp.ndarray[double, ndim=1] val = np.empty(n)
    cdef cnp.ndarray[double, ndim=1] err = np.empty(n)
    cdef cnp.ndarray[long long, ndim=1] cnt = np.empty(n, dtype=np.int64)
    cdef double total, last, scale
    cdef int k
    cdef Asym c = _asym_constants(a, b)
    for i in range(n):
        k = _asymptotic(a, b, -zf[i], &c, max_terms, &total, &last)
        if k > 0:
            val[i] = total
            err[i] = last
            cnt[i] = k
            continue
        k = _positive_series(b - a, b, -zf[i], max_terms, &total, &last)
        if k < 0:
            raise NonConvergence(
                f"1F1 series did not converge in {max_terms} terms (|z| = {-zf[i]:.4g})")
        scale = exp(zf[i])
        val[i] = scale * total
        err[i] = scale * last
        cnt[i] = k
    shape = z.shape
    return val.reshape(shape), err.reshape(shape), cnt.reshape(shape)


def hyp1f1m1_neg(double a, double b, z, int max_terms=500):
    z = np.asarray(z, dtype=float)
    cdef cnp.ndarray[double, ndim=1] zf = np.ascontiguousarray(z).ravel()
    cdef Py_ssize_t n = zf.shape[0], i
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n)
    cdef Asym c = _asym_constants(a, b)
    for i in range(n):
        out[i] = _m1(a, b, zf[i], &c, max_terms)
    return out.reshape(z.shape)


def psi_kernel(s, double alpha, double c_re, double c_im, bint shifted=True,
               int max_terms=500):
    s = np.asarray(s, dtype=float)
    cdef cnp.ndarray[double, ndim=1] sf = np.ascontiguousarray(s).ravel()
    cdef Py_ssize_t n = sf.shape[0], i
    cdef cnp.ndarray[double complex, ndim=1] out = np.empty(n, dtype=complex)
    cdef double z, even, odd
    cdef double a1 = -0.5 * alpha, a2 = 0.5 - 0.5 * alpha
    cdef Asym c1 = _asym_constants(a1, 0.5)
    cdef Asym c2 = _asym_constants(a2, 1.5)
    for i in range(n):
        z = -0.5 * sf[i] * sf[i]
        even = _m1(a1, 0.5, z, &c1, max_terms)
        odd = _m1(a2, 1.5, z, &c2, max_terms)
        if not shifted:
            odd = odd + 1.0
        out[i].real = c_re * even
        out[i].imag = c_im * sf[i] * odd
    return out.reshape(s.shape)
