# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sin, asin, fabs, fmax

cnp.import_array()

cdef double _TINY = 1e-300


def landen_am(x, a, c):
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel())
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] cv = np.ascontiguousarray(c, dtype=np.float64)
    cdef Py_ssize_t depth = av.shape[0] - 1
    cdef Py_ssize_t i, j
    cdef double phi, scale = (2.0 ** depth) * av[depth]
    out = np.empty(xv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    for i in range(xv.shape[0]):
        phi = scale * xv[i]
        for j in range(depth, 0, -1):
            phi = 0.5 * (phi + asin(cv[j] / av[j] * sin(phi)))
        ov[i] = phi
    return out.reshape(np.shape(x))


cdef Py_ssize_t _count(double[::1] d, double[::1] e, double corner, double lam) nogil:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t i, cnt = 0
    cdef double q, y, ratio, b, schur
    q = d[0] - lam
    if q == 0.0:
        q = _TINY
    y = corner
    if n == 2:
        y = y + e[0]
    schur = d[n - 1] - lam - y * y / q
    if q < 0.0:
        cnt += 1
    for i in range(1, n - 1):
        ratio = e[i - 1] / q
        q = d[i] - lam - e[i - 1] * ratio
        if q == 0.0:
            q = _TINY
        b = e[n - 2] if i == n - 2 else 0.0
        y = b - ratio * y
        schur -= y * y / q
        if q < 0.0:
            cnt += 1
    if schur < 0.0:
        cnt += 1
    return cnt


def sturm_counts(diag, off, corner, shifts):
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    lam = np.atleast_1d(np.asarray(shifts, dtype=np.float64))
    cdef double[::1] lv = np.ascontiguousarray(lam)
    out = np.empty(lv.shape[0], dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    cdef Py_ssize_t i
    cdef double cr = corner
    for i in range(lv.shape[0]):
        ov[i] = _count(d, e, cr, lv[i])
    return out


def bisect_eigenvalues(diag, off, corner, Py_ssize_t count, double lower, double upper, double tol):
    cdef double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[::1] e = np.ascontiguousarray(off, dtype=np.float64)
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double cr = corner
    cdef Py_ssize_t k
    cdef double lo, hi, mid
    for k in range(count):
        lo = lower
        hi = upper
        while hi - lo > tol * fmax(1.0, fabs(lo) + fabs(hi)):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if _count(d, e, cr, mid) <= k:
                lo = mid
            else:
                hi = mid
        ov[k] = 0.5 * (lo + hi)
    return out
