# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled short-vector enumeration.

Same contract as ``_pykernels.enumerate_short`` except that the result is an
(N, n) int64 array.  All arithmetic is on 64-bit
integers, and the caller guarantees (via ``enumeration._fits_int64``) that no
intermediate value can overflow.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

ctypedef long long i64


cdef inline i64 isqrt64(i64 v) nogil:
    cdef i64 r
    if v <= 0:
        return 0
    r = <i64> sqrt(<double> v)
    while r * r > v:
        r -= 1
    while (r + 1) * (r + 1) <= v:
        r += 1
    return r


cdef inline i64 floordiv(i64 a, i64 b) nogil:
    # b > 0
    cdef i64 q = a / b
    if (a % b != 0) and (a < 0):
        q -= 1
    return q


def enumerate_short(U, weights, budget):
    cdef Py_ssize_t n = len(U)
    if budget <= 0 or n == 0:
        return np.empty((0, n), dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=2] Ua = np.asarray(U, dtype=np.int64)
    cdef cnp.ndarray[i64, ndim=1] wa = np.asarray(weights, dtype=np.int64)
    cdef i64[:, :] u = Ua
    cdef i64[:] w = wa
    cdef i64[:] x = np.zeros(n, dtype=np.int64)
    cdef i64[:] hi = np.zeros(n, dtype=np.int64)
    cdef i64[:] rem = np.zeros(n + 1, dtype=np.int64)
    cdef i64[:] num = np.zeros(n, dtype=np.int64)
    cdef i64[:] lz = np.zeros(n + 1, dtype=np.int64)
    cdef Py_ssize_t k, j
    cdef i64 s, lo, y, r2, acc
    cdef Py_ssize_t count = 0, cap = 1024
    cdef cnp.ndarray[i64, ndim=2] buf = np.empty((cap, n), dtype=np.int64)
    cdef i64[:, :] ob = buf

    rem[n] = budget
    lz[n] = 1
    k = n - 1
    # set up level k: compute centre and range, x[k] = lo - 1
    acc = 0
    for j in range(k + 1, n):
        acc += u[k, j] * x[j]
    num[k] = acc
    s = isqrt64(rem[k + 1] / w[k])
    lo = -floordiv(s + acc, u[k, k])
    hi[k] = floordiv(s - acc, u[k, k])
    if lz[k + 1] and lo < 0:
        lo = 0
    x[k] = lo - 1

    while True:
        x[k] += 1
        if x[k] > hi[k]:
            x[k] = 0
            k += 1
            if k >= n:
                break
            continue
        y = u[k, k] * x[k] + num[k]
        r2 = rem[k + 1] - w[k] * y * y
        if r2 < 0:
            continue
        rem[k] = r2
        lz[k] = lz[k + 1] and x[k] == 0
        if k == 0:
            if not lz[0]:
                if count == cap:
                    cap *= 2
                    buf = np.resize(buf, (cap, n))
                    ob = buf
                for j in range(n):
                    ob[count, j] = x[j]
                count += 1
            continue
        k -= 1
        acc = 0
        for j in range(k + 1, n):
            acc += u[k, j] * x[j]
        num[k] = acc
        s = isqrt64(rem[k + 1] / w[k])
        lo = -floordiv(s + acc, u[k, k])
        hi[k] = floordiv(s - acc, u[k, k])
        if lz[k + 1] and lo < 0:
            lo = 0
        x[k] = lo - 1
    return buf[:count].copy()
