"""Exact Fincke-Pohst enumeration of short vectors of a positive definite form."""
from __future__ import annotations

from fractions import Fraction
from math import floor, isqrt, lcm

import numpy as np

from . import _core
from .linalg import fraction_free_echelon, inverse, ldl

_INT64_HEADROOM = 1 << 62


class ShortVectorSet:
    """One representative of each sign class {v, -v} with v^T S v <= bound.

    ``array`` holds the coordinates (one row per vector) and ``norm_num`` the
    integer numerators of the norms over the common denominator ``den``.
    """

    def __init__(self, bound, array, norm_num, den=1, complete=True):
        self.bound = Fraction(bound)
        self.array = array
        self.norm_num = norm_num
        self.den = den
        self.complete = complete

    def __len__(self):
        return len(self.array)

    @property
    def vectors(self):
        return [(tuple(int(c) for c in v), Fraction(int(q), self.den)) for v, q in zip(self.array, self.norm_num)]

    def coords(self):
        return [tuple(int(c) for c in v) for v in self.array]

    def with_norm(self, c):
        """Rows of norm exactly c (one per sign class)."""
        c = Fraction(c)
        if (c * self.den).denominator != 1:
            return self.array[:0]
        return self.array[self.norm_num == int(c * self.den)]


def _integral_scaling(S):
    den = 1
    for row in S:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return den, [[int(Fraction(x) * den) for x in row] for row in S]


def _fits_int64(U, weights, budget, xmax) -> bool:
    if budget >= _INT64_HEADROOM:
        return False
    n = len(U)
    for k in range(n):
        spread = sum(abs(U[k][j]) * xmax[j] for j in range(k, n))
        # every tested y satisfies weights[k]*y^2 <= budget; only the centre
        # sum can grow past that
        if spread >= _INT64_HEADROOM:
            return False
    return True


def _integer_norms(Sint, arr):
    if len(arr) == 0:
        return np.empty(0, dtype=np.int64)
    big = max(abs(x) for row in Sint for x in row) * int(np.abs(arr).max()) ** 2
    if arr.dtype != object and big * len(Sint) ** 2 < _INT64_HEADROOM:
        return ((arr @ np.asarray(Sint, dtype=np.int64)) * arr).sum(axis=1)
    G = np.asarray(Sint, dtype=object)
    return ((arr.astype(object) @ G) * arr.astype(object)).sum(axis=1)


def quadratic_norm(S, v) -> Fraction:
    return sum(Fraction(S[i][j]) * v[i] * v[j] for i in range(len(v)) for j in range(len(v)))


def short_vectors(S, bound, backend: str | None = None) -> ShortVectorSet:
    """All nonzero v with v^T S v <= bound, up to sign.

    Sign normalisation: the first nonzero coordinate is positive.  Output is
    sorted by (norm, coordinates).
    """
    bound = Fraction(bound)
    n = len(S)
    ldl(S)  # raises ValueError if S is not positive definite
    if bound <= 0:
        return ShortVectorSet(bound, np.empty((0, n), dtype=np.int64), np.empty(0, dtype=np.int64))
    den, Sint = _integral_scaling(S)
    # reverse coordinates so the kernel's "last nonzero positive" becomes
    # "first nonzero positive" in the caller's coordinates
    R = [row[::-1] for row in Sint[::-1]]
    U, minors = fraction_free_echelon(R)
    dens = [minors[k] * minors[k + 1] for k in range(n)]
    M = 1
    for d in dens:
        M = lcm(M, d)
    weights = [M // d for d in dens]
    budget = floor(bound * den * M)

    kern = _core.get_kernels(backend)
    if kern is not _core._pykernels:
        Sinv = inverse(R)
        xmax = [isqrt(floor(bound * den * Sinv[j][j])) + 1 for j in range(n)]
        if not _fits_int64(U, weights, budget, xmax):
            kern = _core._pykernels
    raw = kern.enumerate_short(U, weights, budget)
    if isinstance(raw, np.ndarray):
        arr = raw[:, ::-1]
    else:
        arr = _as_array([x[::-1] for x in raw], n)
    norms = _integer_norms(Sint, arr)
    if len(arr):
        order = np.lexsort(tuple(arr[:, j] for j in range(n - 1, -1, -1)) + (norms,))
        arr, norms = arr[order], norms[order]
    return ShortVectorSet(bound, np.ascontiguousarray(arr), norms, den, True)


def _as_array(rows, n):
    if not rows:
        return np.empty((0, n), dtype=np.int64)
    if max(abs(c) for r in rows for c in r) < _INT64_HEADROOM:
        return np.asarray(rows, dtype=np.int64)
    return np.asarray(rows, dtype=object)


def box_search(S, bound, radius: int):
    """Naive oracle: sign classes of nonzero v in [-radius, radius]^n with v^T S v <= bound."""
    from itertools import product

    n = len(S)
    out = []
    for v in product(range(-radius, radius + 1), repeat=n):
        if not any(v):
            continue
        first = next(c for c in v if c)
        if first < 0:
            continue
        nrm = quadratic_norm(S, v)
        if nrm <= bound:
            out.append((v, nrm))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def vectors_of_norm(lattice, c: int):
    """All lattice vectors (both signs) with h(x, x) = c, as coordinate tuples.

    The h-norm of a vector equals its trace-form norm x^T S x.
    """
    if c < 0:
        return []
    if c == 0:
        return [tuple([0] * (2 * lattice.rank))]
    out = []
    for v in lattice.vectors_up_to(c):
        if lattice.norm_of(v) == c:
            out.append(v)
            out.append(tuple(-x for x in v))
    return sorted(out)
