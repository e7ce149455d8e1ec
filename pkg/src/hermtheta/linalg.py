"""Small exact linear algebra over Z and Q on lists of lists.

Matrices here are tiny (at most 16 x 8), so plain Python integers and
Fractions are fast enough and keep every result exact.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


def hnf(rows):
    """Row Hermite normal form of an integer matrix, zero rows dropped.

    Upper-triangular echelon form with positive pivots and entries above each
    pivot reduced into [0, pivot).
    """
    A = [list(map(int, r)) for r in rows if any(r)]
    if not A:
        return []
    ncols = len(A[0])
    out = []
    r0 = 0
    for c in range(ncols):
        # gcd-combine column c over rows r0.. into row r0
        piv = None
        for i in range(r0, len(A)):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r0], A[piv] = A[piv], A[r0]
        for i in range(r0 + 1, len(A)):
            while A[i][c] != 0:
                q = A[r0][c] // A[i][c]
                A[r0] = [x - q * y for x, y in zip(A[r0], A[i])]
                A[r0], A[i] = A[i], A[r0]
        if A[r0][c] < 0:
            A[r0] = [-x for x in A[r0]]
        p = A[r0][c]
        for i in range(r0):
            q = A[i][c] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r0])]
        r0 += 1
        if r0 == len(A):
            break
    out = [tuple(r) for r in A[:r0]]
    return out


def common_denominator(rows) -> int:
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, Fraction(x).denominator)
    return den


def rational_hnf(rows):
    """HNF of the Z-span of rational row vectors; returns rows of Fractions."""
    den = common_denominator(rows)
    ints = [[int(Fraction(x) * den) for x in r] for r in rows]
    return [tuple(Fraction(x, den) for x in r) for r in hnf(ints)]


def matmul(A, B):
    Bt = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def det(M):
    """Exact determinant (Fraction-valued Gaussian elimination)."""
    A = [[Fraction(x) for x in r] for r in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        inv = 1 / A[c][c]
        for i in range(c + 1, n):
            f = A[i][c] * inv
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return d


def int_det(M) -> int:
    """Determinant of an integer matrix by Bareiss elimination."""
    A = [list(map(int, r)) for r in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            p = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if p is None:
                return 0
            A[k], A[p] = A[p], A[k]
            sign = -sign
        akk = A[k][k]
        for i in range(k + 1, n):
            aik = A[i][k]
            row_i, row_k = A[i], A[k]
            for j in range(k + 1, n):
                row_i[j] = (akk * row_i[j] - aik * row_k[j]) // prev
        prev = akk
    return sign * A[n - 1][n - 1] if n else 1


def int_rank(M) -> int:
    """Rank of an integer matrix (fraction-free elimination)."""
    A = [list(map(int, r)) for r in M]
    rk = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[rk], A[p] = A[p], A[rk]
        piv = A[rk]
        for i in range(rk + 1, len(A)):
            f = A[i][c]
            if f:
                A[i] = [piv[c] * x - f * y for x, y in zip(A[i], piv)]
                g = content(A[i])
                if g > 1:
                    A[i] = [x // g for x in A[i]]
        rk += 1
    return rk


def inverse(M):
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [r[n:] for r in A]


def rank(M) -> int:
    A = [[Fraction(x) for x in r] for r in M]
    rk = 0
    ncols = len(A[0]) if A else 0
    for c in range(ncols):
        p = next((i for i in range(rk, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[rk], A[p] = A[p], A[rk]
        for i in range(rk + 1, len(A)):
            f = A[i][c] / A[rk][c]
            if f:
                A[i] = [x - f * y for x, y in zip(A[i], A[rk])]
        rk += 1
    return rk


def ldl(S):
    """Exact LDL^T of a symmetric matrix: returns (L, D) with unit lower L.

    Raises ValueError when a pivot is not positive, i.e. S is not positive
    definite.
    """
    n = len(S)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        s = Fraction(S[j][j]) - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if s <= 0:
            raise ValueError(f"matrix is not positive definite (pivot {j} = {s})")
        D[j] = s
        for i in range(j + 1, n):
            L[i][j] = (Fraction(S[i][j]) - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / s
    return L, D


def fraction_free_echelon(S):
    """Bareiss elimination of an integer symmetric PD matrix.

    Returns (U, minors): U is upper triangular with integer entries and
    minors[i] is the leading principal minor of order i (minors[0] = 1).  The
    quadratic form then splits as
        x^T S x = sum_i y_i^2 / (minors[i] * minors[i+1]),
        y_i = sum_{j >= i} U[i][j] x_j,
    with U[i][i] = minors[i+1].
    """
    n = len(S)
    A = [list(map(int, r)) for r in S]
    prev = 1
    minors = [1]
    for k in range(n):
        if A[k][k] <= 0:
            raise ValueError("matrix is not positive definite")
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[k][k] * A[i][j] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
        minors.append(prev)
        for i in range(k + 1, n):
            A[i][k] = 0
    return A, minors


def is_integer_matrix(M) -> bool:
    return all(Fraction(x).denominator == 1 for r in M for x in r)


def content(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
