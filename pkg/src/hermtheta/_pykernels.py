"""Pure-Python kernels; used when the compiled extension is unavailable."""
from math import isqrt


def enumerate_short(U, weights, budget):
    """Sign classes of nonzero integer x with sum_k weights[k]*y_k^2 <= budget.

    ``U`` is the upper-triangular fraction-free echelon form of the Gram
    matrix, y_k = sum_{j >= k} U[k][j] x_j.  Coordinates are fixed from the
    last index downwards; a vector is kept iff its last nonzero coordinate is
    positive.
    """
    n = len(U)
    x = [0] * n
    out = []
    if budget <= 0 or n == 0:
        return out

    def rec(k, rem, lead_zero):
        row = U[k]
        num = 0
        for j in range(k + 1, n):
            num += row[j] * x[j]
        dk = row[k]
        wk = weights[k]
        s = isqrt(rem // wk)
        lo = -((s + num) // dk)
        hi = (s - num) // dk
        if lead_zero and lo < 0:
            lo = 0
        for xi in range(lo, hi + 1):
            y = dk * xi + num
            r2 = rem - wk * y * y
            if r2 < 0:
                continue
            x[k] = xi
            if k == 0:
                if not (lead_zero and xi == 0):
                    out.append(tuple(x))
            else:
                rec(k - 1, r2, lead_zero and xi == 0)
        x[k] = 0

    rec(n - 1, budget, True)
    return out

