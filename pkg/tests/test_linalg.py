import random
from fractions import Fraction

import pytest

from hermtheta.linalg import det, fraction_free_echelon, hnf, int_det, int_rank, inverse, ldl, matmul, rank


def rand_matrix(rng, n, lo=-5, hi=5):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]


def test_det_agree():
    rng = random.Random(3)
    for n in range(1, 7):
        for _ in range(20):
            M = rand_matrix(rng, n)
            assert det(M) == int_det(M)


def test_rank_agree():
    rng = random.Random(4)
    for _ in range(50):
        M = [[rng.randint(-2, 2) for _ in range(5)] for _ in range(rng.randint(1, 7))]
        assert rank(M) == int_rank(M)


def test_inverse():
    rng = random.Random(5)
    for _ in range(20):
        M = rand_matrix(rng, 4)
        if det(M) == 0:
            with pytest.raises(ZeroDivisionError):
                inverse(M)
            continue
        Mi = inverse(M)
        assert matmul(M, Mi) == [[Fraction(int(i == j)) for j in range(4)] for i in range(4)]


def test_hnf_spans_same_lattice():
    rows = [(4, 6, 2), (2, 2, 0), (6, 8, 2)]
    H = hnf(rows)
    pivots = [next(j for j, c in enumerate(h) if c) for h in H]
    assert pivots == sorted(set(pivots))
    assert all(H[i][p] > 0 for i, p in enumerate(pivots))
    assert len(H) == rank(rows)
    # every input row is an integer combination of H (solve by back substitution)
    for r in rows:
        v = list(r)
        for h in H:
            piv = next(j for j, c in enumerate(h) if c)
            q, rem = divmod(v[piv], h[piv])
            assert rem == 0
            v = [a - q * b for a, b in zip(v, h)]
        assert not any(v)


def test_ldl_and_bareiss():
    S = [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
    L, D = ldl(S)
    assert D == [2, Fraction(3, 2), Fraction(4, 3)]
    U, minors = fraction_free_echelon(S)
    assert minors == [1, 2, 3, 4]
    with pytest.raises(ValueError):
        ldl([[1, 2], [2, 1]])
