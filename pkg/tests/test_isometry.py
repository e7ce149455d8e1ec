import random

import pytest

from hermtheta.hlattice import HermLattice, _flatten, _unflatten, standard_lattice
from hermtheta.isometry import search_isometry, strongly_modular_2, verify_isometry
from hermtheta.linalg import int_det, matmul
from hermtheta.qfield import make_field, units


def unimodular(rng, n):
    while True:
        A = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(3 * n):
            i, j = rng.sample(range(n), 2)
            c = rng.randint(-2, 2)
            A[i] = [a + c * b for a, b in zip(A[i], A[j])]
        if abs(int_det(A)) == 1:
            return A


def rebased(L, A):
    rows = matmul(A, L.flat)
    return HermLattice(L.ctx, [_unflatten(L.ctx, r) for r in rows])


def moved(L, perm, unit_list):
    """Image of L under x -> (u_i x_perm(i)), an isometry of K^4."""
    ctx = L.ctx
    gens = [[unit_list[i] * v[perm[i]] for i in range(4)] for v in L.basis]
    rows = [_flatten(ctx, g) for g in gens]
    return HermLattice.from_flat(ctx, rows)


@pytest.mark.parametrize("m", [1, 3, 5, 7, 30])
def test_rebased_lattice_isometric(m, lattices):
    L = lattices(m)
    L2 = rebased(L, unimodular(random.Random(m), 8))
    res = search_isometry(L, L2)
    assert res.isometric and verify_isometry(res.witness.U, L, L2)


@pytest.mark.parametrize("m", [1, 3, 6, 15])
def test_moved_lattice_isometric(m, lattices):
    L = lattices(m)
    rng = random.Random(7)
    us = units(L.ctx)
    L2 = moved(L, rng.sample(range(4), 4), [rng.choice(us) for _ in range(4)])
    res = search_isometry(L, L2)
    assert res.isometric
    assert verify_isometry(res.witness.U, L, L2)
    assert not verify_isometry([[2 * x for x in r] for r in res.witness.U], L, L2)


def test_non_isometric_pair(lattices):
    res = search_isometry(lattices(30), lattices(30, 5))
    assert not res.isometric
    assert res.reason != "found"


def test_determinant_shortcut(lattices):
    L = lattices(5)
    scaled = HermLattice(L.ctx, L.basis, form_den=1)
    doubled = HermLattice(L.ctx, [[2 * x for x in v] for v in L.basis])
    assert search_isometry(scaled, doubled).reason == "determinants differ"


def test_strong_modularity_examples(lattices):
    good = strongly_modular_2(lattices(5))
    assert good.overall and good.verdicts[1].reason == "identity"
    bad = strongly_modular_2(lattices(30))
    assert not bad.overall
    assert sorted(d for d, v in bad.verdicts.items() if not v.isometric) == [2, 5, 6, 15]


def test_requires_theta_lattice():
    with pytest.raises(ValueError):
        strongly_modular_2(standard_lattice(make_field(2), 4))
