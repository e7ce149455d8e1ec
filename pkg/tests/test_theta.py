import json
import random
from fractions import Fraction

import numpy as np
import pytest

from hermtheta.qfield import make_field
from hermtheta.theta import (
    CoefficientTable,
    HermIndex,
    _vectors,
    index_from_gram,
    index_from_matrix,
    indices_up_to_trace,
    swap_index,
    table_first_mismatch,
    theta_coeff,
    theta_table,
)

from oracles import brute_pair_count, herm_det_oracle


def test_index_arithmetic():
    ctx = make_field(5)
    T = HermIndex(2, 3, 4, 2)
    assert T.epsilon() == 1 and HermIndex(2, 4, 6, 2).epsilon() == 2
    assert T.det_d(ctx) == 20 * 6 - (16 + 5 * 4)
    assert index_from_matrix(ctx, T.matrix(ctx)) == T
    assert swap_index(ctx, swap_index(ctx, T)) == T


@pytest.mark.parametrize("m", [1, 2, 3, 5, 7, 15, 30])
def test_detD_and_RS_against_definition(m):
    ctx = make_field(m)
    rng = random.Random(m)
    for _ in range(50):
        T = HermIndex(rng.randint(0, 9), rng.randint(0, 9), rng.randint(-20, 20), rng.randint(-20, 20))
        assert T.det_d(ctx) == herm_det_oracle(ctx, T)
        t = T.t(ctx)
        R, S = T.RS(ctx)
        # R = 2 Re t, S = 2 sqrt(m) Im t; (t - conj t)^2 = -4 (Im t)^2
        assert R == 2 * t.real()
        diff = t - t.conj()
        assert Fraction(S * S) == -(diff * diff).a * m


def test_off_lattice_matrix_rejected():
    ctx = make_field(5)
    half = ctx.elem(Fraction(1, 2))
    with pytest.raises(ValueError):
        index_from_matrix(ctx, [[half, ctx.zero], [ctx.zero, ctx.one]])
    with pytest.raises(ValueError):
        index_from_matrix(ctx, [[ctx.one, ctx.elem(Fraction(1, 3))], [ctx.elem(Fraction(1, 3)), ctx.one]])


def test_indices_up_to_trace():
    ctx = make_field(3)
    idx = indices_up_to_trace(ctx, 2)
    assert HermIndex(0, 0, 0, 0) in idx
    assert all(T.is_psd(ctx) and T.trace() <= 2 for T in idx)
    assert len(idx) == len(set(idx))


def test_degree_one_counts(lattices):
    L = lattices(5)
    assert [theta_coeff(L, k, 1) for k in range(3)] == [1, 240, 2160]


def test_pair_counts_against_brute_force(lattices):
    L = lattices(3)
    S, Om = L._gram_np, L._omega_np
    V1, V2 = _vectors(L, 2), _vectors(L, 2)
    table = theta_table(L, 2)
    ctx = L.ctx
    for T in [HermIndex(1, 1, 0, 0), HermIndex(1, 1, 1, 0), HermIndex(1, 1, 0, 1), HermIndex(1, 1, 1, 1)]:
        # the pair (x, y) realises T when h(x, y) = 2 t
        t2 = T.t(ctx) * 2
        F = int(t2.real())
        Fw = int((t2 * ctx.omega).real())
        assert table.entries[T] == brute_pair_count((V1, V2), S, F, Fw, Om)


def test_gram_to_index(lattices):
    L = lattices(7)
    ctx = L.ctx
    x, y = _vectors(L, 2)[0], _vectors(L, 4)[3]
    hx, hy = L.vector(list(map(int, x))), L.vector(list(map(int, y)))
    G = [[L.h(hx, hx), L.h(hx, hy)], [L.h(hy, hx), L.h(hy, hy)]]
    T = index_from_gram(ctx, G)
    assert (T.k, T.l) == (1, 2)
    assert theta_coeff(L, T) >= 1


def test_table_symmetry_and_zero(lattices):
    L = lattices(6)
    tab = theta_table(L, 3)
    ctx = L.ctx
    assert tab.entries[HermIndex(0, 0, 0, 0)] == 1
    for T, v in tab.entries.items():
        assert tab.entries[swap_index(ctx, T)] == v
    assert sum(v for T, v in tab.entries.items() if T.k == 1 and T.l == 0) == 240


def test_trace_bound_zero(lattices):
    assert list(theta_table(lattices(5), 0).entries) == [HermIndex(0, 0, 0, 0)]


def test_table_json_roundtrip(lattices):
    tab = theta_table(lattices(5), 2)
    data = json.loads(json.dumps(tab.to_json()))
    back = CoefficientTable.from_json(data)
    assert back.entries == tab.entries and back.weight == 4
    assert table_first_mismatch(tab, back) is None


@pytest.mark.parametrize("bad", [{}, {"m": 5}, {"m": 4, "weight": 4, "bound": 1, "entries": []},
                                 {"m": 5, "weight": 4, "bound": 1, "entries": [{"k": 1}]}])
def test_malformed_table(bad):
    with pytest.raises(ValueError):
        CoefficientTable.from_json(bad)


def test_mismatch_needs_compatible_tables(lattices):
    with pytest.raises(ValueError):
        table_first_mismatch(theta_table(lattices(5), 1), theta_table(lattices(5), 2))


def test_good_and_bad_m_tables(lattices):
    assert table_first_mismatch(theta_table(lattices(5), 3), theta_table(lattices(5, 2), 3)) is None
    hit = table_first_mismatch(theta_table(lattices(30), 2), theta_table(lattices(30, 5), 2))
    assert hit is not None and hit[0].k == 1 and hit[0].l == 1
