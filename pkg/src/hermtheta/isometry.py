"""Isometry of Hermitian O_K-lattices.

A Hermitian isometry is the same thing as a Z-isometry of the trace lattices
that commutes with multiplication by w.  The search fixes images of r short
vectors v_1..v_r whose O_K-span has full rank; an O_K-linear map is determined
by those images, so each complete choice is checked by one exact solve.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hlattice import HermLattice, is_theta_lattice, scale_by_ideal
from .linalg import det, int_det, int_rank, inverse, is_integer_matrix, matmul, rank, transpose
from .qfield import ideal_A_d, squarefree_divisors

# pair keys combine F(x, y) and F(x, w y) into one int64
_KEY_BASE = 1 << 24


@dataclass
class IsometryWitness:
    """U maps Lambda_1 coordinates (columns) to Lambda_2 coordinates."""

    U: list

    def to_json(self):
        return [[int(x) for x in row] for row in self.U]


@dataclass
class SearchResult:
    witness: IsometryWitness | None
    reason: str
    nodes: int = 0
    leaves: int = 0
    stats: dict = field(default_factory=dict)

    @property
    def isometric(self) -> bool:
        return self.witness is not None


def verify_isometry(U, L1: HermLattice, L2: HermLattice) -> bool:
    n = 2 * L1.rank
    if len(U) != n or any(len(r) != n for r in U) or 2 * L2.rank != n:
        return False
    if not is_integer_matrix(U):
        return False
    if matmul(matmul(transpose(U), L2.gram), U) != [[Fraction(x) for x in r] for r in L1.gram]:
        return False
    if matmul(U, L1.omega_matrix) != matmul(L2.omega_matrix, U):
        return False
    return abs(det(U)) == 1


class _Side:
    """Short-vector data of one lattice used by the search."""

    def __init__(self, L: HermLattice, norms):
        self.L = L
        S = L._gram_np
        Om = L._omega_np
        sv = L.short_vector_set(max(norms))
        rows = []
        for c in norms:
            half = sv.with_norm(c)
            rows.append(half)
            rows.append(-half)
        self.V = np.concatenate(rows) if rows else np.empty((0, 2 * L.rank), dtype=np.int64)
        self.norms = (self.V @ S * self.V).sum(axis=1)
        F = self.V @ S @ self.V.T
        Fw = self.V @ S @ Om @ self.V.T
        self.K = F * _KEY_BASE + Fw
        self.fp = [hash(tuple(sorted(Counter(row.tolist()).items()))) for row in self.K]
        self.fp_arr = np.asarray(self.fp, dtype=np.int64)


def _norm_levels(L: HermLattice, max_norm: int = 8):
    """Smallest initial run of norms whose vectors span L over Q (as O_K-module)."""
    S = L.gram
    sv = L.short_vector_set(max_norm)
    levels = sorted({int(q) for q in sv.norm_num}) if len(sv) else []
    used = []
    for c in levels:
        used.append(Fraction(c, sv.den))
        rows = [list(map(int, v)) for c2 in used for v in sv.with_norm(c2)]
        if rows and rank(rows) == len(S):
            return used
    raise ValueError("short vectors do not span the lattice; raise max_norm")


def _frame(side: _Side, r: int, Om, tries: int = 300):
    """Indices of r vectors whose coordinates together with w-images are independent.

    Prefers a unimodular frame; otherwise returns the smallest index found.
    """
    V = side.V
    counts = Counter(side.fp)
    order = sorted(range(len(V)), key=lambda i: (counts[side.fp[i]], i))
    best = None
    seen = 0

    def cols(idx):
        out = []
        for i in idx:
            c = V[i].tolist()
            out.append(c)
            out.append((Om @ V[i]).tolist())
        return out

    def rec(chosen):
        nonlocal best, seen
        if len(chosen) == r:
            seen += 1
            d = abs(int_det(cols(chosen)))
            if best is None or d < best[0]:
                best = (d, list(chosen))
            return best[0] == 1 or seen >= tries
        base = cols(chosen)
        for i in order:
            if i in chosen:
                continue
            if int_rank(base + cols([i])) == 2 * (len(chosen) + 1):
                if rec(chosen + [i]):
                    return True
        return False

    rec([])
    if best is None:
        raise ValueError("no O_K-independent frame among short vectors")
    return best[1]


def search_isometry(L1: HermLattice, L2: HermLattice, max_norm: int = 8) -> SearchResult:
    if L1.ctx != L2.ctx or L1.rank != L2.rank:
        raise ValueError("lattices must share field and rank")
    if L1.int_gram is None or L2.int_gram is None:
        raise ValueError("isometry search needs integral trace forms")
    r = L1.rank
    if det(L1.gram) != det(L2.gram):
        return SearchResult(None, "determinants differ")
    norms = _norm_levels(L1, max_norm)
    s1, s2 = L1.short_vector_set(max(norms)), L2.short_vector_set(max(norms))
    for c in norms:
        if len(s1.with_norm(c)) != len(s2.with_norm(c)):
            return SearchResult(None, f"vector counts differ at norm {c}")
    A, B = _Side(L1, norms), _Side(L2, norms)
    if Counter(A.fp) != Counter(B.fp):
        return SearchResult(None, "fingerprint multisets differ")

    Om1, Om2 = L1._omega_np, L2._omega_np
    frame = _frame(A, r, Om1)
    C = []
    for i in frame:
        C.append(A.V[i].tolist())
        C.append((Om1 @ A.V[i]).tolist())
    Cinv = inverse(transpose(C))  # columns of C^T are the frame coordinates

    res = SearchResult(None, "exhausted", stats={"frame_det": abs(det(C))})
    chosen: list[int] = []

    def leaf():
        W = []
        for j in chosen:
            W.append(B.V[j].tolist())
            W.append((Om2 @ B.V[j]).tolist())
        U = matmul(transpose(W), Cinv)
        if is_integer_matrix(U):
            U = [[int(x) for x in row] for row in U]
            if verify_isometry(U, L1, L2):
                return U
        return None

    def rec(level):
        res.nodes += 1
        vi = frame[level]
        mask = B.fp_arr == A.fp_arr[vi]
        for lvl, j in enumerate(chosen):
            mask &= B.K[j] == A.K[frame[lvl], vi]
        for j in np.flatnonzero(mask):
            chosen.append(int(j))
            if level + 1 == r:
                res.leaves += 1
                U = leaf()
                if U is not None:
                    res.witness = IsometryWitness(U)
                    res.reason = "found"
                    return True
            elif rec(level + 1):
                return True
            chosen.pop()
        return False

    rec(0)
    return res


def hermitian_isometric(L1: HermLattice, L2: HermLattice) -> IsometryWitness | None:
    return search_isometry(L1, L2).witness


@dataclass
class ModularityReport:
    m: int
    verdicts: dict  # d -> SearchResult
    overall: bool


def strongly_modular_2(L: HermLattice) -> ModularityReport:
    """Check L = (1/sqrt d) A_d L for every squarefree d | d_K."""
    if not is_theta_lattice(L):
        raise ValueError("lattice is not a theta lattice")
    ctx = L.ctx
    verdicts = {}
    for d in squarefree_divisors(ctx.d_K):
        if d == 1:
            n = 2 * L.rank
            verdicts[d] = SearchResult(IsometryWitness([[int(i == j) for j in range(n)] for i in range(n)]), "identity")
            continue
        verdicts[d] = search_isometry(L, scale_by_ideal(L, ideal_A_d(ctx, d)))
    return ModularityReport(ctx.m, verdicts, all(v.isometric for v in verdicts.values()))
