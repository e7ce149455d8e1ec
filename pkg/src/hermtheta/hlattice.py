"""O_K-lattices in K^r with the standard Hermitian form and their trace data."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt

import numpy as np

from .enumeration import short_vectors
from .linalg import det, inverse, is_integer_matrix, matmul, rank, rational_hnf, transpose
from .qfield import FieldCtx, Ideal, KElem, make_field


def _flatten(ctx: FieldCtx, vec) -> tuple:
    out = []
    for x in vec:
        x = x if isinstance(x, KElem) else ctx.elem(x)
        out += [x.a, x.b]
    return tuple(out)


def _unflatten(ctx: FieldCtx, row) -> list[KElem]:
    return [ctx.elem(row[2 * i], row[2 * i + 1]) for i in range(len(row) // 2)]


def _ambient_gram(ctx: FieldCtx, r: int):
    """Gram of Re(conj(x)^T y) on Q^{2r} in {1, w} coordinates."""
    t2 = Fraction(ctx.omega_trace, 2)
    G = [[Fraction(0)] * (2 * r) for _ in range(2 * r)]
    for i in range(r):
        G[2 * i][2 * i] = Fraction(1)
        G[2 * i][2 * i + 1] = G[2 * i + 1][2 * i] = t2
        G[2 * i + 1][2 * i + 1] = Fraction(ctx.omega_norm)
    return G


@dataclass(frozen=True)
class TraceData:
    """S[i][j] = Re h(b_i, b_j); Omega[:, j] = coordinates of w * b_j."""

    S: list
    Omega: list
    lattice: "HermLattice"

    def H(self, i: int, j: int) -> KElem:
        return self.lattice.h(self.lattice.basis[i], self.lattice.basis[j])


class HermLattice:
    """Z-lattice of rank 2r in K^r closed under O_K, with form h / form_den.

    ``basis`` rows are Z-basis vectors, each a list of r elements of K.
    """

    def __init__(self, ctx: FieldCtx, basis, form_den: int = 1, check: bool = True):
        self.ctx = ctx
        self.basis = [list(v) for v in basis]
        self.rank = len(self.basis[0]) if self.basis else 0
        self.form_den = form_den
        if check:
            self._validate()

    @property
    def ambient_dim(self) -> int:
        return self.rank

    @cached_property
    def flat(self):
        return [_flatten(self.ctx, v) for v in self.basis]

    def _validate(self):
        if len(self.basis) != 2 * self.rank:
            raise ValueError(f"need {2 * self.rank} basis vectors, got {len(self.basis)}")
        if rank(self.flat) != 2 * self.rank:
            raise ValueError("basis vectors are not Z-linearly independent")
        if not is_integer_matrix(self.omega_matrix):
            raise ValueError("lattice is not closed under multiplication by w")

    @classmethod
    def from_generators(cls, ctx: FieldCtx, gens, form_den: int = 1) -> "HermLattice":
        """O_K-span of the given vectors, reduced to an HNF Z-basis."""
        rows = []
        w = ctx.omega
        for g in gens:
            g = [x if isinstance(x, KElem) else ctx.elem(x) for x in g]
            rows.append(_flatten(ctx, g))
            rows.append(_flatten(ctx, [w * x for x in g]))
        return cls.from_flat(ctx, rows, form_den)

    @classmethod
    def from_flat(cls, ctx: FieldCtx, rows, form_den: int = 1) -> "HermLattice":
        basis = [_unflatten(ctx, r) for r in rational_hnf(rows)]
        return cls(ctx, basis, form_den)

    def h(self, x, y) -> KElem:
        """Hermitian form conj(x)^T y / form_den on vectors of K^r."""
        acc = self.ctx.zero
        for a, b in zip(x, y):
            acc = acc + a.conj() * b
        return acc * Fraction(1, self.form_den)

    @cached_property
    def gram(self):
        """Trace Gram S as a list of Fractions."""
        G = _ambient_gram(self.ctx, self.rank)
        B = self.flat
        S = matmul(matmul(B, G), transpose(B))
        return [[x / self.form_den for x in row] for row in S]

    @cached_property
    def omega_matrix(self):
        """Integer (if closed) matrix Omega with w * b_j = sum_i Omega[i][j] b_i."""
        w = self.ctx.omega
        images = [_flatten(self.ctx, [w * x for x in v]) for v in self.basis]
        # coords C with images = C^T-rows in basis: images[j] = sum_i Omega[i][j] b_i
        Binv = inverse(self.flat)
        coeffs = matmul(images, Binv)  # row j = coordinates of w*b_j
        return [[coeffs[j][i] for j in range(len(coeffs))] for i in range(len(coeffs))]

    def trace_data(self) -> TraceData:
        return TraceData(self.gram, self.omega_matrix, self)

    @cached_property
    def int_gram(self):
        return [[int(x) for x in row] for row in self.gram] if is_integer_matrix(self.gram) else None

    @cached_property
    def _omega_np(self):
        return np.asarray([[int(x) for x in row] for row in self.omega_matrix], dtype=np.int64)

    @cached_property
    def _gram_np(self):
        if self.int_gram is None:
            raise ValueError("trace form is not integral")
        return np.asarray(self.int_gram, dtype=np.int64)

    def vector(self, coords) -> list[KElem]:
        out = [self.ctx.zero] * self.rank
        for c, b in zip(coords, self.basis):
            if c:
                out = [o + c * x for o, x in zip(out, b)]
        return out

    def norm_of(self, coords) -> Fraction:
        S = self.gram
        n = len(coords)
        return sum(S[i][j] * coords[i] * coords[j] for i in range(n) for j in range(n))

    def herm_coords(self, F: int, Fw: int) -> KElem:
        """Recover h(x, y) in K from F = Re h(x, y) and Fw = Re h(x, w y)."""
        # h = a + b w : Re h = a + b t/2,  Re(w h) = -b n + (a + b t) t/2
        t, n = self.ctx.omega_trace, self.ctx.omega_norm
        F, Fw = Fraction(F), Fraction(Fw)
        # solve [[1, t/2], [t/2, t^2/2 - n]] (a, b) = (F, Fw)
        a11, a12, a22 = Fraction(1), Fraction(t, 2), Fraction(t * t, 2) - n
        dd = a11 * a22 - a12 * a12
        a = (F * a22 - a12 * Fw) / dd
        b = (a11 * Fw - a12 * F) / dd
        return self.ctx.elem(a, b)

    # short vectors are cached per lattice, grown on demand
    def short_vector_set(self, bound):
        cache = self.__dict__.setdefault("_svcache", {})
        best = max((b for b in cache if b >= bound), default=None)
        if best is None:
            cache[bound] = short_vectors(self.gram, bound)
            best = bound
        return cache[best]

    def vectors_up_to(self, c):
        return self.short_vector_set(c).coords()

    def to_json(self) -> dict:
        return {
            "m": self.ctx.m,
            "rank": self.rank,
            "basis": [[x.to_json() for x in v] for v in self.basis],
            "form_den": self.form_den,
        }

    @classmethod
    def from_json(cls, data) -> "HermLattice":
        ctx = make_field(data["m"])
        basis = [[KElem.from_json(ctx, x) for x in v] for v in data["basis"]]
        return cls(ctx, basis, data.get("form_den", 1))

    def __repr__(self):
        return f"HermLattice(m={self.ctx.m}, rank={self.rank}, form_den={self.form_den})"


@dataclass
class ThetaReport:
    is_theta: bool
    integral: bool
    even: bool
    det: Fraction
    closed: bool

    def __bool__(self):
        return self.is_theta

    def failures(self) -> list[str]:
        out = []
        if not self.closed:
            out.append("not closed under O_K")
        if not self.integral:
            out.append("trace form not integral")
        if not self.even:
            out.append("trace form not even")
        if self.det != 1:
            out.append(f"det S = {self.det} != 1")
        return out


def is_theta_lattice(L: HermLattice) -> ThetaReport:
    S = L.gram
    integral = is_integer_matrix(S)
    even = integral and all(int(S[i][i]) % 2 == 0 for i in range(len(S)))
    closed = is_integer_matrix(L.omega_matrix)
    d = det(S)
    return ThetaReport(integral and even and closed and d == 1, integral, even, d, closed)


def standard_lattice(ctx: FieldCtx, r: int) -> HermLattice:
    """O_K^r with the standard form."""
    gens = [[ctx.one if i == j else ctx.zero for j in range(r)] for i in range(r)]
    return HermLattice.from_generators(ctx, gens)


def find_alpha_beta(ctx: FieldCtx, d: int | None = None) -> tuple[int, int] | None:
    """Smallest (alpha, beta) in lex order with c + 1 + alpha^2 + beta^2 = 0 mod |d_K|.

    ``c`` is m by default, or the given d for the literal reading.
    """
    D = ctx.abs_disc
    c = ctx.m if d is None else d
    for alpha in range(D):
        for beta in range(D):
            if (c + 1 + alpha * alpha + beta * beta) % D == 0:
                return alpha, beta
    return None


def _sqrt_neg(ctx: FieldCtx, d: int) -> KElem | None:
    """sqrt(-d) as an element of K (branch i*sqrt(d)), or None if not in K."""
    # sqrt(-d) = q * sqrt(-m) with q^2 = d/m
    q2 = Fraction(d, ctx.m)
    num, den = q2.numerator, q2.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        return None
    return ctx.sqrt_neg_m * Fraction(rn, rd)


def hnk_lattice(ctx: FieldCtx, reading: str = "m", d: int | None = None, alpha_beta=None) -> HermLattice:
    """The free rank-4 theta lattice spanned by e1..e4 (see README).

    reading="m" uses u = alpha + beta + sqrt(-m); reading="d" uses sqrt(-d)
    literally and fails when sqrt(-d) is not in K.
    """
    if reading == "m":
        c = ctx.m
    elif reading == "d":
        if d is None:
            raise ValueError("reading 'd' needs d")
        c = d
    else:
        raise ValueError(f"unknown reading {reading!r}")
    root = _sqrt_neg(ctx, c)
    if root is None:
        raise ValueError(f"sqrt(-{c}) is not an element of K = Q(sqrt(-{ctx.m}))")
    ab = alpha_beta if alpha_beta is not None else find_alpha_beta(ctx, c)
    if ab is None:
        raise ValueError(f"no (alpha, beta) solves the congruence for m={ctx.m}")
    alpha, beta = ab
    u = root + (alpha + beta)
    v = root + (alpha - beta)
    s = ctx.sqrt_disc.inverse()
    one, zero = ctx.one, ctx.zero
    gens = [
        [one, one, zero, zero],
        [-one, one, zero, zero],
        [u * s, v * s, s, s],
        [-v.conj() * s, u.conj() * s, -s, s],
    ]
    L = HermLattice.from_generators(ctx, gens)
    rep = is_theta_lattice(L)
    if not rep:
        raise ValueError(f"constructed lattice for m={ctx.m} is not a theta lattice: {rep.failures()}")
    return L


def scale_by_ideal(L: HermLattice, I: Ideal) -> HermLattice:
    """The module I*L with form h / N(I) (the lattice (1/sqrt N(I)) I L)."""
    if I.ctx != L.ctx:
        raise ValueError("ideal and lattice over different fields")
    if I.norm == 0:
        raise ValueError("zero ideal")
    rows = []
    for g in I.basis():
        for b in L.basis:
            rows.append(_flatten(L.ctx, [g * x for x in b]))
    return HermLattice.from_flat(L.ctx, rows, L.form_den * I.norm)


def index_in(sub: HermLattice, sup: HermLattice) -> Fraction:
    """[sup : sub] as Z-modules (may be fractional if sub is not contained)."""
    return abs(det(sub.flat) / det(sup.flat))


def contains(sup: HermLattice, sub_rows) -> bool:
    """True iff every flat row lies in the Z-span of sup's basis."""
    Binv = inverse(sup.flat)
    return is_integer_matrix(matmul([list(r) for r in sub_rows], Binv))
