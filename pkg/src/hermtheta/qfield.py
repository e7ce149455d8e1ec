"""Exact arithmetic in K = Q(sqrt(-m)), its maximal order and integral ideals.

Elements are stored in coordinates over the Z-basis {1, w} of O_K, where
w = sqrt(-m) for m != 3 (mod 4) and w = (1 + sqrt(-m))/2 otherwise.  Nothing
is ever converted to floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt

from .linalg import hnf


def is_squarefree(n: int) -> bool:
    if n < 1:
        return False
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return False
        p += 1
    return True


def squarefree_divisors(n: int) -> list[int]:
    """Positive squarefree divisors of |n|, ascending."""
    n = abs(n)
    primes = []
    p, r = 2, n
    while p * p <= r:
        if r % p == 0:
            primes.append(p)
            while r % p == 0:
                r //= p
        p += 1
    if r > 1:
        primes.append(r)
    divs = [1]
    for p in primes:
        divs += [d * p for d in divs]
    return sorted(divs)


@dataclass(frozen=True)
class FieldCtx:
    m: int
    d_K: int
    omega_trace: int
    omega_norm: int
    unit_count: int

    @property
    def abs_disc(self) -> int:
        return -self.d_K

    def elem(self, a, b=0) -> "KElem":
        return KElem(self, Fraction(a), Fraction(b))

    @property
    def one(self) -> "KElem":
        return self.elem(1)

    @property
    def zero(self) -> "KElem":
        return self.elem(0)

    @property
    def omega(self) -> "KElem":
        return self.elem(0, 1)

    @property
    def sqrt_neg_m(self) -> "KElem":
        # sqrt(-m) = w, or 2w - 1 when m = 3 (mod 4)
        if self.omega_trace == 0:
            return self.elem(0, 1)
        return self.elem(-1, 2)

    @property
    def sqrt_disc(self) -> "KElem":
        """The fixed branch sqrt(d_K) = i*sqrt(|d_K|)."""
        if self.omega_trace == 0:
            return self.elem(0, 2)
        return self.elem(-1, 2)

    def __repr__(self):
        return f"FieldCtx(m={self.m}, d_K={self.d_K})"


@lru_cache(maxsize=None)
def make_field(m: int) -> FieldCtx:
    if not isinstance(m, int) or not is_squarefree(m):
        raise ValueError(f"m must be a squarefree positive integer, got {m!r}")
    if m % 4 == 3:
        d_K, t, n = -m, 1, (1 + m) // 4
    else:
        d_K, t, n = -4 * m, 0, m
    units = sum(1 for a in (-1, 0, 1) for b in (-1, 0, 1) if a * a + t * a * b + n * b * b == 1)
    return FieldCtx(m, d_K, t, n, units)


class KElem:
    """An element a + b*w of K with rational a, b."""

    __slots__ = ("ctx", "a", "b")

    def __init__(self, ctx: FieldCtx, a, b=0):
        self.ctx = ctx
        self.a = Fraction(a)
        self.b = Fraction(b)

    def _coerce(self, other) -> "KElem":
        if isinstance(other, KElem):
            if other.ctx != self.ctx:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return KElem(self.ctx, other, 0)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KElem(self.ctx, self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return KElem(self.ctx, -self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return KElem(self.ctx, self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        t, n = self.ctx.omega_trace, self.ctx.omega_norm
        # w^2 = t*w - n
        bb = self.b * o.b
        return KElem(self.ctx, self.a * o.a - n * bb, self.a * o.b + self.b * o.a + t * bb)

    __rmul__ = __mul__

    def conj(self) -> "KElem":
        return KElem(self.ctx, self.a + self.ctx.omega_trace * self.b, -self.b)

    def norm(self) -> Fraction:
        t, n = self.ctx.omega_trace, self.ctx.omega_norm
        return self.a * self.a + t * self.a * self.b + n * self.b * self.b

    def trace(self) -> Fraction:
        return 2 * self.a + self.ctx.omega_trace * self.b

    def real(self) -> Fraction:
        return self.trace() / 2

    def inverse(self) -> "KElem":
        nrm = self.norm()
        if nrm == 0:
            raise ZeroDivisionError("division by zero in K")
        c = self.conj()
        return KElem(self.ctx, c.a / nrm, c.b / nrm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.ctx.m, self.a, self.b))

    def __repr__(self):
        return f"({self.a} + {self.b}*w)"

    def to_json(self) -> list[int]:
        den = self.a.denominator * self.b.denominator // gcd(self.a.denominator, self.b.denominator)
        return [int(self.a * den), int(self.b * den), den]

    @classmethod
    def from_json(cls, ctx: FieldCtx, data) -> "KElem":
        na, nb, den = data
        if den <= 0:
            raise ValueError("denominator must be positive")
        return cls(ctx, Fraction(na, den), Fraction(nb, den))


def omega_matrix(ctx: FieldCtx) -> tuple[tuple[int, int], tuple[int, int]]:
    """Row action of multiplication by w on coordinates: (a, b) -> (a, b) @ M."""
    t, n = ctx.omega_trace, ctx.omega_norm
    return ((0, 1), (-n, t))


@dataclass(frozen=True)
class Ideal:
    """Integral ideal given by its lower-triangular HNF [[h11, 0], [h21, h22]]."""

    ctx: FieldCtx
    hnf: tuple[tuple[int, int], tuple[int, int]]

    @property
    def norm(self) -> int:
        return self.hnf[0][0] * self.hnf[1][1]

    def basis(self) -> list[KElem]:
        return [self.ctx.elem(*row) for row in self.hnf]

    def contains(self, x: KElem) -> bool:
        if not x.is_integral():
            return False
        (h11, _), (h21, h22) = self.hnf
        a, b = int(x.a), int(x.b)
        if b % h22:
            return False
        q = b // h22
        return (a - q * h21) % h11 == 0

    def __mul__(self, other: "Ideal") -> "Ideal":
        return ideal_product(self, other)

    def to_json(self) -> dict:
        (h11, _), (h21, h22) = self.hnf
        return {"hnf": [[h11, 0], [h21, h22]], "norm": self.norm}


def _ideal_hnf(ctx: FieldCtx, rows: list[tuple[int, int]]) -> Ideal:
    # hnf() returns upper-triangular rows in (a, b); reorder to lower form with
    # columns (b, a) so the row with zero b-part comes first.
    swapped = [(b, a) for a, b in rows]
    h = hnf(swapped)
    if len(h) != 2:
        raise ValueError("generators do not span a rank-2 lattice")
    (b1, a1), (b2, a2) = h
    # h = [[b1, a1], [0, a2]]: rows as elements are (a1 + b1 w), (a2)
    return Ideal(ctx, ((a2, 0), (a1 % a2, b1)))


def ideal_from_gens(ctx: FieldCtx, gens) -> Ideal:
    gens = [g if isinstance(g, KElem) else ctx.elem(g) for g in gens]
    if not gens or all(g.is_zero() for g in gens):
        raise ValueError("need at least one nonzero generator")
    rows = []
    w = ctx.omega
    for g in gens:
        if not g.is_integral():
            raise ValueError(f"generator {g} is not integral")
        for x in (g, g * w):
            rows.append((int(x.a), int(x.b)))
    return _ideal_hnf(ctx, rows)


def unit_ideal(ctx: FieldCtx) -> Ideal:
    return Ideal(ctx, ((1, 0), (0, 1)))


def principal_ideal(x: KElem) -> Ideal:
    return ideal_from_gens(x.ctx, [x])


def ideal_product(I: Ideal, J: Ideal) -> Ideal:
    if I.ctx != J.ctx:
        raise ValueError("ideals of different fields")
    rows = []
    for x in I.basis():
        for y in J.basis():
            z = x * y
            rows.append((int(z.a), int(z.b)))
    # products of Z-bases span I*J as a Z-module since both are O_K-modules
    return _ideal_hnf(I.ctx, rows)


def ideal_power(I: Ideal, k: int) -> Ideal:
    out = unit_ideal(I.ctx)
    for _ in range(k):
        out = ideal_product(out, I)
    return out


def ideal_A_d(ctx: FieldCtx, d: int) -> Ideal:
    """The ideal d*O_K + (m + sqrt(-m))*O_K of norm d, for squarefree d | d_K."""
    if d not in squarefree_divisors(ctx.d_K):
        raise ValueError(f"d={d} is not a squarefree divisor of |d_K|={ctx.abs_disc}")
    I = ideal_from_gens(ctx, [ctx.elem(d), ctx.sqrt_neg_m + ctx.m])
    assert I.norm == d, (ctx, d, I)
    return I


def units(ctx: FieldCtx) -> list[KElem]:
    t, n = ctx.omega_trace, ctx.omega_norm
    return [ctx.elem(a, b) for a in (-1, 0, 1) for b in (-1, 0, 1) if a * a + t * a * b + n * b * b == 1]


def norm_form_bound(ctx: FieldCtx, N: int) -> list[KElem]:
    """All integral x with norm(x) <= N."""
    t, n = ctx.omega_trace, ctx.omega_norm
    out = []
    # 4n - t^2 = |d_K| ; norm = (a + t b/2)^2 + |d_K| b^2 / 4
    bmax = isqrt(4 * N // ctx.abs_disc) + 1
    for b in range(-bmax, bmax + 1):
        for a in range(-isqrt(N) - abs(b) - 1, isqrt(N) + abs(b) + 2):
            if a * a + t * a * b + n * b * b <= N:
                out.append(ctx.elem(a, b))
    return out
