"""Atkin-Lehner matrices V_d, their action on indices, class-A membership and SU(n,n).

V_d = (1/sqrt d) * L_d with L_d = [[alpha d, beta (m + sqrt(-m))],
[gamma (m - sqrt(-m)), delta d]] in O_K^{2x2}.  Only L_d is ever stored;
every product that involves V_d is arranged so that sqrt(d) appears squared.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .qfield import (
    FieldCtx,
    Ideal,
    KElem,
    ideal_from_gens,
    ideal_power,
    principal_ideal,
    squarefree_divisors,
)
from .theta import HermIndex, index_from_matrix


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (1, 0, a) if a >= 0 else (-1, 0, -a)
    x, y, g = _ext_gcd(b, a % b)
    return y, x - (a // b) * y, g


@dataclass(frozen=True)
class AtkinLehner:
    ctx: FieldCtx
    d: int
    alpha: int
    beta: int
    gamma: int
    delta: int

    @property
    def det(self) -> Fraction:
        m = self.ctx.m
        return Fraction(self.alpha * self.delta * self.d) - Fraction(self.beta * self.gamma * m * (m + 1), self.d)

    def L(self):
        """The integral matrix sqrt(d) * V_d."""
        ctx, m, d = self.ctx, self.ctx.m, self.d
        s = ctx.sqrt_neg_m
        return [
            [ctx.elem(self.alpha * d), (s + m) * self.beta],
            [(m - s) * self.gamma, ctx.elem(self.delta * d)],
        ]

    def L_inverse(self):
        """sqrt(d) * V_d^{-1} = adjugate of L (det V_d = 1)."""
        (p, q), (r, s) = self.L()
        return [[s, -q], [-r, p]]

    def to_json(self) -> dict:
        return {"d": self.d, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma, "delta": self.delta}

    def symbolic(self) -> str:
        m = self.ctx.m
        return (
            f"V_{self.d} = 1/sqrt({self.d}) * [[{self.alpha * self.d}, {self.beta}*({m} + sqrt(-{m}))], "
            f"[{self.gamma}*({m} - sqrt(-{m})), {self.delta * self.d}]]"
        )


def build_vd(ctx: FieldCtx, d: int) -> AtkinLehner:
    """Solve alpha*delta*d - beta*gamma*m(m+1)/d = 1 with minimal beta >= 0.

    Canonical choice: gamma = delta = 1 (gamma = 0 when beta = 0).
    """
    if d not in squarefree_divisors(ctx.d_K):
        raise ValueError(f"d={d} is not a squarefree divisor of |d_K|={ctx.abs_disc}")
    m = ctx.m
    N = m * (m + 1)
    if N % d:
        raise ValueError(f"d={d} does not divide m(m+1)")
    N //= d
    # x*d - y*N = 1
    x, y, g = _ext_gcd(d, N)
    if g != 1:
        raise ValueError(f"gcd(d, m(m+1)/d) = {g} != 1")
    # general solution y = -y0 + k*d ; take smallest y >= 0
    y = (-y) % d if d > 1 else 0
    x = (1 + y * N) // d
    V = AtkinLehner(ctx, d, x, y, 1 if y else 0, 1)
    assert V.det == 1, V
    return V


def _hermitian_transform(ctx: FieldCtx, T, A, scale: Fraction):
    """scale * conj(A)^T T A for 2x2 K-matrices."""
    Ah = [[A[j][i].conj() for j in range(2)] for i in range(2)]
    TA = [[sum((T[i][k] * A[k][j] for k in range(2)), ctx.zero) for j in range(2)] for i in range(2)]
    return [[sum((Ah[i][k] * TA[k][j] for k in range(2)), ctx.zero) * scale for j in range(2)] for i in range(2)]


def vd_act(T: HermIndex, V: AtkinLehner, invert: bool = False) -> HermIndex:
    """T[V] = conj(V)^T T V (or T[V^{-1}] when ``invert``)."""
    ctx = V.ctx
    A = V.L_inverse() if invert else V.L()
    M = _hermitian_transform(ctx, T.matrix(ctx), A, Fraction(1, V.d))
    try:
        return index_from_matrix(ctx, M)
    except ValueError as exc:
        raise AssertionError(f"T[V_{V.d}] left Lambda(2, O_K) for {T}: {exc}") from exc


def act_on_matrix(ctx: FieldCtx, T, V: AtkinLehner, invert: bool = False):
    """T[V] on an arbitrary Hermitian 2x2 K-matrix (no membership assumed)."""
    A = V.L_inverse() if invert else V.L()
    return _hermitian_transform(ctx, T, A, Fraction(1, V.d))


@dataclass
class ClassAWitness:
    L: list
    ideal: Ideal
    ideal_norm: int
    det_norm: Fraction
    accepted: bool


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    acc = M[0][0] * 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def class_A_check(ctx: FieldCtx, L, detL: KElem | None = None) -> ClassAWitness:
    """Is I(L)^n = det(L) O_K for the integral n x n matrix L?"""
    L = [[x if isinstance(x, KElem) else ctx.elem(x) for x in row] for row in L]
    n = len(L)
    if any(not x.is_integral() for row in L for x in row):
        raise ValueError("L must have entries in O_K")
    D = _det(L)
    if detL is not None and D != detL:
        raise ValueError("given determinant does not match det(L)")
    if D.is_zero():
        raise ValueError("L is singular")
    I = ideal_from_gens(ctx, [x for row in L for x in row if not x.is_zero()])
    ok = ideal_power(I, n).hnf == principal_ideal(D).hnf
    return ClassAWitness(L, I, I.norm, D.norm(), ok)


def J_matrix(ctx: FieldCtx, n: int):
    z, o = ctx.zero, ctx.one
    J = [[z] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        J[i][n + i] = -o
        J[n + i][i] = o
    return J


def su_check(ctx: FieldCtx, M, scale_sq: Fraction = Fraction(1)) -> bool:
    """Is c*M in SU(n,n) for the real scalar c = sqrt(scale_sq) > 0?"""
    M = [[x if isinstance(x, KElem) else ctx.elem(x) for x in row] for row in M]
    N = len(M)
    if N % 2 or any(len(r) != N for r in M):
        return False
    n = N // 2
    J = J_matrix(ctx, n)
    Mh = [[M[j][i].conj() for j in range(N)] for i in range(N)]
    JM = [[sum((J[i][k] * M[k][j] for k in range(N)), ctx.zero) for j in range(N)] for i in range(N)]
    P = [[sum((Mh[i][k] * JM[k][j] for k in range(N)), ctx.zero) * scale_sq for j in range(N)] for i in range(N)]
    if P != J:
        return False
    return _det(M) * (Fraction(scale_sq) ** n) == ctx.one


def w_d_block(V: AtkinLehner):
    """sqrt(d) * W_d = diag(L, adj(conj L)^T); pair with scale_sq = 1/d."""
    ctx = V.ctx
    L = V.L()
    (p, q), (r, s) = [[x.conj() for x in row] for row in L]
    adj_t = [[s, -r], [-q, p]]  # (adj conj L)^T; conj(V)^{-T} = adj_t / sqrt(d)
    z = ctx.zero
    return [
        [L[0][0], L[0][1], z, z],
        [L[1][0], L[1][1], z, z],
        [z, z, adj_t[0][0], adj_t[0][1]],
        [z, z, adj_t[1][0], adj_t[1][1]],
    ]
