"""Coefficient-level checks for the Sugano and Krieg Maass spaces.

All relations are divisor sums over eta | epsilon(T):

    Sugano:  a(T) = sum eta^(r-1) a(1, t/eta, kl/eta^2)
    Krieg:   a(T) = sum eta^(r-1) a*(detD(T)/eta^2)

Coefficients of modular forms are invariant under T -> T[U] for U in
SL_2(O_K); table lookups use this to find an equivalent stored index
(translations t -> t + k u and the swap by [[0, 1], [-1, 0]]).
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .enumeration import short_vectors
from .linalg import hnf
from .modgroup import build_vd, vd_act
from .qfield import FieldCtx, ideal_from_gens, norm_form_bound, squarefree_divisors
from .theta import CoefficientTable, HermIndex


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


# -- reduction ----------------------------------------------------------------

def _translate(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """Minimal-norm tau in tau + k*sqrt(d_K)*O_K (ties: smallest (a, b))."""
    k, a, b = T.k, T.a, T.b
    t, n = ctx.omega_trace, ctx.omega_norm
    sd = ctx.sqrt_disc
    p, q = int(sd.a) * k, int(sd.b) * k  # g1 = k sqrt(d_K)
    r, s = -q * n, p + q * t  # g2 = g1 * w
    det = p * s - q * r
    x0 = round(Fraction(a * s - b * r, det))
    y0 = round(Fraction(p * b - q * a, det))
    best = None
    for i in range(x0 - 2, x0 + 3):
        for j in range(y0 - 2, y0 + 3):
            ca, cb = a - i * p - j * r, b - i * q - j * s
            key = (ca * ca + t * ca * cb + n * cb * cb, ca, cb)
            if best is None or key < best:
                best = key
    nrm, a, b = best
    l, rem = divmod(T.det_d(ctx) + nrm, ctx.abs_disc * k)
    assert rem == 0, (T, best)
    return HermIndex(k, l, a, b)


def _swap(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """T[[0, 1], [-1, 0]] = (l, k, conj(tau))."""
    # conj(a + b w) = (a + t b) - b w
    return HermIndex(T.l, T.k, T.a + ctx.omega_trace * T.b, -T.b)


def _heuristic_reduce(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """Translate tau to its minimal-norm representative, swap when 1 <= l < k, repeat."""
    while True:
        T = _translate(ctx, T)
        if 1 <= T.l < T.k:
            T = _swap(ctx, T)
            continue
        if T.l == T.k:
            T = min(T, _translate(ctx, _swap(ctx, T)))
        return T


# O_K elements as integer pairs (a, b) = a + b w; w^2 = t w - n

def _mul(ctx, x, y):
    (a, b), (c, d) = x, y
    bd = b * d
    return (a * c - ctx.omega_norm * bd, a * d + b * c + ctx.omega_trace * bd)


def _conj(ctx, x):
    return (x[0] + ctx.omega_trace * x[1], -x[1])


def _tr(ctx, x):
    return 2 * x[0] + ctx.omega_trace * x[1]


def _nm(ctx, x):
    a, b = x
    return a * a + ctx.omega_trace * a * b + ctx.omega_norm * b * b


def _sd(ctx):
    sd = ctx.sqrt_disc
    return (int(sd.a), int(sd.b))


def _hvalue(ctx: FieldCtx, T: HermIndex, x1, x2) -> int:
    """T[x] = k N(x1) + l N(x2) + Tr(conj(x1) tau x2 / sqrt(d_K))."""
    z = _mul(ctx, _mul(ctx, _conj(ctx, x1), (T.a, T.b)), x2)
    # z / sqrt(d_K) = -z sqrt(d_K) / |d_K|
    cross, rem = divmod(-_tr(ctx, _mul(ctx, z, _sd(ctx))), ctx.abs_disc)
    assert rem == 0
    return T.k * _nm(ctx, x1) + T.l * _nm(ctx, x2) + cross


def _complete(ctx: FieldCtx, x1, x2):
    """(y1, y2) in O_K^2 with x1 y2 - x2 y1 = 1, or None if (x1, x2) != O_K."""
    # images of y = (0, 1), (0, w), (1, 0), (w, 0)
    w = (0, 1)
    cols = [x1, _mul(ctx, x1, w), tuple(-c for c in x2), tuple(-c for c in _mul(ctx, x2, w))]
    rows = [list(c) + [int(i == j) for j in range(4)] for i, c in enumerate(cols)]
    H = hnf(rows)
    if len(H) < 2 or H[0][0] != 1 or H[1][0] != 0 or H[1][1] != 1:
        return None
    c = [a - H[0][1] * b for a, b in zip(H[0][2:], H[1][2:])]
    return (c[2], c[3]), (c[0], c[1])


def _transform(ctx: FieldCtx, T: HermIndex, x, y) -> HermIndex:
    """T[U] for U with columns x, y."""
    sd = _sd(ctx)
    tau = (T.a, T.b)
    cx1, cx2 = _conj(ctx, x[0]), _conj(ctx, x[1])
    terms = [
        _mul(ctx, _mul(ctx, cx1, y[0]), sd),
        _mul(ctx, _mul(ctx, cx1, tau), y[1]),
        _mul(ctx, _mul(ctx, cx2, _conj(ctx, tau)), y[0]),
        _mul(ctx, _mul(ctx, cx2, y[1]), sd),
    ]
    a = T.k * terms[0][0] + terms[1][0] - terms[2][0] + T.l * terms[3][0]
    b = T.k * terms[0][1] + terms[1][1] - terms[2][1] + T.l * terms[3][1]
    return HermIndex(_hvalue(ctx, T, *x), _hvalue(ctx, T, *y), a, b)


_BASIS4 = [((1, 0), (0, 0)), ((0, 1), (0, 0)), ((0, 0), (1, 0)), ((0, 0), (0, 1))]


def _form_gram2(ctx: FieldCtx, T: HermIndex):
    """Twice the Gram matrix of x -> T[x] on O_K^2 = Z^4."""
    q = [_hvalue(ctx, T, *v) for v in _BASIS4]
    G = [[0] * 4 for _ in range(4)]
    for i in range(4):
        G[i][i] = 2 * q[i]
        for j in range(i + 1, 4):
            u, v = _BASIS4[i], _BASIS4[j]
            s = _hvalue(ctx, T, (u[0][0] + v[0][0], u[0][1] + v[0][1]), (u[1][0] + v[1][0], u[1][1] + v[1][1]))
            G[i][j] = G[j][i] = s - q[i] - q[j]
    return G


def _canonical_pd(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    G2 = _form_gram2(ctx, T)
    bound = 1
    while True:
        bound = min(4 * bound, T.k)
        sv = short_vectors(G2, 2 * bound)
        found: dict[int, list] = defaultdict(list)
        for row, val in zip(sv.coords(), sv.norm_num):
            a1, b1, a2, b2 = (int(c) for c in row)
            for sgn in (1, -1):
                found[int(val)].append(((sgn * a1, sgn * b1), (sgn * a2, sgn * b2)))
        for val in sorted(found):
            best = None
            for x in found[val]:
                y = _complete(ctx, *x)
                if y is None:
                    continue
                cand = _translate(ctx, _transform(ctx, T, x, y))
                if best is None or cand < best:
                    best = cand
            if best is not None:
                return best
        if bound >= T.k:
            return T  # unreachable: e_1 is unimodular with T[e_1] = k


def _generator(J):
    """A generator of the ideal J, or None if J is not principal."""
    ctx = J.ctx
    (h11, _), (h21, h22) = J.hnf
    e1, e2 = ctx.elem(h11), ctx.elem(h21, h22)
    n1, n2 = e1.norm(), e2.norm()
    G = [[n1, ((e1 + e2).norm() - n1 - n2) / 2], [((e1 + e2).norm() - n1 - n2) / 2, n2]]
    for (x, y), val in short_vectors(G, J.norm).vectors:
        if val == J.norm:
            return e1 * x + e2 * y
    return None


def _canonical_singular(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """(g, 0, 0) when the kernel of T has a unimodular generator."""
    gamma = _generator(ideal_from_gens(ctx, [T.tau(ctx), ctx.sqrt_disc * T.k]))
    if gamma is None:
        return _heuristic_reduce(ctx, T)
    x1, x2 = -T.tau(ctx) / gamma, ctx.sqrt_disc * T.k / gamma
    x = ((int(x1.a), int(x1.b)), (int(x2.a), int(x2.b)))
    y = _complete(ctx, *x)
    if y is None:
        return _heuristic_reduce(ctx, T)
    U = _transform(ctx, T, x, y)
    assert U.k == 0 and (U.a, U.b) == (0, 0), U
    return HermIndex(U.l, 0, 0, 0)


@lru_cache(maxsize=1 << 16)
def reduce_index(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """Representative of the SL_2(O_K)-orbit of T.

    Positive definite T: the smallest k attained on a unimodular vector, then
    the translate-minimal (l, tau), minimised over all such vectors; this is
    canonical.  Singular T goes to (g, 0, 0) when its kernel is generated by
    a unimodular vector and otherwise to a translate/swap reduced form, which
    stays in the orbit but may not be unique.
    """
    if T.k == 0:
        if T.l == 0 or (T.a, T.b) != (0, 0):
            return T
        return HermIndex(T.l, 0, 0, 0)
    if T.l == 0 and (T.a, T.b) == (0, 0):
        return T
    T = _heuristic_reduce(ctx, T)
    if T.det_d(ctx) == 0:
        return _canonical_singular(ctx, T)
    return _canonical_pd(ctx, T)


class Lookup:
    """Value source for a table: direct entry, then a reduced equivalent, then an oracle."""

    def __init__(self, table: CoefficientTable, oracle=None, oracle_max_trace=None):
        self.table = table
        self.oracle = oracle
        self.oracle_max_trace = oracle_max_trace
        self._reduced = None
        self.unresolved: list[HermIndex] = []

    @property
    def reduced(self):
        if self._reduced is None:
            ctx = self.table.ctx
            self._reduced = {}
            for T, v in self.table.entries.items():
                self._reduced.setdefault(reduce_index(ctx, T), v)
        return self._reduced

    def get(self, T: HermIndex, use_oracle: bool = True):
        v = self.table.entries.get(T)
        if v is not None:
            return v
        R = reduce_index(self.table.ctx, T)
        v = self.reduced.get(R)
        if v is not None:
            return v
        if use_oracle and self.oracle is not None:
            if self.oracle_max_trace is None or R.trace() <= self.oracle_max_trace:
                return self.oracle(R)
        return None


@dataclass
class CheckResult:
    ok: bool | None  # None: undetermined
    witnesses: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)
    alpha_star: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok is True


def _status(witnesses, unresolved):
    if witnesses:
        return False
    return None if unresolved else True


def sugano_rhs(table: CoefficientTable, T: HermIndex, lookup: Lookup):
    r = table.weight
    total = Fraction(0)
    for eta in divisors(T.epsilon()):
        ref = HermIndex(1, T.k * T.l // (eta * eta), T.a // eta, T.b // eta)
        v = lookup.get(ref)
        if v is None:
            return None, ref
        total += Fraction(eta) ** (r - 1) * v
    return total, None


def check_sugano(table: CoefficientTable, oracle=None) -> CheckResult:
    lookup = Lookup(table, oracle)
    witnesses, unresolved = [], []
    for T, v in table.sorted_items():
        if T.is_zero():
            continue
        rhs, missing = sugano_rhs(table, T, lookup)
        if rhs is None:
            unresolved.append(missing)
        elif rhs != v:
            witnesses.append(("sugano", T, {"value": v, "rhs": rhs}))
    return CheckResult(_status(witnesses, unresolved), witnesses, unresolved)


def _primitive_with_det(ctx: FieldCtx, T: HermIndex, eta: int) -> HermIndex:
    """A primitive index (1, l, tau/eta) with detD = detD(T)/eta^2."""
    a, b = T.a // eta, T.b // eta
    n = T.det_d(ctx) // (eta * eta)
    nt = a * a + ctx.omega_trace * a * b + ctx.omega_norm * b * b
    return HermIndex(1, (n + nt) // ctx.abs_disc, a, b)


def check_krieg(table: CoefficientTable, oracle=None, oracle_max_trace=None) -> CheckResult:
    """Reconstruct a* by ascending detD and test every relation.

    a*(n) is fixed by the first primitive index of detD n; without one (and
    without an oracle) the relations that need a*(n) stay undetermined.
    """
    ctx, r = table.ctx, table.weight
    lookup = Lookup(table, oracle, oracle_max_trace)
    astar: dict[int, Fraction] = {}
    source: dict[int, HermIndex] = {}
    witnesses, unresolved = [], []
    items = [(T.det_d(ctx), T.epsilon(), T, v) for T, v in table.entries.items() if not T.is_zero()]
    items.sort()
    for D, eps, T, v in items:
        coeffs = defaultdict(Fraction)
        for eta in divisors(eps):
            coeffs[D // (eta * eta)] += Fraction(eta) ** (r - 1)
        if oracle is not None and D > 0:
            for eta in divisors(eps):
                n = D // (eta * eta)
                if n not in astar:
                    P = _primitive_with_det(ctx, T, eta)
                    v2 = lookup.get(P)
                    if v2 is not None:
                        astar[n] = v2
                        source[n] = P
        unknown = [n for n in coeffs if n not in astar]
        if not unknown:
            rhs = sum(c * astar[n] for n, c in coeffs.items())
            if rhs != v:
                if eps == 1:
                    witnesses.append(("krieg-conflict", T, {"value": v, "other": source[D], "other_value": astar[D]}))
                else:
                    witnesses.append(("krieg", T, {"value": v, "rhs": rhs}))
        elif unknown == [D] and (eps == 1 or D == 0):
            known = sum(c * astar[n] for n, c in coeffs.items() if n != D)
            astar[D] = (v - known) / coeffs[D]
            source[D] = T
        else:
            unresolved.append(T)
    return CheckResult(_status(witnesses, unresolved), witnesses, unresolved, astar)


@lru_cache(maxsize=1 << 16)
def _vd_image(V, T: HermIndex) -> HermIndex:
    return vd_act(T, V, invert=True)


def check_invariance(table: CoefficientTable, d: int, oracle=None, oracle_max_trace=None) -> CheckResult:
    """a(T[V_d^{-1}]) = a(T) for every T whose image can be looked up.

    Undetermined (ok None) when no image could be compared at all.
    """
    V = build_vd(table.ctx, d)
    lookup = Lookup(table, oracle, oracle_max_trace)
    witnesses, missing = [], []
    compared = 0
    for T, v in table.sorted_items():
        img = _vd_image(V, T)
        w = lookup.get(img)
        if w is None:
            missing.append(T)
            continue
        compared += 1
        if w != v:
            witnesses.append(("invariance", T, {"d": d, "image": img, "value": v, "image_value": w}))
    ok = False if witnesses else (True if compared else None)
    return CheckResult(ok, witnesses, missing)


def lemma2_applicable(ctx: FieldCtx, d: int) -> bool:
    return ctx.m % d == 0 and not (d % 2 == 0 and ctx.m % 4 == 1)


def lemma2_related(ctx: FieldCtx, d: int, T: HermIndex, T2: HermIndex) -> bool:
    """Do two k = 1 indices satisfy the congruences relating them for this d?"""
    if T.k != 1 or T2.k != 1 or T.det_d(ctx) != T2.det_d(ctx):
        return False
    m = ctx.m
    R, S = T.RS(ctx)
    R2, S2 = T2.RS(ctx)
    return (R2 - R) % 2 == 0 and (S2 - S) % (2 * m // d) == 0 and (S2 + S) % (2 * d) == 0


def check_lemma2_iii(table: CoefficientTable, d: int) -> CheckResult:
    ctx = table.ctx
    if ctx.m % d:
        raise ValueError(f"d={d} does not divide m={ctx.m}")
    if not lemma2_applicable(ctx, d):
        return CheckResult(None, [], [("excluded", d)])
    by_det = defaultdict(list)
    for T, v in table.sorted_items():
        if T.k == 1:
            by_det[T.det_d(ctx)].append((T, v))
    witnesses = []
    for D in sorted(by_det):
        group = by_det[D]
        for i, (T, v) in enumerate(group):
            for T2, v2 in group[i + 1:]:
                if v != v2 and lemma2_related(ctx, d, T, T2):
                    witnesses.append(("lemma2iii", T, {"d": d, "other": T2, "value": v, "other_value": v2}))
    return CheckResult(not witnesses, witnesses)


@dataclass
class MaassReport:
    sugano_ok: bool | None
    krieg_ok: bool | None
    alpha_star: dict
    invariance: dict
    lemma2iii: dict
    witnesses: list
    unresolved: dict
    consistent: bool | None

    def to_json(self) -> dict:
        def enc(x):
            if isinstance(x, HermIndex):
                return x.to_json()
            if isinstance(x, Fraction):
                return f"{x.numerator}/{x.denominator}"
            if isinstance(x, dict):
                return {str(k): enc(v) for k, v in x.items()}
            if isinstance(x, (list, tuple)):
                return [enc(v) for v in x]
            return x

        return {
            "sugano_ok": self.sugano_ok,
            "krieg_ok": self.krieg_ok,
            "alpha_star": {str(k): enc(v) for k, v in sorted(self.alpha_star.items())},
            "invariance": {str(d): v for d, v in sorted(self.invariance.items())},
            "lemma2iii": {str(d): v for d, v in sorted(self.lemma2iii.items())},
            "witnesses": [
                {"check": c, "index": T.to_json(), "details": enc(det)} for c, T, det in self.witnesses
            ],
            "unresolved": {k: [T.to_json() for T in v] for k, v in self.unresolved.items()},
            "theorem3_consistent": self.consistent,
        }


def theorem3_predicate(sugano_ok, krieg_ok, invariant_all):
    """sugano => (krieg <=> invariance); None when an ingredient is undetermined."""
    if sugano_ok is False:
        return True
    if sugano_ok is None or krieg_ok is None or invariant_all is None:
        return None
    return krieg_ok == invariant_all


def theorem3_verify(
    table: CoefficientTable,
    oracle=None,
    checks=("sugano", "krieg", "invariance", "lemma2iii"),
    oracle_max_trace=None,
) -> MaassReport:
    """Run the checks and evaluate sugano => (krieg <=> invariance under all V_d).

    Images under V_d are looked up through the oracle only when their reduced
    form has trace <= oracle_max_trace (default: trace bound + 2; anything
    reduced up to the bound is in the table already).
    """
    ctx = table.ctx
    if oracle_max_trace is None and table.bound_kind == "trace":
        oracle_max_trace = table.bound + 2
    witnesses, unresolved = [], {}
    sug = kr = None
    astar = {}
    if "sugano" in checks:
        res = check_sugano(table, oracle)
        sug = res.ok
        witnesses += res.witnesses
        if res.unresolved:
            unresolved["sugano"] = res.unresolved
    if "krieg" in checks:
        res = check_krieg(table, oracle, oracle_max_trace)
        kr, astar = res.ok, res.alpha_star
        witnesses += res.witnesses
        if res.unresolved:
            unresolved["krieg"] = res.unresolved
    inv = {}
    if "invariance" in checks:
        for d in squarefree_divisors(ctx.d_K):
            res = check_invariance(table, d, oracle, oracle_max_trace)
            inv[d] = res.ok
            witnesses += res.witnesses
    lem = {}
    if "lemma2iii" in checks:
        for d in squarefree_divisors(ctx.m):
            if lemma2_applicable(ctx, d):
                res = check_lemma2_iii(table, d)
                lem[d] = res.ok
                witnesses += res.witnesses
    vals = list(inv.values())
    if not vals or (None in vals and False not in vals):
        inv_all = None
    else:
        inv_all = False not in vals
    consistent = theorem3_predicate(sug, kr, inv_all) if ("sugano" in checks and "krieg" in checks and inv) else None
    return MaassReport(sug, kr, astar, inv, lem, witnesses, unresolved, consistent)


# -- synthetic tables -----------------------------------------------------------

@lru_cache(maxsize=64)
def reduced_indices(ctx: FieldCtx, detD_bound: int, k_max: int) -> tuple[HermIndex, ...]:
    """All reduced T != 0 with 1 <= k <= k_max and detD(T) <= detD_bound."""
    out = []
    D = ctx.abs_disc
    for k in range(1, k_max + 1):
        out.append(HermIndex(k, 0, 0, 0))
        # minimal coset representatives lie within (|g1| + |g2|)/2 of 0
        n = ctx.omega_norm
        radius_sq = (k * k * D * (1 + isqrt(n) + 1) ** 2) // 4 + 1
        for tau in norm_form_bound(ctx, radius_sq):
            a, b = int(tau.a), int(tau.b)
            nt = int(tau.norm())
            lo = max(k, -(-nt // (D * k)))
            hi = (detD_bound + nt) // (D * k)
            for l in range(lo, hi + 1):
                T = HermIndex(k, l, a, b)
                if reduce_index(ctx, T) == T:
                    out.append(T)
    return tuple(sorted(set(out)))


def _callable(f):
    if callable(f):
        return f
    return lambda key: f[key]


def gen_krieg_table(ctx: FieldCtx, r: int, alpha_star, detD_bound: int, k_max: int = 3) -> CoefficientTable:
    astar = _callable(alpha_star)
    entries = {}
    for T in reduced_indices(ctx, detD_bound, k_max):
        D = T.det_d(ctx)
        try:
            entries[T] = sum(Fraction(eta) ** (r - 1) * Fraction(astar(D // (eta * eta))) for eta in divisors(T.epsilon()))
        except KeyError as exc:
            raise ValueError(f"alpha* undefined at {exc}") from exc
    return CoefficientTable(r, ctx, "detD", detD_bound, entries, "synthetic", {"k_max": k_max, "kind": "krieg"})


def gen_sugano_table(ctx: FieldCtx, r: int, f1, detD_bound: int, k_max: int = 3) -> CoefficientTable:
    """Table defined by the Sugano relation from values on reduced k = 1 indices.

    Not claimed to come from a modular form.
    """
    f = _callable(f1)
    entries = {}
    for T in reduced_indices(ctx, detD_bound, k_max):
        total = Fraction(0)
        for eta in divisors(T.epsilon()):
            ref = reduce_index(ctx, HermIndex(1, T.k * T.l // (eta * eta), T.a // eta, T.b // eta))
            try:
                total += Fraction(eta) ** (r - 1) * Fraction(f(ref))
            except KeyError as exc:
                raise ValueError(f"f1 undefined at {ref}") from exc
        entries[T] = total
    return CoefficientTable(r, ctx, "detD", detD_bound, entries, "synthetic", {"k_max": k_max, "kind": "sugano"})
