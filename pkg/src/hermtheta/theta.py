"""Fourier coefficients #(L, T) of Hermitian theta series of degree 1 and 2.

A degree-2 index T = [[k, t], [conj(t), l]] with t = tau / sqrt(d_K),
tau = a + b*w in O_K, is stored as HermIndex(k, l, a, b).  The theta series
uses exp(i*pi*tr(T Z)) with T the Gram matrix of a pair of vectors, and
Fourier expansions of modular forms use exp(2*pi*i*tr(T Z)); the index
attached to a pair with Gram G is therefore G / 2.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import gamma, gcd, pi, sqrt

import numpy as np

from .linalg import det
from .qfield import FieldCtx, KElem, make_field, norm_form_bound

_F64_EXACT = float(1 << 52)


@dataclass(frozen=True, order=True)
class HermIndex:
    k: int
    l: int
    a: int
    b: int

    @property
    def tau_coords(self) -> tuple[int, int]:
        return (self.a, self.b)

    def tau(self, ctx: FieldCtx) -> KElem:
        return ctx.elem(self.a, self.b)

    def t(self, ctx: FieldCtx) -> KElem:
        return self.tau(ctx) / ctx.sqrt_disc

    def det_d(self, ctx: FieldCtx) -> int:
        """-d_K * det(T) = |d_K| k l - N(tau)."""
        a, b = self.a, self.b
        return ctx.abs_disc * self.k * self.l - (a * a + ctx.omega_trace * a * b + ctx.omega_norm * b * b)

    def epsilon(self) -> int:
        return gcd(gcd(self.k, self.l), gcd(self.a, self.b))

    def is_zero(self) -> bool:
        return self.k == 0 and self.l == 0 and self.a == 0 and self.b == 0

    def is_psd(self, ctx: FieldCtx) -> bool:
        return self.k >= 0 and self.l >= 0 and self.det_d(ctx) >= 0

    def trace(self) -> int:
        return self.k + self.l

    def RS(self, ctx: FieldCtx) -> tuple[int, int]:
        """(2 Re t, 2 sqrt(m) Im t) as integers."""
        if ctx.omega_trace:
            return self.b, -(2 * self.a + self.b)
        return self.b, -self.a

    def matrix(self, ctx: FieldCtx):
        t = self.t(ctx)
        return [[ctx.elem(self.k), t], [t.conj(), ctx.elem(self.l)]]

    def scaled(self, q: int) -> "HermIndex":
        """T / q (q must divide epsilon(T))."""
        return HermIndex(self.k // q, self.l // q, self.a // q, self.b // q)

    def to_json(self) -> dict:
        return {"k": self.k, "l": self.l, "tau": [self.a, self.b]}

    def __repr__(self):
        return f"T(k={self.k}, l={self.l}, tau=({self.a},{self.b}))"


def index_from_matrix(ctx: FieldCtx, T) -> HermIndex:
    """Encode a Hermitian 2x2 K-matrix, raising ValueError if not in Lambda(2, O_K)."""
    k, t, tb, l = T[0][0], T[0][1], T[1][0], T[1][1]
    k = k if isinstance(k, KElem) else ctx.elem(k)
    l = l if isinstance(l, KElem) else ctx.elem(l)
    t = t if isinstance(t, KElem) else ctx.elem(t)
    tb = tb if isinstance(tb, KElem) else ctx.elem(tb)
    if tb != t.conj():
        raise ValueError("matrix is not Hermitian")
    for x in (k, l):
        if x.b != 0 or x.a.denominator != 1:
            raise ValueError(f"diagonal entry {x} is not an integer")
    tau = t * ctx.sqrt_disc
    if not tau.is_integral():
        raise ValueError(f"off-diagonal entry {t} is not in the inverse different")
    return HermIndex(int(k.a), int(l.a), int(tau.a), int(tau.b))


def index_from_gram(ctx: FieldCtx, G) -> HermIndex:
    """Index G/2 for a Hermitian Gram matrix G of two lattice vectors."""
    half = [[(x if isinstance(x, KElem) else ctx.elem(x)) * Fraction(1, 2) for x in row] for row in G]
    return index_from_matrix(ctx, half)


def swap_index(ctx: FieldCtx, T: HermIndex) -> HermIndex:
    """Index of the swapped pair (lambda_2, lambda_1): (l, k, -conj(tau))."""
    tau = -T.tau(ctx).conj()
    return HermIndex(T.l, T.k, int(tau.a), int(tau.b))


def indices_up_to_trace(ctx: FieldCtx, B: int) -> list[HermIndex]:
    """All T >= 0 in Lambda(2, O_K) with k + l <= B, sorted."""
    out = []
    for k in range(B + 1):
        for l in range(B + 1 - k):
            if k == 0 or l == 0:
                out.append(HermIndex(k, l, 0, 0))
                continue
            for tau in norm_form_bound(ctx, ctx.abs_disc * k * l):
                out.append(HermIndex(k, l, int(tau.a), int(tau.b)))
    return sorted(out)


# -- lattice side -----------------------------------------------------------

def _vectors(L, norm: int) -> np.ndarray:
    """All vectors of trace norm ``norm`` (both signs) as an int64 array."""
    if norm == 0:
        return np.zeros((1, 2 * L.rank), dtype=np.int64)
    half = L.short_vector_set(norm).with_norm(norm)
    return np.concatenate([half, -half])


def _pair_keys(L, V1: np.ndarray, V2: np.ndarray, chunk: int | None = None):
    """Counter of (F, Fw) = (Re h(x, y), Re h(x, w y)) over x in V1, y in V2."""
    S = L._gram_np
    Om = L._omega_np
    A1 = V1 @ S
    B2 = V2.T
    B2w = (Om @ V2.T)
    scale = float(np.abs(A1).max(initial=0)) * float(max(np.abs(B2).max(initial=0), np.abs(B2w).max(initial=0)))
    use_float = scale * V1.shape[1] < _F64_EXACT
    if use_float:
        A1f, B2f, B2wf = A1.astype(np.float64), B2.astype(np.float64), B2w.astype(np.float64)
    if chunk is None:
        chunk = max(1, (1 << 22) // max(1, len(V2)))
    out = Counter()
    for s in range(0, len(V1), chunk):
        if use_float:
            F = np.rint(A1f[s:s + chunk] @ B2f).astype(np.int64)
            Fw = np.rint(A1f[s:s + chunk] @ B2wf).astype(np.int64)
        else:
            F = A1[s:s + chunk] @ B2
            Fw = A1[s:s + chunk] @ B2w
        F, Fw = F.ravel(), Fw.ravel()
        f0, w0 = int(F.min()), int(Fw.min())
        width = int(Fw.max()) - w0 + 1
        codes = (F - f0) * width + (Fw - w0)
        counts = np.bincount(codes)
        for code in np.flatnonzero(counts):
            out[(int(code // width) + f0, int(code % width) + w0)] += int(counts[code])
    return out


def _key_to_tau(L, F: int, Fw: int) -> HermIndex | None:
    h = L.herm_coords(F, Fw)
    tau = h * Fraction(1, 2) * L.ctx.sqrt_disc
    if not tau.is_integral():
        return None
    return int(tau.a), int(tau.b)


def _target_key(L, T: HermIndex):
    """(F, Fw) that a pair must realise for index T, or None if impossible."""
    ctx = L.ctx
    h = T.t(ctx) * 2
    F, Fw = h.real(), (ctx.omega * h).real()
    if F.denominator != 1 or Fw.denominator != 1:
        return None
    return int(F), int(Fw)


def theta_coeff(L, T: HermIndex, degree: int = 2) -> int:
    """#(L, T): vectors (degree 1) or pairs (degree 2) with Gram 2T."""
    if degree == 1:
        k = T.k if isinstance(T, HermIndex) else int(T)
        if k < 0:
            raise ValueError("index is not positive semidefinite")
        return len(_vectors(L, 2 * k))
    if degree != 2:
        raise ValueError("degree must be 1 or 2")
    if not T.is_psd(L.ctx):
        raise ValueError(f"{T} is not positive semidefinite")
    if T.k == 0 or T.l == 0:
        if (T.a, T.b) != (0, 0):
            return 0
        return len(_vectors(L, 2 * max(T.k, T.l)))
    key = _target_key(L, T)
    if key is None:
        return 0
    return _pair_keys(L, _vectors(L, 2 * T.k), _vectors(L, 2 * T.l)).get(key, 0)


@dataclass
class CoefficientTable:
    weight: int
    ctx: FieldCtx
    bound_kind: str
    bound: int
    entries: dict = field(default_factory=dict)  # HermIndex -> Fraction
    source: str = "theta"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.bound_kind not in ("trace", "detD"):
            raise ValueError(f"bound_kind must be 'trace' or 'detD', got {self.bound_kind!r}")

    def sorted_items(self):
        return sorted(self.entries.items())

    def in_range(self, T: HermIndex) -> bool:
        if self.bound_kind == "trace":
            return T.trace() <= self.bound
        return T.det_d(self.ctx) <= self.bound and T.k <= self.meta.get("k_max", T.k)

    def to_json(self) -> dict:
        out = {
            "m": self.ctx.m,
            "weight": self.weight,
            "bound_kind": self.bound_kind,
            "bound": self.bound,
            "source": self.source,
            "entries": [
                {**T.to_json(), "value": f"{Fraction(v).numerator}/{Fraction(v).denominator}"}
                for T, v in self.sorted_items()
            ],
        }
        if self.meta:
            out["meta"] = dict(self.meta)
        return out

    @classmethod
    def from_json(cls, data) -> "CoefficientTable":
        try:
            ctx = make_field(int(data["m"]))
            entries = {}
            for e in data["entries"]:
                T = HermIndex(int(e["k"]), int(e["l"]), int(e["tau"][0]), int(e["tau"][1]))
                entries[T] = Fraction(str(e["value"]))
            return cls(
                int(data["weight"]),
                ctx,
                data.get("bound_kind", "trace"),
                int(data["bound"]),
                entries,
                data.get("source", "theta"),
                dict(data.get("meta", {})),
            )
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ValueError(f"malformed coefficient table: {exc}") from exc


def theta_table(L, trace_bound: int, degree: int = 2) -> CoefficientTable:
    """All #(L, T) with T >= 0 and k + l <= trace_bound (zeros included)."""
    ctx = L.ctx
    if degree == 1:
        entries = {HermIndex(k, 0, 0, 0): Fraction(theta_coeff(L, k, 1)) for k in range(trace_bound + 1)}
        return CoefficientTable(L.rank, ctx, "trace", trace_bound, entries, "theta", {"degree": 1})
    if degree != 2:
        raise ValueError("degree must be 1 or 2")
    entries = {T: Fraction(0) for T in indices_up_to_trace(ctx, trace_bound)}
    for k in range(trace_bound + 1):
        for l in range(k, trace_bound + 1 - k):
            if k == 0:
                n = Fraction(len(_vectors(L, 2 * l)))
                entries[HermIndex(0, l, 0, 0)] = n
                entries[HermIndex(l, 0, 0, 0)] = n
                continue
            counts = _pair_keys(L, _vectors(L, 2 * k), _vectors(L, 2 * l))
            for (F, Fw), c in counts.items():
                tau = _key_to_tau(L, F, Fw)
                if tau is None:
                    raise ValueError(f"pair inner product ({F}, {Fw}) gives tau outside O_K; not a theta lattice")
                T = HermIndex(k, l, *tau)
                entries[T] = Fraction(c)
                if k != l:
                    entries[swap_index(ctx, T)] = Fraction(c)
    return CoefficientTable(L.rank, ctx, "trace", trace_bound, entries, "theta", {"degree": 2})


def table_first_mismatch(t1: CoefficientTable, t2: CoefficientTable):
    """First index (in sorted order) where the tables differ, or None."""
    if (t1.ctx, t1.weight, t1.bound_kind, t1.bound) != (t2.ctx, t2.weight, t2.bound_kind, t2.bound):
        raise ValueError("tables have incompatible metadata")
    for T in sorted(set(t1.entries) | set(t2.entries)):
        v1, v2 = t1.entries.get(T), t2.entries.get(T)
        if v1 != v2:
            return T, v1, v2
    return None


def theta_oracle(L, max_pairs: int | None = None):
    """Callable T -> #(L, T), memoised per (k, l) block.

    A block is the full pair count for one (k, l); with ``max_pairs`` set,
    blocks with more candidate pairs than that are refused and the oracle
    returns None.
    """
    ctx = L.ctx
    blocks = {}
    n = 2 * L.rank
    covol = sqrt(float(det(L.gram)))

    def ball(c):
        # lattice points of norm <= c, by volume; guards enumeration size
        return pi ** (n / 2) / gamma(n / 2 + 1) * c ** (n / 2) / covol

    def block(k, l):
        if (k, l) not in blocks:
            if max_pairs is not None and ball(2 * k) * ball(2 * l) > 2 * max_pairs:
                blocks[k, l] = None
            else:
                V1, V2 = _vectors(L, 2 * k), _vectors(L, 2 * l)
                if max_pairs is not None and len(V1) * len(V2) > max_pairs:
                    blocks[k, l] = None
                else:
                    blocks[k, l] = _pair_keys(L, V1, V2)
        return blocks[k, l]

    def oracle(T: HermIndex):
        if not T.is_psd(ctx):
            raise ValueError(f"{T} is not positive semidefinite")
        if T.k == 0 or T.l == 0:
            if max_pairs is not None and ball(2 * max(T.k, T.l)) > 2 * max_pairs:
                return None
            return Fraction(theta_coeff(L, T, 2))
        key = _target_key(L, T)
        if key is None:
            return Fraction(0)
        counts = block(T.k, T.l)
        return None if counts is None else Fraction(counts.get(key, 0))

    return oracle
