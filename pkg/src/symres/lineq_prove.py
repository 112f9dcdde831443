"""SRC-II refutations of inconsistent linear systems over F_p.

The central routine :func:`derive_sum_clauses` takes rows ``(a_i, b_i)`` and
a set of target vectors ``x`` and derives, for each target, a clause
contained in ``C_{ΣA}(x)``.  Two cases drive the recursion:

* symmetric sum: every translation preserving ``ΣA`` can be matched on
  ``supp(ΣA)`` by a translation preserving every row.  One *generator* clause
  per value ``k = ΣA·x`` is derived by sum resolution of the first ``m-1``
  rows against the last, and every other target is a local-symmetry image of
  a generator;
* composite: an inconsistency certificate splits the rows into two groups
  whose sums add up to a multiple of ``ΣA`` without cancellation, and each
  group is handled recursively.

Provers are parameterised by a :class:`ProofContext` so the same code runs
both on the plain encoding and, through a variable renaming, inside the
multipede formula.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .cnf import Renaming, neg
from .lineq import Namer, assignments, encode_system, row_clause, translation_symmetry, v_clause, xi_namer
from .linalg import (
    LinSystem,
    SystemConsistent,
    inconsistency_certificate,
    in_span,
    kernel_basis,
    lv,
    rank,
    solve,
    support,
)
from .trace import LOCAL, Derivation, DerivationBuilder, replay_weakened


class TargetNotInSum(ValueError):
    pass


class MissingClause(ValueError):
    pass


Row = tuple[np.ndarray, int]


def _key(x: np.ndarray) -> tuple[int, ...]:
    return tuple(int(t) for t in x)


@dataclass
class ProofContext:
    """Where premises come from and how coordinates and translations are named."""

    builder: DerivationBuilder
    p: int
    n: int
    namer: Namer | None = None
    premise: Callable[[frozenset], int] | None = None
    lift: Callable[[np.ndarray], Renaming] | None = None
    row_hook: Callable[[np.ndarray, int, np.ndarray], int] | None = None
    _omega: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.namer is None:
            self.namer = xi_namer(self.p)
        if self.premise is None:
            self.premise = self._axiom
        if self.lift is None:
            self.lift = lambda d: translation_symmetry(d, self.p, self.namer)

    def _axiom(self, c: frozenset) -> int:
        f = self.builder.formula
        if f is not None and c not in f.clauses:
            raise MissingClause(f"clause {sorted(c)} is not in the formula")
        return self.builder.axiom(c)

    def clause(self, a: Sequence[int], x: Sequence[int]) -> frozenset:
        return row_clause(a, x, self.namer)

    def v_premise(self, j: int) -> int:
        return self.premise(v_clause(j, self.p, self.namer))

    def row_premise(self, a: np.ndarray, b: int, x: np.ndarray) -> int:
        if int(a @ x) % self.p == b % self.p:
            raise MissingClause("vector satisfies the row, so its clause is not in the encoding")
        if self.row_hook is not None:
            return self.row_hook(a, b, x)
        return self.premise(self.clause(a, x))


# ---------------------------------------------------------------------------
# Ω(θ)


def omega_clauses(theta: Sequence[int], p: int, n: int, namer: Namer | None = None) -> list[frozenset]:
    """Ω(θ): one clause forbidding each assignment of the coordinates in θ."""
    namer = namer or xi_namer(p)
    theta = sorted(theta)
    return [frozenset(row_clause_on(theta, y, namer)) for y in assignments(theta, p, n)]


def row_clause_on(indices: Sequence[int], y: np.ndarray, namer: Namer) -> frozenset:
    return frozenset(neg(namer(i, int(y[i]))) for i in indices)


def omega_steps(t: int, p: int) -> int:
    """Exact length of the Ω refutation for ``|θ| = t``."""
    return (p ** (t + 1) - p) // (p - 1)


def _omega_derivation(theta: tuple[int, ...], p: int, n: int, namer: Namer) -> tuple[Derivation, dict]:
    """Refutation of Ω(θ) ∧ V plus a map from each axiom to its origin.

    Origins are ``("V", j)`` or ``("O", y)`` with ``y`` the forbidden
    assignment (full-length vector supported on θ).
    """
    b = DerivationBuilder()
    origin: dict[frozenset, tuple] = {}
    ids: dict[tuple, int] = {}
    for y in assignments(theta, p, n):
        c = row_clause_on(theta, y, namer)
        origin[c] = ("O", y)
        ids[_key(y)] = b.axiom(c)
    # Peel coordinates off the end of θ: each clause over the shorter index
    # set is obtained by resolving V_j against the p clauses that extend it.
    for t in range(len(theta), 0, -1):
        j, head = theta[t - 1], theta[: t - 1]
        vc = v_clause(j, p, namer)
        origin[vc] = ("V", j)
        vid = b.axiom(vc)
        nxt = {}
        for y in assignments(head, p, n):
            cur = vid
            for k in range(p):
                yk = y.copy()
                yk[j] = k
                cur = b.resolve(cur, ids[_key(yk)], namer(j, k))
            nxt[_key(y)] = cur
        ids = nxt
    return b.build(), origin


def omega_refutation(theta: Iterable[int], p: int, n: int, builder: DerivationBuilder, namer: Namer | None = None) -> int:
    """Append a refutation of Ω(θ) ∧ V to ``builder``; returns the id of ⊥."""
    namer = namer or xi_namer(p)
    d, _ = _omega_derivation(tuple(sorted(theta)), p, n, namer)
    f = builder.formula

    def axiom_id(c: frozenset) -> int:
        if f is not None and c not in f.clauses:
            raise MissingClause(f"clause {sorted(c)} is not available")
        return builder.axiom(c)

    return replay_weakened(builder, d, axiom_id)


# ---------------------------------------------------------------------------
# Sum resolution


def _omega_for(ctx: ProofContext, theta: tuple[int, ...]):
    if theta not in ctx._omega:
        ctx._omega[theta] = _omega_derivation(theta, ctx.p, ctx.n, ctx.namer)
    return ctx._omega[theta]


def _plan_sum(ctx: ProofContext, r1: Row, r2: Row, x: np.ndarray, prefer: int) -> tuple[tuple[int, ...], dict]:
    """For each ``y`` on θ pick which summand's clause covers ``x + y``."""
    p = ctx.p
    (a1, b1), (a2, b2) = r1, r2
    theta = lv(a1, a2, p)
    choice = {}
    for y in assignments(theta, p, ctx.n):
        w = (x + y) % p
        ok1 = int(a1 @ w) % p != b1 % p
        ok2 = int(a2 @ w) % p != b2 % p
        if not (ok1 or ok2):
            raise TargetNotInSum("target vector satisfies the summed row")
        k = prefer if (ok1, ok2)[prefer - 1] else 3 - prefer
        choice[_key(y)] = (k, w)
    return theta, choice


def _replay_sum(ctx: ProofContext, theta, choice, premise1, premise2) -> int:
    d, origin = _omega_for(ctx, theta)

    def axiom_id(c: frozenset) -> int:
        kind, val = origin[c]
        if kind == "V":
            return ctx.v_premise(val)
        k, w = choice[_key(val)]
        return premise1(w) if k == 1 else premise2(w)

    return replay_weakened(ctx.builder, d, axiom_id)


def sum_resolution(
    ctx: ProofContext,
    row1: Row,
    row2: Row,
    x: Sequence[int],
    premise1: Callable[[np.ndarray], int] | None = None,
    premise2: Callable[[np.ndarray], int] | None = None,
) -> int:
    """Derive a subclause of ``C_{a1+a2}(x)`` from the encodings of both rows.

    ``premiseK(w)`` must return a step holding a subclause of ``C_{aK}(w)``;
    by default the row clauses are fetched through ``ctx.row_premise``.
    """
    p = ctx.p
    a1, b1 = np.asarray(row1[0], dtype=np.int64) % p, int(row1[1]) % p
    a2, b2 = np.asarray(row2[0], dtype=np.int64) % p, int(row2[1]) % p
    x = np.asarray(x, dtype=np.int64) % p
    a = (a1 + a2) % p
    if any(x[i] for i in range(ctx.n) if not a[i]):
        raise TargetNotInSum("target vector is not supported on the summed row")
    theta, choice = _plan_sum(ctx, (a1, b1), (a2, b2), x, prefer=1)
    premise1 = premise1 or (lambda w: ctx.row_premise(a1, b1, w))
    premise2 = premise2 or (lambda w: ctx.row_premise(a2, b2, w))
    return _replay_sum(ctx, theta, choice, premise1, premise2)


def sum_resolution_bound(t: int, p: int) -> int:
    return 2 * (p**t - 1)


# ---------------------------------------------------------------------------
# Case analysis


@dataclass(frozen=True)
class SymmetricSum:
    generators: dict  # k -> z^k

    kind = "symmetric"


@dataclass(frozen=True)
class Composite:
    d: np.ndarray
    v: np.ndarray
    w: np.ndarray
    k1: int
    k2: int
    v1: np.ndarray
    v2: np.ndarray

    kind = "composite"

    @property
    def m1(self) -> int:
        return int((self.v1 == 0).sum())

    @property
    def m2(self) -> int:
        return int((self.v2 == 0).sum())


def generator_vector(S: np.ndarray, k: int, p: int) -> np.ndarray:
    """z^k: supported on the first index j of supp(S) with S·z = k (zero if S = 0)."""
    z = np.zeros(len(S), dtype=np.int64)
    sup = support(S)
    if sup:
        j = sup[0]
        z[j] = k * pow(int(S[j]), -1, p) % p
    elif k % p:
        raise ValueError("no vector has a nonzero product with the zero row")
    return z


def _common_values(v: np.ndarray, p: int) -> tuple[int, int]:
    counts = Counter(int(t) for t in v)
    ranked = sorted(counts, key=lambda val: (-counts[val], val))
    return ranked[0], ranked[1]


def classify_case(A: np.ndarray, b: Sequence[int], p: int) -> SymmetricSum | Composite:
    A = np.asarray(A, dtype=np.int64) % p
    m, n = A.shape
    S = A.sum(axis=0) % p
    KS = kernel_basis(S.reshape(1, n), p)
    KA = kernel_basis(A, p)
    W = KA * S % p
    witness = None
    for k in KS:
        if not in_span(k * S % p, W, p):
            witness = k
            break
    if witness is None:
        sb = int(np.sum(b)) % p
        ks = sorted({k for k in range(p) if k != sb}) if S.any() else ([0] if sb else [])
        return SymmetricSum({k: generator_vector(S, k, p) for k in ks})

    d = witness
    stacked = np.vstack([A, np.diag(S)])
    rhs = np.concatenate([np.zeros(m, dtype=np.int64), d * S % p])
    cert = inconsistency_certificate(stacked, rhs, p)
    v, w = cert[:m], cert[m:]
    vA = v @ A % p
    assert int(vA @ d) % p != 0
    assert set(support(vA)) <= set(support(S))
    assert rank(np.vstack([vA, S]), p) == 2
    k1, k2 = _common_values(v, p)
    v1 = (v - k1) % p
    v2 = (k2 - v) % p
    assert not lv(v1 @ A % p, v2 @ A % p, p)
    assert len(support(v1)) <= m - 1 and len(support(v2)) <= m - 1
    return Composite(d, v, w, k1, k2, v1, v2)


# ---------------------------------------------------------------------------
# The recursion


@dataclass
class _Stats:
    symmetric: int = 0
    composite: int = 0
    symmetry_steps: int = 0


def derive_sum_clauses(
    ctx: ProofContext,
    A: np.ndarray,
    b: Sequence[int],
    targets: Iterable[Sequence[int]],
    stats: _Stats | None = None,
) -> dict[tuple[int, ...], int]:
    """Derive a subclause of ``C_{ΣA}(x)`` for every target ``x``.

    Each target must lie in P(ΣA, Σb).  Returns ``{tuple(x): step id}``;
    targets are normalised to their restriction onto ``supp(ΣA)``.
    """
    p = ctx.p
    A = np.asarray(A, dtype=np.int64).reshape(-1, ctx.n) % p
    b = np.asarray(b, dtype=np.int64) % p
    stats = stats if stats is not None else _Stats()
    S = A.sum(axis=0) % p
    s = int(b.sum()) % p
    want: dict[tuple, np.ndarray] = {}
    for x in targets:
        x = np.where(S != 0, np.asarray(x, dtype=np.int64) % p, 0)
        if int(S @ x) % p == s:
            raise TargetNotInSum(f"target {_key(x)} satisfies the summed row")
        want[_key(x)] = x
    if not want:
        return {}
    m = A.shape[0]
    if m == 1:
        return {key: ctx.row_premise(A[0], int(b[0]), x) for key, x in want.items()}

    case = classify_case(A, b, p)
    if isinstance(case, Composite):
        stats.composite += 1
        return _composite(ctx, A, b, S, s, want, case, stats)
    stats.symmetric += 1
    return _symmetric(ctx, A, b, S, want, stats)


def _symmetric(ctx, A, b, S, want, stats) -> dict:
    p = ctx.p
    head_A, head_b = A[:-1], b[:-1]
    last = (A[-1], int(b[-1]))
    S1 = head_A.sum(axis=0) % p
    s1 = int(head_b.sum()) % p

    gens: dict[int, np.ndarray] = {}
    for x in want.values():
        k = int(S @ x) % p
        gens.setdefault(k, generator_vector(S, k, p))

    plans = {}
    needed: dict[tuple, np.ndarray] = {}
    for k, z in sorted(gens.items()):
        theta, choice = _plan_sum(ctx, (S1, s1), last, z, prefer=2)
        plans[k] = (theta, choice)
        for kappa, w in choice.values():
            if kappa == 1:
                w1 = np.where(S1 != 0, w, 0)
                needed[_key(w1)] = w1
    sub = derive_sum_clauses(ctx, head_A, head_b, needed.values(), stats)

    def premise1(w):
        return sub[_key(np.where(S1 != 0, w, 0))]

    def premise2(w):
        return ctx.row_premise(last[0], last[1], w)

    gen_ids = {k: _replay_sum(ctx, *plans[k], premise1, premise2) for k in sorted(gens)}

    out = {}
    stacked = np.vstack([A, np.diag(S)])
    for key, x in want.items():
        k = int(S @ x) % p
        z = gens[k]
        d = (x - z) % p
        if not d.any():
            out[key] = gen_ids[k]
            continue
        rhs = np.concatenate([np.zeros(A.shape[0], dtype=np.int64), d * S % p])
        sol = solve(stacked, rhs, p)
        assert sol is not None, "symmetric case without a matching translation"
        dp = sol.particular
        assert not (A @ dp % p).any()
        out[key] = ctx.builder.symmetry(gen_ids[k], ctx.lift(dp), LOCAL)
        stats.symmetry_steps += 1
    return out


def _composite(ctx, A, b, S, s, want, case: Composite, stats) -> dict:
    p = ctx.p
    c = (case.k2 - case.k1) % p
    parts = []
    for vk in (case.v1, case.v2):
        rows = [i for i in range(A.shape[0]) if vk[i]]
        sub_A = A[rows] * vk[rows, None] % p
        sub_b = b[rows] * vk[rows] % p
        parts.append((sub_A, sub_b, sub_A.sum(axis=0) % p, int(sub_b.sum()) % p))
    (_, _, u1, t1), (_, _, u2, t2) = parts
    assert ((u1 + u2) % p == c * S % p).all() and (t1 + t2) % p == c * s % p
    split: list[dict] = [{}, {}]
    for key, x in want.items():
        if int(u1 @ x) % p != t1:
            split[0][key] = np.where(u1 != 0, x, 0)
        else:
            assert int(u2 @ x) % p != t2
            split[1][key] = np.where(u2 != 0, x, 0)
    out = {}
    for (sub_A, sub_b, u, _), group in zip(parts, split):
        if not group:
            continue
        ids = derive_sum_clauses(ctx, sub_A, sub_b, group.values(), stats)
        for key, xr in group.items():
            out[key] = ids[_key(xr)]
    return out


# ---------------------------------------------------------------------------
# Refuting a whole system


LINEQ_C = 1.0


def lineq_lambda(p: int) -> float:
    return math.log(2) / math.log(p / (p - 1))


def lineq_bound(p: int, width: int, m: int, C: float = LINEQ_C) -> float:
    """C · p^(L+1) · m^λ."""
    return C * p ** (width + 1) * max(m, 1) ** lineq_lambda(p)


@dataclass
class LineqProof:
    derivation: Derivation
    certificate: np.ndarray
    bound: float
    stats: _Stats


def refute_system(system: LinSystem, ctx: ProofContext | None = None) -> LineqProof:
    """SRC-II refutation of F(A,b) ∧ V for an inconsistent system."""
    p, n = system.p, system.n
    if ctx is None:
        ctx = ProofContext(DerivationBuilder(encode_system(system)), p, n)
    v = inconsistency_certificate(system.A, system.b, p)  # raises SystemConsistent
    rows = [i for i in range(system.m) if v[i]]
    A = system.A[rows] * v[rows, None] % p
    b = system.b[rows] * v[rows] % p
    stats = _Stats()
    ids = derive_sum_clauses(ctx, A, b, [np.zeros(n, dtype=np.int64)], stats)
    (bottom,) = ids.values()
    assert not ctx.builder.clause(bottom)
    return LineqProof(ctx.builder.build(), v, lineq_bound(p, system.width, system.m), stats)


__all__ = [
    "Composite",
    "LINEQ_C",
    "LineqProof",
    "MissingClause",
    "ProofContext",
    "SymmetricSum",
    "SystemConsistent",
    "TargetNotInSum",
    "classify_case",
    "derive_sum_clauses",
    "generator_vector",
    "lineq_bound",
    "lineq_lambda",
    "omega_clauses",
    "omega_refutation",
    "omega_steps",
    "refute_system",
    "sum_resolution",
    "sum_resolution_bound",
]
