"""Brute-force ground truth: SAT, isomorphisms, automorphisms, linear solvability,
and expansion of symmetry steps into plain resolution."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .cnf import IDENTITY, CnfFormula, Renaming
from .graphs import ColoredGraph
from .linalg import LinSystem
from .trace import Axiom, Derivation, DerivationBuilder, Resolve

SAT_MAX_VARS = 24
ISO_MAX_VERTICES = 10
AUT_MAX_VERTICES = 12
LIN_MAX_POINTS = 1 << 20
_CHUNK_BITS = 20


class TooLarge(ValueError):
    pass


class InvalidTrace(ValueError):
    pass


@dataclass(frozen=True)
class Satisfiable:
    model: dict

    satisfiable = True


@dataclass(frozen=True)
class Unsatisfiable:
    satisfiable = False


def _clause_masks(formula: CnfFormula):
    out = []
    for c in formula.clauses:
        out.append([(formula.symbols[l.var], l.positive) for l in c])
    return out


def sat_bruteforce(formula: CnfFormula, max_vars: int = SAT_MAX_VARS) -> Satisfiable | Unsatisfiable:
    """Exhaustive search; the model returned is the first in lexicographic order
    (variable 1 is the most significant bit, false before true)."""
    n = formula.num_vars
    if n > max_vars:
        raise TooLarge(f"{n} variables exceed the cap of {max_vars}")
    clauses = _clause_masks(formula)
    if any(not c for c in clauses):
        return Unsatisfiable()
    keys = {i: v for v, i in formula.symbols.items()}
    total = 1 << n
    chunk = 1 << min(_CHUNK_BITS, n)
    for start in range(0, total, chunk):
        idx = np.arange(start, start + chunk, dtype=np.int64)
        alive = np.ones(chunk, dtype=bool)
        for c in clauses:
            sat = np.zeros(chunk, dtype=bool)
            for var, positive in c:
                bit = (idx >> (n - var)) & 1
                sat |= bit.astype(bool) if positive else ~bit.astype(bool)
            alive &= sat
            if not alive.any():
                break
        hits = np.flatnonzero(alive)
        if hits.size:
            a = int(idx[hits[0]])
            return Satisfiable({keys[j]: bool((a >> (n - j)) & 1) for j in range(1, n + 1)})
    return Unsatisfiable()


def models_bruteforce(formula: CnfFormula, max_vars: int = 20) -> np.ndarray:
    """Boolean matrix of all satisfying assignments (column j-1 holds variable j)."""
    n = formula.num_vars
    if n > max_vars:
        raise TooLarge(f"{n} variables exceed the cap of {max_vars}")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = ((idx[:, None] >> (n - 1 - np.arange(n))) & 1).astype(bool)
    alive = np.ones(1 << n, dtype=bool)
    for c in _clause_masks(formula):
        sat = np.zeros(1 << n, dtype=bool)
        for var, positive in c:
            sat |= bits[:, var - 1] if positive else ~bits[:, var - 1]
        alive &= sat
    return bits[alive]


def entails(formula_clauses, target: frozenset, symbols: dict) -> bool:
    """Every assignment satisfying ``formula_clauses`` satisfies ``target``."""
    n = len(symbols)
    if n > 20:
        raise TooLarge(f"{n} variables exceed the cap of 20")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = ((idx[:, None] >> (n - 1 - np.arange(n))) & 1).astype(bool)

    def sat(c):
        s = np.zeros(1 << n, dtype=bool)
        for l in c:
            col = bits[:, symbols[l.var] - 1]
            s |= col if l.positive else ~col
        return s

    alive = np.ones(1 << n, dtype=bool)
    for c in formula_clauses:
        alive &= sat(c)
    return not (alive & ~sat(target)).any()


# ---------------------------------------------------------------------------
# Graphs


def _iso_search(g1: ColoredGraph, g2: ColoredGraph, limit: int | None):
    if g1.n != g2.n:
        return []
    n = g1.n
    adj1, adj2 = g1.adjacency(), g2.adjacency()
    cand = [[v for v in range(n) if g2.colors[v] == g1.colors[u]] for u in range(n)]
    order = sorted(range(n), key=lambda u: len(cand[u]))
    image = [-1] * n
    used = [False] * n
    found = []

    def extend(pos: int) -> bool:
        if pos == n:
            found.append(tuple(image))
            return limit is not None and len(found) >= limit
        u = order[pos]
        for v in cand[u]:
            if used[v]:
                continue
            ok = all(adj1[u, w] == adj2[v, image[w]] for w in order[:pos])
            if not ok:
                continue
            image[u], used[v] = v, True
            if extend(pos + 1):
                return True
            image[u], used[v] = -1, False
        return False

    extend(0)
    return found


def iso_bruteforce(g1: ColoredGraph, g2: ColoredGraph, limit: int | None = None, cap: int = ISO_MAX_VERTICES):
    """All color-preserving isomorphisms g1 → g2 (as image tuples), up to ``limit``."""
    if max(g1.n, g2.n) > cap:
        raise TooLarge(f"{max(g1.n, g2.n)} vertices exceed the cap of {cap}")
    return _iso_search(g1, g2, limit)


def automorphisms_bruteforce(g: ColoredGraph, cap: int = AUT_MAX_VERTICES):
    if g.n > cap:
        raise TooLarge(f"{g.n} vertices exceed the cap of {cap}")
    return _iso_search(g, g, None)


# ---------------------------------------------------------------------------
# Linear systems


def lin_bruteforce(system: LinSystem, limit: int | None = 1) -> list[np.ndarray]:
    """Solutions of A x = b by enumeration of F_p^n (lexicographic order)."""
    p, n = system.p, system.n
    if p**n > LIN_MAX_POINTS:
        raise TooLarge(f"{p}^{n} points exceed the cap")
    X = np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).reshape(-1, n)
    ok = ((X @ system.A.T) % p == system.b).all(axis=1) if system.m else np.ones(len(X), dtype=bool)
    sols = X[ok]
    return list(sols if limit is None else sols[:limit])


# ---------------------------------------------------------------------------
# Symmetry replay


def replay_symmetry(trace: Derivation, step_id: int) -> Derivation:
    """Expand step ``step_id`` into a pure resolution derivation.

    Each symmetry step is replaced by the renamed copy of its source's
    sub-derivation; nested renamings compose.  The result's axioms are the
    renamed ancestry, so for a valid trace it checks in mode Resolution.
    """
    steps = trace.steps
    if not 1 <= step_id <= len(steps):
        raise InvalidTrace(f"step {step_id} does not exist")
    b = DerivationBuilder(trace.formula)
    memo: dict[tuple[int, Renaming], int] = {}
    stack: list[tuple[int, Renaming]] = [(step_id, IDENTITY)]
    while stack:
        sid, sigma = stack[-1]
        if (sid, sigma) in memo:
            stack.pop()
            continue
        s = steps[sid - 1]
        for ref in s.premises():
            if not 1 <= ref < sid:
                raise InvalidTrace(f"step {sid} cites step {ref}")
        k = s.kind
        if isinstance(k, Axiom):
            memo[(sid, sigma)] = b.axiom(sigma.apply(s.clause))
            stack.pop()
        elif isinstance(k, Resolve):
            todo = [(r, sigma) for r in (k.left, k.right) if (r, sigma) not in memo]
            if todo:
                stack.extend(todo)
                continue
            pivot = sigma(_pos(k.pivot)).var
            try:
                memo[(sid, sigma)] = b.resolve(memo[(k.left, sigma)], memo[(k.right, sigma)], pivot)
            except ValueError as exc:
                raise InvalidTrace(f"step {sid}: {exc}") from None
            stack.pop()
        else:
            inner = k.sigma.then(sigma)
            if (k.source, inner) not in memo:
                stack.append((k.source, inner))
                continue
            memo[(sid, sigma)] = memo[(k.source, inner)]
            stack.pop()
    return b.build()


def _pos(var):
    from .cnf import Literal

    return Literal(var, True)
