"""CNF encoding of linear systems over F_p and the translation renamings Δ_d.

For a row ``a`` with right-hand side ``b`` the encoding forbids, one clause
per vector, every ``x`` supported on ``supp(a)`` with ``a·x ≠ b``:
``C_a(x) = ⋁_{i ∈ supp a} ¬ξ_{i,x_i}``.  The clauses ``V_i = ⋁_k ξ_{i,k}``
force every coordinate to take some value.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .cnf import CnfFormula, Renaming, VarKey, Xi, neg, pos
from .linalg import LinSystem, check_prime, solve, support

Namer = Callable[[int, int], VarKey]


def xi_namer(p: int) -> Namer:
    """Coordinate ``j`` (0-based) taking value ``k`` ↦ ``Xi(j + 1, k, p)``."""
    return lambda j, k: Xi(j + 1, k, p)


def assignments(indices: Sequence[int], p: int, n: int) -> Iterator[np.ndarray]:
    """All length-``n`` vectors supported on ``indices``, in lexicographic order."""
    indices = list(indices)
    for values in itertools.product(range(p), repeat=len(indices)):
        x = np.zeros(n, dtype=np.int64)
        x[indices] = values
        yield x


def row_clause(a: Sequence[int], x: Sequence[int], namer: Namer) -> frozenset:
    """C_a(x): one negative literal ¬ξ_{i,x_i} per ``i`` in ``supp(a)``."""
    return frozenset(neg(namer(i, int(x[i]))) for i in support(a))


def v_clause(j: int, p: int, namer: Namer) -> frozenset:
    return frozenset(pos(namer(j, k)) for k in range(p))


def forbidden_points(a: Sequence[int], b: int, p: int) -> Iterator[np.ndarray]:
    """P(a,b): vectors supported on ``supp(a)`` violating ``a·x = b``."""
    a = np.asarray(a, dtype=np.int64)
    for x in assignments(support(a), p, len(a)):
        if int(a @ x) % p != b % p:
            yield x


@dataclass(frozen=True)
class RowEncoding:
    row: tuple[int, ...]
    rhs: int
    clauses: frozenset


def encode_row(a: Sequence[int], b: int, p: int, n: int | None = None, namer: Namer | None = None) -> RowEncoding:
    a = np.asarray(a, dtype=np.int64) % p
    if n is not None and len(a) != n:
        raise ValueError(f"row has length {len(a)}, expected {n}")
    namer = namer or xi_namer(p)
    clauses = frozenset(row_clause(a, x, namer) for x in forbidden_points(a, b, p))
    return RowEncoding(tuple(int(t) for t in a), b % p, clauses)


def encode_system(system: LinSystem, namer: Namer | None = None) -> CnfFormula:
    """F(A,b) ∧ V over all ``n`` coordinates."""
    p, n = system.p, system.n
    namer = namer or xi_namer(p)
    clauses = set()
    for a, b in zip(system.A, system.b):
        clauses |= encode_row(a, int(b), p, n, namer).clauses
    clauses |= {v_clause(j, p, namer) for j in range(n)}
    extra = [namer(j, k) for j in range(n) for k in range(p)]
    return CnfFormula.from_clauses(clauses, extra_vars=extra, modulus=p)


def translation_symmetry(d: Sequence[int], p: int, namer: Namer | None = None) -> Renaming:
    """Δ_d: ξ_{i,k} ↦ ξ_{i,k+d_i}."""
    namer = namer or xi_namer(p)
    var_map = {}
    for i in support(d):
        shift = int(d[i]) % p
        for k in range(p):
            var_map[namer(i, k)] = pos(namer(i, (k + shift) % p))
    return Renaming.from_var_map(var_map)


# ---------------------------------------------------------------------------
# Random instances


def random_row(rng: random.Random, p: int, n: int, width: int) -> list[int]:
    s = rng.randint(1, min(width, n))
    row = [0] * n
    for i in rng.sample(range(n), s):
        row[i] = rng.randrange(1, p)
    return row


def random_system(
    rng: random.Random,
    p: int,
    m: int,
    n: int,
    width: int,
    inconsistent: bool = False,
    attempts: int = 200,
) -> LinSystem:
    """A random system with rows of support at most ``width``.

    With ``inconsistent`` the system is rejection-sampled; if no sample is
    inconsistent, the last row is replaced by a copy of another row with a
    different right-hand side, which always is.
    """
    check_prime(p)
    for _ in range(attempts if inconsistent else 1):
        rows = [random_row(rng, p, n, width) for _ in range(m)]
        rhs = [rng.randrange(p) for _ in range(m)]
        system = LinSystem.from_rows(rows, rhs, p, n)
        if not inconsistent or solve(system.A, system.b, p) is None:
            return system
    if m < 2:
        rows, rhs = [[0] * n], [1]
    else:
        src = rng.randrange(m - 1)
        rows[-1] = list(rows[src])
        rhs[-1] = (rhs[src] + rng.randrange(1, p)) % p
    return LinSystem.from_rows(rows, rhs, p, n)


def cycle_system(length: int, p: int = 2, charge: int = 1) -> LinSystem:
    """Width-2 cycle equations x_i - x_{i+1} = 0 with one edge carrying ``charge``."""
    rows, rhs = [], []
    for i in range(length):
        row = [0] * length
        row[i] = 1
        row[(i + 1) % length] = (p - 1) % p
        rows.append(row)
        rhs.append(charge if i == length - 1 else 0)
    return LinSystem.from_rows(rows, rhs, p, length)
