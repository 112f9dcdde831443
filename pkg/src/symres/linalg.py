"""Exact linear algebra over a prime field F_p.

Vectors and matrices are numpy ``int64`` arrays holding canonical residues
``0..p-1``.  Coordinates are 0-based throughout the library; ``Xi`` variables
use ``i + 1`` when a coordinate becomes a CNF index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionMismatch(ValueError):
    pass


class NotPrime(ValueError):
    pass


class SystemConsistent(ValueError):
    pass


class LinFormatError(ValueError):
    pass


def check_prime(p: int) -> int:
    if p < 2:
        raise NotPrime(f"{p} is not prime")
    if p >= 1 << 16:
        raise NotPrime(f"modulus {p} exceeds 2^16")
    if any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
        raise NotPrime(f"{p} is not prime")
    return p


def vec(values: Iterable[int], p: int) -> np.ndarray:
    return np.asarray(list(values), dtype=np.int64) % p


def mat(rows: Iterable[Iterable[int]], p: int, n: int | None = None) -> np.ndarray:
    rows = [list(r) for r in rows]
    if not rows:
        return np.zeros((0, n or 0), dtype=np.int64)
    widths = {len(r) for r in rows}
    if len(widths) != 1 or (n is not None and widths != {n}):
        raise DimensionMismatch("rows have different lengths")
    return np.asarray(rows, dtype=np.int64) % p


def inv(x: int, p: int) -> int:
    return pow(int(x) % p, -1, p)


# ---------------------------------------------------------------------------
# The small vocabulary: support, restriction, diagonal, row sum


def support(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(i) for i in np.flatnonzero(np.asarray(v)))


def restrict(r: Sequence[int], v: Sequence[int]) -> np.ndarray:
    """``r`` with every coordinate outside ``supp(v)`` set to zero."""
    r, v = np.asarray(r, dtype=np.int64), np.asarray(v)
    if r.shape != v.shape:
        raise DimensionMismatch(f"{r.shape} vs {v.shape}")
    return np.where(v != 0, r, 0)


def diag(r: Sequence[int]) -> np.ndarray:
    return np.diag(np.asarray(r, dtype=np.int64))


def row_sum(A: np.ndarray, p: int) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    return A.sum(axis=0) % p


def width(A: np.ndarray) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return int((A != 0).sum(axis=1).max())


def lv(x: Sequence[int], y: Sequence[int], p: int) -> tuple[int, ...]:
    """Coordinates nonzero in both ``x`` and ``y`` whose sum vanishes."""
    x, y = np.asarray(x), np.asarray(y)
    return tuple(int(i) for i in np.flatnonzero((x != 0) & (y != 0) & ((x + y) % p == 0)))


# ---------------------------------------------------------------------------
# Elimination


@dataclass(frozen=True)
class Echelon:
    """Reduced row echelon form ``R = T @ M`` (mod p) with pivot columns."""

    R: np.ndarray
    T: np.ndarray
    pivots: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rref(M: np.ndarray, p: int, ncols: int | None = None) -> Echelon:
    """Gauss-Jordan elimination, pivoting only within the first ``ncols`` columns."""
    R = np.array(M, dtype=np.int64) % p
    m, n = R.shape
    ncols = n if ncols is None else ncols
    T = np.eye(m, dtype=np.int64)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        nz = np.flatnonzero(R[r:, c])
        if nz.size == 0:
            continue
        s = r + int(nz[0])
        if s != r:
            R[[r, s]] = R[[s, r]]
            T[[r, s]] = T[[s, r]]
        f = inv(R[r, c], p)
        R[r] = R[r] * f % p
        T[r] = T[r] * f % p
        coef = R[:, c].copy()
        coef[r] = 0
        rows = np.flatnonzero(coef)
        if rows.size:
            R[rows] = (R[rows] - np.outer(coef[rows], R[r])) % p
            T[rows] = (T[rows] - np.outer(coef[rows], T[r])) % p
        pivots.append(c)
        r += 1
    return Echelon(R, T, tuple(pivots))


def rank(A: np.ndarray, p: int) -> int:
    A = np.asarray(A)
    if A.size == 0:
        return 0
    return rref(A, p).rank


def _kernel_from_rref(R: np.ndarray, pivots: Sequence[int], n: int, p: int) -> np.ndarray:
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        K[t, f] = 1
        for r, c in enumerate(pivots):
            K[t, c] = (-R[r, f]) % p
    return K


def kernel_basis(A: np.ndarray, p: int, n: int | None = None) -> np.ndarray:
    """Rows form a basis of ``{d : A d = 0}``."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1] if A.ndim == 2 else n
    if A.size == 0:
        return np.eye(n, dtype=np.int64)
    e = rref(A, p)
    return _kernel_from_rref(e.R, e.pivots, n, p)


@dataclass(frozen=True)
class Solution:
    particular: np.ndarray
    kernel: np.ndarray


def _augmented(A: np.ndarray, b: Sequence[int], p: int) -> tuple[np.ndarray, int, int]:
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if A.ndim != 2 or b.shape != (A.shape[0],):
        raise DimensionMismatch(f"A {A.shape} vs b {b.shape}")
    m, n = A.shape
    return np.hstack([A % p, (b % p).reshape(m, 1)]), m, n


def solve(A: np.ndarray, b: Sequence[int], p: int) -> Solution | None:
    """A particular solution and kernel basis of ``A x = b``, or ``None`` if inconsistent."""
    M, m, n = _augmented(A, b, p)
    e = rref(M, p, ncols=n)
    r = e.rank
    if r < m and e.R[r:, n].any():
        return None
    x = np.zeros(n, dtype=np.int64)
    for row, c in enumerate(e.pivots):
        x[c] = e.R[row, n]
    return Solution(x, _kernel_from_rref(e.R[:, :n], e.pivots, n, p))


def inconsistency_certificate(A: np.ndarray, b: Sequence[int], p: int) -> np.ndarray:
    """A vector ``v`` with ``v A = 0`` and ``v · b = 1``."""
    M, m, n = _augmented(A, b, p)
    e = rref(M, p, ncols=n)
    r = e.rank
    bad = [i for i in range(r, m) if e.R[i, n]]
    if not bad:
        raise SystemConsistent("the system has a solution")
    i = bad[0]
    v = e.T[i] * inv(e.R[i, n], p) % p
    A, b = M[:, :n], M[:, n]
    assert not (v @ A % p).any() and int(v @ b % p) == 1
    return v


def in_span(x: Sequence[int], W: np.ndarray, p: int) -> bool:
    W = np.asarray(W, dtype=np.int64)
    x = np.asarray(x, dtype=np.int64) % p
    if W.size == 0:
        return not x.any()
    if W.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"{W.shape} vs {x.shape}")
    return solve(W.T, x, p) is not None


def subspace_leq(U: np.ndarray, W: np.ndarray, p: int) -> bool:
    """True iff the row span of ``U`` is contained in that of ``W``."""
    U, W = np.asarray(U, dtype=np.int64), np.asarray(W, dtype=np.int64)
    if U.size and W.size and U.shape[1] != W.shape[1]:
        raise DimensionMismatch(f"{U.shape} vs {W.shape}")
    return all(in_span(u, W, p) for u in U)


# ---------------------------------------------------------------------------
# Linear systems and their text format


@dataclass(frozen=True, eq=False)
class LinSystem:
    A: np.ndarray
    b: np.ndarray
    p: int

    def __post_init__(self):
        check_prime(self.p)
        A = np.asarray(self.A, dtype=np.int64) % self.p
        b = np.asarray(self.b, dtype=np.int64) % self.p
        if A.ndim != 2 or b.shape != (A.shape[0],):
            raise DimensionMismatch(f"A {A.shape} vs b {b.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], rhs: Iterable[int], p: int, n: int | None = None):
        return cls(mat(rows, p, n), vec(rhs, p), p)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    @property
    def width(self) -> int:
        return width(self.A)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, LinSystem)
            and self.p == other.p
            and self.A.shape == other.A.shape
            and bool((self.A == other.A).all() and (self.b == other.b).all())
        )

    def solve(self) -> Solution | None:
        return solve(self.A, self.b, self.p)

    def certificate(self) -> np.ndarray:
        return inconsistency_certificate(self.A, self.b, self.p)


def emit_lin(system: LinSystem) -> str:
    lines = [f"lin {system.p} {system.m} {system.n}"]
    for row, rhs in zip(system.A, system.b):
        lines.append(" ".join(str(int(x)) for x in row) + f" | {int(rhs)}")
    return "\n".join(lines) + "\n"


def parse_lin(text: str) -> LinSystem:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise LinFormatError("empty input")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "lin":
        raise LinFormatError(f"bad header {lines[0]!r}")
    try:
        p, m, n = map(int, head[1:])
    except ValueError:
        raise LinFormatError(f"bad header {lines[0]!r}") from None
    if len(lines) - 1 != m:
        raise LinFormatError(f"header declares {m} rows, found {len(lines) - 1}")
    rows, rhs = [], []
    for ln in lines[1:]:
        left, sep, right = ln.partition("|")
        if not sep:
            raise LinFormatError(f"row without '|': {ln!r}")
        try:
            coeffs = [int(t) for t in left.split()]
            rhs.append(int(right))
        except ValueError:
            raise LinFormatError(f"non-integer entry in {ln!r}") from None
        if len(coeffs) != n:
            raise LinFormatError(f"row has {len(coeffs)} coefficients, expected {n}")
        rows.append(coeffs)
    try:
        return LinSystem(mat(rows, p, n) if rows else np.zeros((0, n), dtype=np.int64), vec(rhs, p), p)
    except NotPrime as exc:
        raise LinFormatError(str(exc)) from None
