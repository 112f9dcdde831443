"""Literals, clauses, CNF formulas, renamings and the resolution rule.

Clauses are plain ``frozenset`` objects of :class:`Literal`, so equality is
order-insensitive and duplicate literals collapse.  Variables are structured
keys (:class:`Xi`, :class:`IsoVar`, :class:`Raw`); a formula freezes a
bijection between its keys and DIMACS integers, assigned in lexicographic
order of :func:`var_sort_key`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Union


class Xi(NamedTuple):
    """Indicator variable "coordinate ``i`` takes value ``k``" over F_p (``i`` is 1-based)."""

    i: int
    k: int
    p: int


class IsoVar(NamedTuple):
    """Isomorphism variable x_{u,v}: vertex ``u`` of the first graph maps to ``v``."""

    u: int
    v: int


class Raw(NamedTuple):
    n: int


VarKey = Union[Xi, IsoVar, Raw]

_KIND_RANK = {Raw: 0, Xi: 1, IsoVar: 2}


def var_sort_key(var: VarKey) -> tuple:
    return (_KIND_RANK[type(var)], *var)


class Literal(NamedTuple):
    var: VarKey
    positive: bool = True

    def __neg__(self) -> "Literal":
        return Literal(self.var, not self.positive)

    def __repr__(self) -> str:
        return ("" if self.positive else "~") + var_name(self.var)


def pos(var: VarKey) -> Literal:
    return Literal(var, True)


def neg(var: VarKey) -> Literal:
    return Literal(var, False)


def var_name(var: VarKey) -> str:
    if isinstance(var, Xi):
        return f"xi{var.i}_{var.k}"
    if isinstance(var, IsoVar):
        return f"x{var.u}_{var.v}"
    return f"v{var.n}"


Clause = frozenset
EMPTY_CLAUSE: frozenset = frozenset()


def clause(*lits: Literal) -> frozenset:
    return frozenset(lits)


def lit_sort_key(lit: Literal) -> tuple:
    return (var_sort_key(lit.var), lit.positive)


def sorted_literals(c: Iterable[Literal]) -> list[Literal]:
    return sorted(c, key=lit_sort_key)


def is_tautology(c: frozenset) -> bool:
    return any(-lit in c for lit in c if lit.positive)


def format_clause(c: frozenset) -> str:
    if not c:
        return "⊥"
    return " ∨ ".join(repr(lit) for lit in sorted_literals(c))


# ---------------------------------------------------------------------------
# Resolution


class PivotAbsent(ValueError):
    pass


def resolve(c1: frozenset, c2: frozenset, pivot: VarKey) -> frozenset:
    """Resolve ``c1`` and ``c2`` on ``pivot``.

    The pivot may occur positively in either premise; the other premise must
    contain it negatively.  Other complementary pairs are kept, so the
    resolvent can be a tautology.
    """
    p, n = Literal(pivot, True), Literal(pivot, False)
    if p in c1 and n in c2:
        return (c1 - {p}) | (c2 - {n})
    if n in c1 and p in c2:
        return (c1 - {n}) | (c2 - {p})
    raise PivotAbsent(f"pivot {var_name(pivot)} does not occur with opposite signs")


# ---------------------------------------------------------------------------
# Renamings


class RenamingError(ValueError):
    pass


class ComplementConflict(RenamingError):
    pass


class NotBijective(RenamingError):
    pass


class Renaming:
    """A permutation of literals that commutes with complementation.

    Only non-fixed points are stored.  Instances are immutable and hashable.
    """

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping: Mapping[Literal, Literal] | None = None):
        m = {a: b for a, b in (mapping or {}).items() if a != b}
        for a, b in m.items():
            if m.get(-a, -a) != -b:
                raise ComplementConflict(f"{a!r}->{b!r} but {-a!r}->{m.get(-a, -a)!r}")
        if len(set(m.values())) != len(m):
            raise NotBijective("two literals share an image")
        if set(m.values()) != set(m):
            raise NotBijective("image of the moved literals differs from their domain")
        self._map = m
        self._hash = hash(frozenset(m.items()))

    @classmethod
    def from_var_map(cls, var_map: Mapping[VarKey, Literal]) -> "Renaming":
        """Build from the images of positive literals; negatives follow by complement."""
        m: dict[Literal, Literal] = {}
        for var, image in var_map.items():
            m[Literal(var, True)] = image
            m[Literal(var, False)] = -image
        return cls(m)

    @property
    def mapping(self) -> Mapping[Literal, Literal]:
        return dict(self._map)

    def __call__(self, lit: Literal) -> Literal:
        return self._map.get(lit, lit)

    def __len__(self) -> int:
        return len(self._map)

    def __iter__(self) -> Iterator[tuple[Literal, Literal]]:
        return iter(self._map.items())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Renaming) and self._map == other._map

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        moved = [f"{a!r}->{b!r}" for a, b in sorted(self._map.items(), key=lambda t: lit_sort_key(t[0])) if a.positive]
        return f"Renaming({', '.join(moved)})"

    @property
    def is_identity(self) -> bool:
        return not self._map

    def moved_vars(self) -> set[VarKey]:
        return {lit.var for lit in self._map}

    def inverse(self) -> "Renaming":
        return Renaming({b: a for a, b in self._map.items()})

    def then(self, other: "Renaming") -> "Renaming":
        """The composition ``other ∘ self`` (apply ``self`` first)."""
        keys = set(self._map) | set(other._map)
        return Renaming({lit: other(self(lit)) for lit in keys})

    def apply(self, c: frozenset) -> frozenset:
        m = self._map
        if not m:
            return c
        return frozenset([m.get(lit, lit) for lit in c])


IDENTITY = Renaming()


def make_renaming(pairs: Iterable[tuple[Literal, Literal]]) -> Renaming:
    """Close ``pairs`` under complementation and validate the result."""
    m: dict[Literal, Literal] = {}
    for a, b in pairs:
        for src, dst in ((a, b), (-a, -b)):
            if m.setdefault(src, dst) != dst:
                raise ComplementConflict(f"{src!r} is sent to both {m[src]!r} and {dst!r}")
    return Renaming(m)


def apply_renaming(sigma: Renaming, target):
    """Image of a clause or a formula under ``sigma``."""
    if isinstance(target, CnfFormula):
        return target.renamed(sigma)
    return sigma.apply(target)


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True, eq=False)
class CnfFormula:
    clauses: frozenset
    symbols: Mapping[VarKey, int] = field(repr=False)
    modulus: int | None = None

    @classmethod
    def from_clauses(
        cls,
        clauses: Iterable[frozenset],
        extra_vars: Iterable[VarKey] = (),
        modulus: int | None = None,
    ) -> "CnfFormula":
        cs = frozenset(frozenset(c) for c in clauses)
        variables = set(extra_vars)
        for c in cs:
            variables.update(lit.var for lit in c)
        order = sorted(variables, key=var_sort_key)
        symbols = {v: i for i, v in enumerate(order, start=1)}
        if modulus is None:
            moduli = {v.p for v in variables if isinstance(v, Xi)}
            if len(moduli) > 1:
                raise ValueError(f"mixed moduli {sorted(moduli)}")
            modulus = moduli.pop() if moduli else None
        return cls(cs, symbols, modulus)

    @property
    def variables(self) -> list[VarKey]:
        return list(self.symbols)

    @property
    def num_vars(self) -> int:
        return len(self.symbols)

    def __len__(self) -> int:
        return len(self.clauses)

    def __contains__(self, c: frozenset) -> bool:
        return c in self.clauses

    def __iter__(self):
        return iter(self.sorted_clauses())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CnfFormula):
            return NotImplemented
        return (self.clauses, dict(self.symbols), self.modulus) == (
            other.clauses,
            dict(other.symbols),
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash(self.clauses)

    def sorted_clauses(self) -> list[frozenset]:
        idx = self.symbols

        def key(c):
            return (len(c), sorted((idx[l.var], l.positive) for l in c))

        return sorted(self.clauses, key=key)

    def renamed(self, sigma: Renaming) -> "CnfFormula":
        return CnfFormula.from_clauses(
            (sigma.apply(c) for c in self.clauses),
            extra_vars=(sigma(Literal(v)).var for v in self.symbols),
            modulus=self.modulus,
        )

    def union(self, other: "CnfFormula") -> "CnfFormula":
        return CnfFormula.from_clauses(
            self.clauses | other.clauses,
            extra_vars=list(self.symbols) + list(other.symbols),
        )

    def to_int(self, lit: Literal) -> int:
        n = self.symbols[lit.var]
        return n if lit.positive else -n

    def stabilized_by(self, sigma: Renaming) -> bool:
        """True iff ``sigma`` maps the clause set onto itself."""
        if sigma.is_identity:
            return True
        moved = sigma.moved_vars()
        for c in self.clauses:
            if any(lit.var in moved for lit in c) and sigma.apply(c) not in self.clauses:
                return False
        return True


# ---------------------------------------------------------------------------
# DIMACS with a symbol table in comments


class DimacsError(ValueError):
    pass


class MalformedHeader(DimacsError):
    pass


class LiteralOutOfRange(DimacsError):
    pass


class UnterminatedClause(DimacsError):
    pass


def _sym_line(n: int, var: VarKey) -> str:
    if isinstance(var, Xi):
        return f"c sym {n} xi {var.i} {var.k}"
    if isinstance(var, IsoVar):
        return f"c sym {n} iso {var.u} {var.v}"
    return f"c sym {n} raw {var.n}"


def emit_dimacs(formula: CnfFormula) -> str:
    lines = []
    if formula.modulus is not None:
        lines.append(f"c mod {formula.modulus}")
    for var, n in formula.symbols.items():
        lines.append(_sym_line(n, var))
    lines.append(f"p cnf {formula.num_vars} {len(formula.clauses)}")
    for c in formula.sorted_clauses():
        ints = sorted((formula.to_int(l) for l in c), key=lambda x: (abs(x), x))
        lines.append(" ".join(str(x) for x in ints + [0]))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    modulus = None
    syms: dict[int, tuple] = {}
    header = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) >= 3 and parts[1] == "mod":
                modulus = int(parts[2])
            elif len(parts) >= 5 and parts[1] == "sym":
                try:
                    syms[int(parts[2])] = (parts[3], *map(int, parts[4:]))
                except ValueError as exc:
                    raise MalformedHeader(f"line {lineno}: bad symbol comment") from exc
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise MalformedHeader(f"line {lineno}: {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError as exc:
                raise MalformedHeader(f"line {lineno}: {line!r}") from exc
            if min(header) < 0:
                raise MalformedHeader(f"line {lineno}: negative counts")
            continue
        if header is None:
            raise MalformedHeader(f"line {lineno}: clause before header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError as exc:
            raise DimacsError(f"line {lineno}: non-integer token") from exc
    if header is None:
        raise MalformedHeader("missing 'p cnf' header")
    nvars, nclauses = header

    def key(n: int) -> VarKey:
        if n not in syms:
            return Raw(n)
        kind, *args = syms[n]
        if kind == "xi":
            if modulus is None:
                raise MalformedHeader("xi symbols require a 'c mod' line")
            return Xi(args[0], args[1], modulus)
        if kind == "iso":
            return IsoVar(*args)
        if kind == "raw":
            return Raw(*args)
        raise MalformedHeader(f"unknown symbol kind {kind!r}")

    keys = {n: key(n) for n in range(1, nvars + 1)}
    clauses, current = [], []
    for t in tokens:
        if t == 0:
            clauses.append(frozenset(current))
            current = []
        elif abs(t) > nvars:
            raise LiteralOutOfRange(f"literal {t} exceeds {nvars} variables")
        else:
            current.append(Literal(keys[abs(t)], t > 0))
    if current:
        raise UnterminatedClause("last clause is not terminated by 0")
    if len(clauses) != nclauses:
        raise MalformedHeader(f"header declares {nclauses} clauses, found {len(clauses)}")
    return CnfFormula.from_clauses(clauses, extra_vars=keys.values(), modulus=modulus)
