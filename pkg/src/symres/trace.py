"""Derivations: axiom / resolve / symmetry steps, builders, composition, SRT files.

A derivation's *length* counts only its non-axiom steps, so ``A ⊢_n B``
corresponds to a trace of length ``n`` whose axioms are drawn from ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from .cnf import (
    CnfFormula,
    Literal,
    Raw,
    Renaming,
    VarKey,
    make_renaming,
    resolve,
)

GLOBAL = "global"
LOCAL = "local"


@dataclass(frozen=True)
class Axiom:
    pass


@dataclass(frozen=True)
class Resolve:
    left: int
    right: int
    pivot: VarKey


@dataclass(frozen=True)
class Symmetry:
    source: int
    sigma: Renaming
    mode: str = LOCAL


@dataclass(frozen=True)
class ProofStep:
    id: int
    kind: Axiom | Resolve | Symmetry
    clause: frozenset

    @property
    def is_axiom(self) -> bool:
        return isinstance(self.kind, Axiom)

    def premises(self) -> tuple[int, ...]:
        k = self.kind
        if isinstance(k, Resolve):
            return (k.left, k.right)
        if isinstance(k, Symmetry):
            return (k.source,)
        return ()


@dataclass(frozen=True)
class Derivation:
    steps: tuple[ProofStep, ...]
    formula: CnfFormula | None = None

    def __len__(self) -> int:
        return sum(1 for s in self.steps if not s.is_axiom)

    @property
    def length(self) -> int:
        return len(self)

    def step(self, step_id: int) -> ProofStep:
        return self.steps[step_id - 1]

    @property
    def last(self) -> ProofStep | None:
        return self.steps[-1] if self.steps else None

    @property
    def derives_bottom(self) -> bool:
        return any(not s.clause for s in self.steps)

    def clauses(self) -> set[frozenset]:
        return {s.clause for s in self.steps}

    def axioms(self) -> list[ProofStep]:
        return [s for s in self.steps if s.is_axiom]

    def with_formula(self, formula: CnfFormula) -> "Derivation":
        return Derivation(self.steps, formula)

    def count_kinds(self) -> dict[str, int]:
        counts = {"axiom": 0, "resolve": 0, "symmetry_global": 0, "symmetry_local": 0}
        for s in self.steps:
            if isinstance(s.kind, Axiom):
                counts["axiom"] += 1
            elif isinstance(s.kind, Resolve):
                counts["resolve"] += 1
            else:
                counts[f"symmetry_{s.kind.mode}"] += 1
        return counts


class MissingPremise(ValueError):
    pass


class HostTooWeak(ValueError):
    pass


class DerivationBuilder:
    """Single-writer accumulator of proof steps.

    Derived clauses are always recomputed from the cited premises.  Axioms
    are deduplicated: asking for the same axiom twice returns the same id.
    """

    def __init__(self, formula: CnfFormula | None = None):
        self.formula = formula
        self.steps: list[ProofStep] = []
        self._axioms: dict[frozenset, int] = {}

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def length(self) -> int:
        return sum(1 for s in self.steps if not s.is_axiom)

    def clause(self, step_id: int) -> frozenset:
        return self.steps[step_id - 1].clause

    def _check_ref(self, step_id: int) -> None:
        if not 1 <= step_id <= len(self.steps):
            raise MissingPremise(f"step {step_id} does not exist")

    def _push(self, kind, clause: frozenset) -> int:
        step = ProofStep(len(self.steps) + 1, kind, clause)
        self.steps.append(step)
        return step.id

    def axiom(self, c: Iterable[Literal]) -> int:
        c = frozenset(c)
        if c not in self._axioms:
            self._axioms[c] = self._push(Axiom(), c)
        return self._axioms[c]

    def resolve(self, left: int, right: int, pivot: VarKey) -> int:
        self._check_ref(left)
        self._check_ref(right)
        return self._push(Resolve(left, right, pivot), resolve(self.clause(left), self.clause(right), pivot))

    def symmetry(self, source: int, sigma: Renaming, mode: str = LOCAL) -> int:
        self._check_ref(source)
        if mode not in (GLOBAL, LOCAL):
            raise ValueError(f"unknown symmetry mode {mode!r}")
        return self._push(Symmetry(source, sigma, mode), sigma.apply(self.clause(source)))

    def build(self) -> Derivation:
        return Derivation(tuple(self.steps), self.formula)


def append_axiom(builder: DerivationBuilder, c: Iterable[Literal]) -> int:
    return builder.axiom(c)


def append_resolve(builder: DerivationBuilder, left: int, right: int, pivot: VarKey) -> int:
    return builder.resolve(left, right, pivot)


def append_symmetry(builder: DerivationBuilder, source: int, sigma: Renaming, mode: str = LOCAL) -> int:
    return builder.symmetry(source, sigma, mode)


def copy_into(builder: DerivationBuilder, d: Derivation, axiom_id: Callable[[frozenset], int]) -> dict[int, int]:
    """Append the non-axiom steps of ``d`` to ``builder``; return the id map."""
    ids: dict[int, int] = {}
    for s in d.steps:
        k = s.kind
        if isinstance(k, Axiom):
            ids[s.id] = axiom_id(s.clause)
        elif isinstance(k, Resolve):
            ids[s.id] = builder.resolve(ids[k.left], ids[k.right], k.pivot)
        else:
            ids[s.id] = builder.symmetry(ids[k.source], k.sigma, k.mode)
    return ids


def concat(d1: Derivation, d2: Derivation, formula: CnfFormula | None = None) -> Derivation:
    """Append ``d2`` after ``d1``.

    Each axiom of ``d2`` must be a clause of the resulting formula (by
    default ``d1.formula``) or a clause derived in ``d1``; without a formula
    new axioms are accepted as they come.  Formula clauses are
    preferred so that ancestries stay as small as possible.
    """
    formula = formula if formula is not None else d1.formula
    b = DerivationBuilder(formula)
    b.steps = list(d1.steps)
    b._axioms = {s.clause: s.id for s in d1.steps if s.is_axiom}
    derived = {}
    for s in d1.steps:
        derived.setdefault(s.clause, s.id)

    def axiom_id(c: frozenset) -> int:
        if formula is not None and c in formula.clauses:
            return b.axiom(c)
        if c in derived:
            return derived[c]
        if formula is None:
            return b.axiom(c)
        raise MissingPremise(f"axiom {sorted(c)} is neither in the formula nor derived")

    copy_into(b, d2, axiom_id)
    return b.build()


def replay_weakened(
    builder: DerivationBuilder,
    refutation: Derivation,
    axiom_id: Callable[[frozenset], int],
) -> int:
    """Replay a pure-resolution derivation over weaker premises.

    ``axiom_id(c)`` returns the id of a builder step whose clause is a subset
    of ``c ∪ d`` for a fixed clause ``d``.  Every replayed step then holds a
    subset of (original clause ∪ d); a resolution whose pivot literal has
    already disappeared from one premise is skipped and that premise reused.
    Returns the id holding the image of the last step.
    """
    ids: dict[int, int] = {}
    for s in refutation.steps:
        k = s.kind
        if isinstance(k, Axiom):
            ids[s.id] = axiom_id(s.clause)
            continue
        if isinstance(k, Symmetry):
            raise ValueError("weakened replay needs a pure resolution derivation")
        pl, nl = Literal(k.pivot, True), Literal(k.pivot, False)
        pos_src, neg_src = (k.left, k.right)
        if pl not in refutation.step(pos_src).clause or nl not in refutation.step(neg_src).clause:
            pos_src, neg_src = neg_src, pos_src
        a, b = ids[pos_src], ids[neg_src]
        if pl not in builder.clause(a):
            ids[s.id] = a
        elif nl not in builder.clause(b):
            ids[s.id] = b
        else:
            ids[s.id] = builder.resolve(a, b, k.pivot)
    return ids[refutation.steps[-1].id]


def weaken_lift(refutation: Derivation, host: CnfFormula, d: Iterable[Literal]) -> Derivation:
    """From ``A ⊢ ⊥`` and ``{c ∨ d | c ∈ A} ⊑ host`` build a derivation of some clause ⊆ ``d``."""
    d = frozenset(d)
    hosts = host.sorted_clauses()
    b = DerivationBuilder(host)

    def axiom_id(c: frozenset) -> int:
        if c in host.clauses:
            return b.axiom(c)
        wide = c | d
        for h in hosts:
            if h <= wide:
                return b.axiom(h)
        raise HostTooWeak(f"no host clause inside {sorted(wide)}")

    replay_weakened(b, refutation, axiom_id)
    return b.build()


# ---------------------------------------------------------------------------
# SRT trace files


class TraceFormatError(ValueError):
    pass


class BadStepRef(TraceFormatError):
    pass


class BadRenamingSpec(TraceFormatError):
    pass


def _lits(formula: CnfFormula, c: Iterable[Literal]) -> list[int]:
    try:
        ints = [formula.to_int(l) for l in c]
    except KeyError as exc:
        raise TraceFormatError(f"variable {exc.args[0]} is not in the symbol table") from None
    return sorted(ints, key=lambda x: (abs(x), x))


class _RawKeys(dict):
    def __contains__(self, n) -> bool:
        return isinstance(n, int) and n > 0

    def __missing__(self, n):
        if not isinstance(n, int) or n <= 0:
            raise KeyError(n)
        return Raw(n)


def emit_trace(d: Derivation, formula: CnfFormula | None = None) -> str:
    formula = formula if formula is not None else d.formula
    if formula is None:
        raise ValueError("emitting a trace needs the formula's symbol table")
    out = ["srt 1"]
    for s in d.steps:
        body = " ".join(str(x) for x in _lits(formula, s.clause) + [0])
        k = s.kind
        if isinstance(k, Axiom):
            out.append(f"a {body}")
        elif isinstance(k, Resolve):
            out.append(f"r {k.left} {k.right} {formula.symbols[k.pivot]} {body}")
        else:
            pairs = []
            for a, img in sorted(k.sigma, key=lambda t: formula.to_int(t[0])):
                if a.positive:
                    pairs.append(f"{formula.to_int(a)}:{formula.to_int(img)}")
            mode = "g" if k.mode == GLOBAL else "l"
            out.append(" ".join(["s", mode, str(k.source), *pairs, ";", body]))
    return "\n".join(out) + "\n"


def parse_trace(text: str, formula: CnfFormula | None = None) -> Derivation:
    """Parse an SRT file; literals are interpreted through ``formula``'s symbols.

    Without a formula every variable ``n`` is read as ``Raw(n)``.
    """
    if formula is None:
        keys = _RawKeys()
    else:
        keys = {n: v for v, n in formula.symbols.items()}

    def lit(tok: str) -> Literal:
        try:
            x = int(tok)
        except ValueError:
            raise TraceFormatError(f"bad literal {tok!r}") from None
        if x == 0 or abs(x) not in keys:
            raise TraceFormatError(f"literal {x} is out of range")
        return Literal(keys[abs(x)], x > 0)

    def clause_of(toks: list[str], lineno: int) -> frozenset:
        if not toks or toks[-1] != "0":
            raise TraceFormatError(f"line {lineno}: clause not terminated by 0")
        return frozenset(lit(t) for t in toks[:-1])

    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("c")]
    if not lines or lines[0].split() != ["srt", "1"]:
        raise TraceFormatError("missing 'srt 1' header")
    steps: list[ProofStep] = []
    for lineno, line in enumerate(lines[1:], start=1):
        toks = line.split()
        tag, rest = toks[0], toks[1:]

        def ref(tok: str) -> int:
            try:
                r = int(tok)
            except ValueError:
                raise BadStepRef(f"step {lineno}: bad reference {tok!r}") from None
            if not 1 <= r < lineno:
                raise BadStepRef(f"step {lineno} cites step {r}")
            return r

        if tag == "a":
            steps.append(ProofStep(lineno, Axiom(), clause_of(rest, lineno)))
        elif tag == "r":
            if len(rest) < 4:
                raise TraceFormatError(f"step {lineno}: short resolvent line")
            left, right = ref(rest[0]), ref(rest[1])
            try:
                pivot = keys[int(rest[2])]
            except (ValueError, KeyError):
                raise TraceFormatError(f"step {lineno}: bad pivot {rest[2]!r}") from None
            steps.append(ProofStep(lineno, Resolve(left, right, pivot), clause_of(rest[3:], lineno)))
        elif tag == "s":
            if len(rest) < 3 or rest[0] not in ("g", "l") or ";" not in rest:
                raise TraceFormatError(f"step {lineno}: malformed symmetry line")
            mode = GLOBAL if rest[0] == "g" else LOCAL
            source = ref(rest[1])
            semi = rest.index(";")
            pairs = []
            for tok in rest[2:semi]:
                a, sep, b = tok.partition(":")
                if not sep:
                    raise BadRenamingSpec(f"step {lineno}: bad pair {tok!r}")
                try:
                    pairs.append((lit(a), lit(b)))
                except TraceFormatError as exc:
                    raise BadRenamingSpec(f"step {lineno}: {exc}") from None
            try:
                sigma = make_renaming(pairs)
            except ValueError as exc:
                raise BadRenamingSpec(f"step {lineno}: {exc}") from None
            steps.append(ProofStep(lineno, Symmetry(source, sigma, mode), clause_of(rest[semi + 1 :], lineno)))
        else:
            raise TraceFormatError(f"step {lineno}: unknown tag {tag!r}")
    return Derivation(tuple(steps), formula)
