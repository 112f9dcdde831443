"""Trusted verifier for resolution, SRC-I and SRC-II traces.

Every derived clause is recomputed from its premises; the clause stored in
the trace is only compared against the recomputation.  The ancestry of a
step is the set of formula clauses it is derived from: an axiom is its own
ancestry, a resolvent unites its premises' ancestries and a symmetry step
renames its source's ancestry.  A local symmetry step is accepted iff the
renamed ancestry lies inside the formula; a global one iff the renaming
stabilizes the whole formula.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .cnf import CnfFormula, PivotAbsent, Renaming, resolve
from .trace import GLOBAL, Axiom, Derivation, Resolve

RESOLUTION = "Resolution"
SRC1 = "SRC-I"
SRC2 = "SRC-II"

MODE_ALIASES = {
    "res": RESOLUTION,
    "resolution": RESOLUTION,
    "src1": SRC1,
    "src-i": SRC1,
    "src2": SRC2,
    "src-ii": SRC2,
}


def normalize_mode(mode: str) -> str:
    if mode in (RESOLUTION, SRC1, SRC2):
        return mode
    try:
        return MODE_ALIASES[mode.lower()]
    except KeyError:
        raise ValueError(f"unknown checking mode {mode!r}") from None


@dataclass
class CheckReport:
    valid: bool
    mode_used: str
    length: int
    derives_bottom: bool
    failures: list[tuple[int, str]] = field(default_factory=list)

    def __str__(self) -> str:
        head = "VALID" if self.valid else "INVALID"
        lines = [f"{head} mode={self.mode_used} length={self.length} derives_bottom={self.derives_bottom}"]
        lines += [f"  step {sid}: {reason}" for sid, reason in self.failures]
        return "\n".join(lines)


@lru_cache(maxsize=4096)
def _stabilizes(formula: CnfFormula, sigma: Renaming) -> bool:
    # σ is a bijection, so σ(F) ⊆ F on a finite set already forces σ(F) = F.
    return formula.stabilized_by(sigma)


class _ClauseTable:
    """Interns clauses as bit positions; formula clauses come first."""

    def __init__(self, formula: CnfFormula):
        self.clauses = formula.sorted_clauses()
        self.index = {c: i for i, c in enumerate(self.clauses)}

    def bit(self, c: frozenset) -> int:
        i = self.index.get(c)
        if i is None:
            i = self.index[c] = len(self.clauses)
            self.clauses.append(c)
        return 1 << i

    def members(self, bits: int) -> list[frozenset]:
        out = []
        while bits:
            low = bits & -bits
            out.append(self.clauses[low.bit_length() - 1])
            bits ^= low
        return out


class _Pass:
    """One sequential sweep over a trace, shared by :func:`check` and :func:`ancestry`."""

    def __init__(self, formula: CnfFormula, trace: Derivation, mode: str, strict: bool):
        self.formula = formula
        self.trace = trace
        self.mode = mode
        self.strict = strict
        self.table = _ClauseTable(formula)
        self.clauses: dict[int, frozenset] = {}
        self.anc: dict[int, int] = {}
        self.pure: dict[int, bool] = {}
        self.failures: list[tuple[int, str]] = []

    def fail(self, sid: int, reason: str) -> None:
        self.failures.append((sid, reason))

    def run(self, upto: int | None = None) -> None:
        for pos, step in enumerate(self.trace.steps, start=1):
            if upto is not None and pos > upto:
                break
            self._step(pos, step)

    def _ref_ok(self, sid: int, ref: int) -> bool:
        if not 1 <= ref < sid:
            self.fail(sid, f"BadStepRef: cites step {ref}")
            return False
        return True

    def _step(self, sid: int, step) -> None:
        if step.id != sid:
            self.fail(sid, f"BadStepRef: step numbered {step.id} at position {sid}")
        k = step.kind
        c = step.clause
        anc, pure = 0, True
        if isinstance(k, Axiom):
            if c not in self.formula.clauses:
                self.fail(sid, "AxiomNotInFormula")
            anc = self.table.bit(c)
        elif isinstance(k, Resolve):
            if self._ref_ok(sid, k.left) and self._ref_ok(sid, k.right):
                try:
                    c = resolve(self.clauses[k.left], self.clauses[k.right], k.pivot)
                except PivotAbsent as exc:
                    self.fail(sid, f"PivotAbsent: {exc}")
                anc = self.anc[k.left] | self.anc[k.right]
                pure = self.pure[k.left] and self.pure[k.right]
        else:
            if self.mode == RESOLUTION:
                self.fail(sid, "SymmetryNotAllowed: mode Resolution forbids symmetry steps")
            elif self.mode == SRC1 and k.mode != GLOBAL:
                self.fail(sid, "SymmetryNotAllowed: mode SRC-I forbids local symmetry steps")
            if self._ref_ok(sid, k.source):
                sigma = k.sigma
                c = sigma.apply(self.clauses[k.source])
                images = [sigma.apply(a) for a in self.table.members(self.anc[k.source])]
                if k.mode == GLOBAL:
                    if not _stabilizes(self.formula, sigma):
                        self.fail(sid, "NotGlobalSymmetry: renaming does not stabilize the formula")
                else:
                    outside = sum(1 for a in images if a not in self.formula.clauses)
                    if outside:
                        self.fail(sid, f"ScopeViolation: {outside} renamed ancestor clause(s) outside the formula")
                    if self.strict and not self.pure[k.source]:
                        self.fail(sid, "StrictAncestry: source history contains symmetry steps")
                for a in images:
                    anc |= self.table.bit(a)
                pure = False
        if c != step.clause:
            self.fail(sid, "ClauseMismatch: stored clause differs from the recomputed one")
        self.clauses[sid] = c
        self.anc[sid] = anc
        self.pure[sid] = pure


def check(
    formula: CnfFormula,
    trace: Derivation,
    mode: str = SRC2,
    strict: bool = False,
    replay: bool = False,
) -> CheckReport:
    """Validate ``trace`` against ``formula`` under ``mode``.

    ``strict`` additionally requires the source of every local symmetry step
    to have a symmetry-free history.  ``replay`` materializes the pure
    resolution witness of every symmetry step and re-checks it.
    """
    mode = normalize_mode(mode)
    p = _Pass(formula, trace, mode, strict)
    p.run()
    if replay and not p.failures:
        from .oracle import replay_symmetry

        for step in trace.steps:
            if step.premises() and not isinstance(step.kind, (Axiom, Resolve)):
                witness = replay_symmetry(trace, step.id)
                sub = check(formula, witness, RESOLUTION)
                if not sub.valid or witness.steps[-1].clause != p.clauses[step.id]:
                    p.fail(step.id, "ReplayFailed: materialized witness does not check")
    return CheckReport(
        valid=not p.failures,
        mode_used=mode,
        length=len(trace),
        derives_bottom=any(not c for c in p.clauses.values()),
        failures=p.failures,
    )


def ancestry(trace: Derivation, step_id: int, formula: CnfFormula | None = None) -> set[frozenset]:
    """The formula clauses step ``step_id`` is pure-resolution derivable from."""
    formula = formula if formula is not None else trace.formula
    if formula is None:
        formula = CnfFormula.from_clauses(s.clause for s in trace.steps if s.is_axiom)
    p = _Pass(formula, trace, SRC2, False)
    p.run(upto=step_id)
    return set(p.table.members(p.anc[step_id]))


def ancestry_sizes(trace: Derivation, formula: CnfFormula | None = None) -> dict[int, int]:
    """Ancestry size of the source of every symmetry step (its scope), keyed by step id."""
    formula = formula if formula is not None else trace.formula
    if formula is None:
        formula = CnfFormula.from_clauses(s.clause for s in trace.steps if s.is_axiom)
    p = _Pass(formula, trace, SRC2, False)
    p.run()
    out = {}
    for s in trace.steps:
        if not isinstance(s.kind, (Axiom, Resolve)):
            out[s.id] = bin(p.anc[s.kind.source]).count("1")
    return out
