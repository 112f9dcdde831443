import pytest
from hypothesis import given
from hypothesis import strategies as st

from symres.cnf import IDENTITY, CnfFormula, Raw, clause, make_renaming, neg, pos
from symres.graph_prove import refute_cfi
from symres.graphs import path_graph
from symres.trace import (
    GLOBAL,
    LOCAL,
    Axiom,
    BadRenamingSpec,
    BadStepRef,
    Derivation,
    DerivationBuilder,
    HostTooWeak,
    MissingPremise,
    Resolve,
    Symmetry,
    TraceFormatError,
    append_axiom,
    append_resolve,
    append_symmetry,
    concat,
    emit_trace,
    parse_trace,
    weaken_lift,
)

x, y, a = Raw(1), Raw(2), Raw(3)


def unit_refutation() -> Derivation:
    b = DerivationBuilder()
    i = append_axiom(b, [pos(x)])
    j = append_axiom(b, [neg(x)])
    append_resolve(b, i, j, x)
    return b.build()


def test_unit_refutation_has_length_one():
    d = unit_refutation()
    assert len(d) == 1
    assert d.derives_bottom
    assert d.last.clause == frozenset()


def test_identity_symmetry_adds_one_step():
    b = DerivationBuilder()
    i = b.axiom([pos(x), pos(a)])
    j = b.axiom([neg(x)])
    r = b.resolve(i, j, x)
    s = append_symmetry(b, r, IDENTITY)
    d = b.build()
    assert d.step(s).clause == d.step(r).clause
    assert len(d) == 2


def test_axioms_are_deduplicated():
    b = DerivationBuilder()
    assert b.axiom([pos(x)]) == b.axiom([pos(x)])
    assert len(b) == 1


def test_bad_refs_and_modes():
    b = DerivationBuilder()
    b.axiom([pos(x)])
    with pytest.raises(MissingPremise):
        b.resolve(1, 2, x)
    with pytest.raises(ValueError):
        b.symmetry(1, IDENTITY, mode="sideways")


def test_cfi_base_case_length():
    assert len(refute_cfi(path_graph(2)).derivation) == 6


def test_count_kinds():
    b = DerivationBuilder()
    i = b.axiom([pos(x)])
    b.symmetry(i, make_renaming([(pos(x), neg(x))]), GLOBAL)
    b.symmetry(i, IDENTITY, LOCAL)
    assert b.build().count_kinds() == {"axiom": 1, "resolve": 0, "symmetry_global": 1, "symmetry_local": 1}


class TestConcat:
    def test_empty_right(self):
        d = unit_refutation()
        assert concat(d, Derivation(())).steps == d.steps

    def test_chain_lengths_add(self):
        # A = {x∨y, ¬x} ⊢₁ {y};  {y} with {¬y} ⊢₁ ⊥
        F = CnfFormula.from_clauses([clause(pos(x), pos(y)), clause(neg(x)), clause(neg(y))])
        b1 = DerivationBuilder(F)
        b1.resolve(b1.axiom([pos(x), pos(y)]), b1.axiom([neg(x)]), x)
        b2 = DerivationBuilder()
        b2.resolve(b2.axiom([pos(y)]), b2.axiom([neg(y)]), y)
        d = concat(b1.build(), b2.build())
        assert len(d) == 2
        assert d.derives_bottom
        assert d.last.kind == Resolve(3, 4, y)

    def test_independent_union(self):
        F = CnfFormula.from_clauses([clause(pos(x)), clause(neg(x)), clause(pos(y)), clause(neg(y))])
        b1, b2 = DerivationBuilder(F), DerivationBuilder(F)
        b1.resolve(b1.axiom([pos(x)]), b1.axiom([neg(x)]), x)
        b2.resolve(b2.axiom([pos(y)]), b2.axiom([neg(y)]), y)
        assert len(concat(b1.build(), b2.build())) == 2

    def test_missing_premise(self):
        F = CnfFormula.from_clauses([clause(pos(x))])
        b = DerivationBuilder()
        b.axiom([neg(a)])
        with pytest.raises(MissingPremise):
            concat(DerivationBuilder(F).build(), b.build())


class TestWeakenLift:
    def test_lift(self):
        host = CnfFormula.from_clauses([clause(pos(x), pos(a)), clause(neg(x), pos(a))])
        d = weaken_lift(unit_refutation(), host, [pos(a)])
        assert len(d) == 1
        assert d.last.clause == clause(pos(a))

    def test_stronger_host(self):
        host = CnfFormula.from_clauses([clause(pos(x)), clause(neg(x), pos(a))])
        d = weaken_lift(unit_refutation(), host, [pos(a)])
        assert d.last.clause <= clause(pos(a))

    def test_too_weak(self):
        host = CnfFormula.from_clauses([clause(pos(x), pos(a))])
        with pytest.raises(HostTooWeak):
            weaken_lift(unit_refutation(), host, [pos(a)])


class TestTraceFormat:
    F = CnfFormula.from_clauses([clause(pos(x)), clause(neg(x))])

    def test_parse_unit(self):
        d = parse_trace("srt 1\na 1 0\na -1 0\nr 1 2 1 0\n", self.F)
        assert len(d) == 1 and d.derives_bottom
        assert isinstance(d.step(1).kind, Axiom)

    def test_round_trip_cfi_base_case(self):
        proof = refute_cfi(path_graph(2))
        text = emit_trace(proof.derivation, proof.formula)
        back = parse_trace(text, proof.formula)
        assert back.steps == proof.derivation.steps
        assert emit_trace(back, proof.formula) == text

    def test_symmetry_line(self):
        F = CnfFormula.from_clauses([clause(pos(x), pos(y)), clause(neg(x), pos(y))])
        d = parse_trace("srt 1\na 1 2 0\ns l 1 1:-1 ; -1 2 0\n", F)
        k = d.step(2).kind
        assert isinstance(k, Symmetry) and k.mode == LOCAL
        assert d.step(2).clause == clause(neg(x), pos(y))

    def test_step_zero(self):
        with pytest.raises(BadStepRef):
            parse_trace("srt 1\na 1 0\nr 0 1 1 0\n", self.F)

    def test_forward_reference(self):
        with pytest.raises(BadStepRef):
            parse_trace("srt 1\na 1 0\nr 1 3 1 0\n", self.F)

    @pytest.mark.parametrize(
        "text",
        ["a 1 0\n", "srt 1\na 1\n", "srt 1\nq 1 0\n", "srt 1\na 7 0\n", "srt 1\na 1 0\ns x 1 ; 1 0\n"],
    )
    def test_malformed(self, text):
        with pytest.raises(TraceFormatError):
            parse_trace(text, self.F)

    def test_bad_renaming(self):
        with pytest.raises(BadRenamingSpec):
            parse_trace("srt 1\na 1 0\ns l 1 1 ; 1 0\n", self.F)

    def test_parse_without_formula(self):
        d = parse_trace("srt 1\na 5 -9 0\n")
        assert d.step(1).clause == clause(pos(Raw(5)), neg(Raw(9)))


@st.composite
def random_derivations(draw):
    """Random pure-resolution DAG over six variables."""
    vars_ = [Raw(i) for i in range(1, 7)]
    b = DerivationBuilder()
    for _ in range(draw(st.integers(2, 6))):
        lits = draw(st.lists(st.tuples(st.sampled_from(vars_), st.booleans()), min_size=1, max_size=3))
        b.axiom(frozenset(pos(v) if s else neg(v) for v, s in lits))
    for _ in range(draw(st.integers(0, 8))):
        i = draw(st.integers(1, len(b)))
        j = draw(st.integers(1, len(b)))
        ci, cj = b.clause(i), b.clause(j)
        pivots = [l.var for l in ci if l.positive and neg(l.var) in cj]
        if pivots:
            b.resolve(i, j, draw(st.sampled_from(sorted(pivots))))
    return b.build()


@given(random_derivations())
def test_trace_round_trip(d):
    F = CnfFormula.from_clauses([s.clause for s in d.steps if s.is_axiom], extra_vars=[Raw(i) for i in range(1, 7)])
    back = parse_trace(emit_trace(d, F), F)
    assert back.steps == d.steps


@given(random_derivations(), random_derivations())
def test_concat_length_adds(d1, d2):
    assert len(concat(d1, d2)) == len(d1) + len(d2)
