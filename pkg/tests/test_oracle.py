import itertools
import random

import numpy as np
import pytest

from symres.checker import RESOLUTION, SRC2, check
from symres.cnf import IDENTITY, CnfFormula, Raw, clause, make_renaming, neg, pos
from symres.graph_prove import refute_multipede
from symres.graphs import BipartiteGraph, ColoredGraph, cfi_gadget, cfi_pair, encode_iso, path_graph
from symres.linalg import LinSystem, solve
from symres.lineq import encode_system, random_system
from symres.lineq_prove import refute_system
from symres.oracle import (
    InvalidTrace,
    TooLarge,
    automorphisms_bruteforce,
    entails,
    iso_bruteforce,
    lin_bruteforce,
    models_bruteforce,
    replay_symmetry,
    sat_bruteforce,
)
from symres.trace import LOCAL, Derivation, DerivationBuilder, ProofStep, Symmetry

v = [None] + [Raw(i) for i in range(1, 9)]


def swap(*pairs):
    out = []
    for s, t in pairs:
        out += [(pos(s), pos(t)), (pos(t), pos(s))]
    return make_renaming(out)


class TestSat:
    def test_contradiction(self):
        assert not sat_bruteforce(encode_system(LinSystem.from_rows([[1], [1]], [0, 1], 2))).satisfiable

    def test_empty_formula(self):
        res = sat_bruteforce(CnfFormula.from_clauses([]))
        assert res.satisfiable and res.model == {}

    def test_first_model_is_lexicographic(self):
        F = CnfFormula.from_clauses([clause(pos(v[1]), pos(v[2]))])
        assert sat_bruteforce(F).model == {v[1]: False, v[2]: True}

    def test_cfi_base_case(self):
        X, Xt = cfi_pair(path_graph(2))
        assert not sat_bruteforce(encode_iso(X.graph, Xt.graph)).satisfiable

    def test_too_large(self):
        F = CnfFormula.from_clauses([clause(pos(Raw(i))) for i in range(1, 26)])
        with pytest.raises(TooLarge):
            sat_bruteforce(F)

    def test_models_and_entailment(self):
        F = CnfFormula.from_clauses([clause(pos(v[1]), pos(v[2])), clause(neg(v[1]))])
        assert models_bruteforce(F).tolist() == [[False, True]]
        assert entails(F.clauses, clause(pos(v[2])), F.symbols)
        assert not entails(F.clauses, clause(pos(v[1])), F.symbols)


class TestGraphs:
    def test_gadget_automorphisms(self):
        assert len(automorphisms_bruteforce(cfi_gadget([1, 2, 3]))) == 4

    def test_cfi_single_edge(self):
        X, Xt = cfi_pair(path_graph(2))
        assert iso_bruteforce(X.graph, Xt.graph) == []
        # the lone middle of each degree-1 gadget touches only b, so a and b are told apart
        assert iso_bruteforce(X.graph, X.graph) == [tuple(range(6))]

    def test_colors_respected(self):
        g1 = ColoredGraph.build(2, [(0, 1)], ["r", "g"])
        g2 = ColoredGraph.build(2, [(0, 1)], ["g", "r"])
        assert iso_bruteforce(g1, g2) == [(1, 0)]
        assert iso_bruteforce(g1, ColoredGraph.build(3, [])) == []

    def test_caps(self):
        big = ColoredGraph.build(11, [])
        with pytest.raises(TooLarge):
            iso_bruteforce(big, big)
        with pytest.raises(TooLarge):
            automorphisms_bruteforce(ColoredGraph.build(13, []))

    def test_multipede_asymmetric(self):
        g = BipartiteGraph.build([0, 1], [2, 3], [(0, 2), (0, 3), (1, 3)])
        p = refute_multipede(g, 3)
        assert check(p.formula, p.derivation, SRC2).valid
        assert not sat_bruteforce(p.formula).satisfiable


class TestLin:
    def test_examples(self):
        s = LinSystem.from_rows([[1, 1], [0, 1]], [1, 1], 2)
        assert [x.tolist() for x in lin_bruteforce(s, limit=None)] == [[0, 1]]
        assert lin_bruteforce(LinSystem.from_rows([[1], [1]], [0, 1], 2)) == []

    def test_cap(self):
        s = LinSystem(np.zeros((0, 21), dtype=np.int64), np.zeros(0, dtype=np.int64), 2)
        with pytest.raises(TooLarge):
            lin_bruteforce(s)


def three_step():
    """Resolve {x1∨x2}, {¬x1∨x2∨x3}, {¬x3} to {x2}, then rename x1..x3 → x4..x6."""
    F = CnfFormula.from_clauses(
        [
            clause(pos(v[1]), pos(v[2])),
            clause(neg(v[1]), pos(v[2]), pos(v[3])),
            clause(neg(v[3])),
            clause(pos(v[4]), pos(v[5])),
            clause(neg(v[4]), pos(v[5]), pos(v[6])),
            clause(neg(v[6])),
        ]
    )
    b = DerivationBuilder(F)
    r1 = b.resolve(b.axiom([pos(v[1]), pos(v[2])]), b.axiom([neg(v[1]), pos(v[2]), pos(v[3])]), v[1])
    r2 = b.resolve(r1, b.axiom([neg(v[3])]), v[3])
    b.symmetry(r2, swap((v[1], v[4]), (v[2], v[5]), (v[3], v[6])), LOCAL)
    return F, b.build()


class TestReplay:
    def test_identity_is_verbatim(self):
        F, d = three_step()
        b = DerivationBuilder(F)
        b.axiom([pos(v[1]), pos(v[2])])
        b.symmetry(1, IDENTITY)
        r = replay_symmetry(b.build(), 2)
        assert [s.clause for s in r.steps] == [clause(pos(v[1]), pos(v[2]))]

        r = replay_symmetry(d, 5)
        assert len(r) == 2 and r.last.clause == d.step(5).clause
        assert {s.clause for s in r.steps} == {s.clause for s in d.steps[:5]}

    def test_one_level(self):
        F, d = three_step()
        r = replay_symmetry(d, 6)
        assert len(r) == 2
        assert sum(1 for s in r.steps if s.is_axiom) == 3
        assert r.last.clause == d.last.clause == clause(pos(v[5]))
        assert check(F, r, RESOLUTION).valid

    def test_nested(self):
        F, d = three_step()
        # rename the renamed clause back: step 7 cites step 6, itself a symmetry step
        back = swap((v[1], v[4]), (v[2], v[5]), (v[3], v[6]))
        steps = list(d.steps) + [ProofStep(7, Symmetry(6, back, LOCAL), back.apply(d.last.clause))]
        nested = Derivation(tuple(steps), F)
        assert check(F, nested, SRC2).valid
        r = replay_symmetry(nested, 7)
        assert r.last.clause == clause(pos(v[2]))
        assert check(F, r, RESOLUTION).valid

    def test_lineq_symmetry_steps(self):
        rng = random.Random(1)
        seen = 0
        for _ in range(20):
            d = refute_system(random_system(rng, 3, 5, 4, 3, inconsistent=True)).derivation
            for s in d.steps:
                if isinstance(s.kind, Symmetry):
                    seen += 1
                    r = replay_symmetry(d, s.id)
                    assert r.last.clause == s.clause
                    assert check(d.formula, r, RESOLUTION).valid
        assert seen

    def test_bad_step(self):
        _, d = three_step()
        with pytest.raises(InvalidTrace):
            replay_symmetry(d, 99)


def test_solver_agreement_f2_exhaustive():
    for m in (1, 2):
        for n in (1, 2, 3):
            for entries in itertools.product(range(2), repeat=m * n + m):
                A = np.array(entries[: m * n]).reshape(m, n)
                s = LinSystem(A, np.array(entries[m * n :]), 2)
                assert (solve(s.A, s.b, 2) is not None) == sat_bruteforce(encode_system(s)).satisfiable


def test_solver_agreement_random_f3():
    rng = random.Random(7)
    for _ in range(60):
        s = random_system(rng, 3, rng.randint(1, 6), rng.randint(1, 5), 3)
        sat = sat_bruteforce(encode_system(s)).satisfiable
        assert (solve(s.A, s.b, 3) is not None) == sat == bool(lin_bruteforce(s))
