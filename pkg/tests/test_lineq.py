import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symres.cnf import IDENTITY, CnfFormula, Xi, clause, neg, pos
from symres.linalg import LinSystem, solve
from symres.lineq import (
    assignments,
    cycle_system,
    encode_row,
    encode_system,
    forbidden_points,
    random_system,
    translation_symmetry,
    xi_namer,
)
from symres.oracle import sat_bruteforce


def xi(i, k, p=2):
    return Xi(i, k, p)


class TestEncodeRow:
    def test_xor(self):
        enc = encode_row([1, 1], 1, 2)
        assert enc.clauses == {
            clause(neg(xi(1, 0)), neg(xi(2, 0))),
            clause(neg(xi(1, 1)), neg(xi(2, 1))),
        }

    def test_zero_row(self):
        assert encode_row([0, 0], 1, 2).clauses == {frozenset()}
        assert encode_row([0, 0], 0, 2).clauses == frozenset()

    def test_count_f3(self):
        # 9 vectors on supp = {1,2}; 3 of them satisfy 2x1 + x2 = 0
        assert len(encode_row([2, 1], 0, 3).clauses) == 6

    def test_length_check(self):
        with pytest.raises(ValueError):
            encode_row([1, 1], 0, 2, n=3)


class TestEncodeSystem:
    def test_contradiction(self):
        f = encode_system(LinSystem.from_rows([[1], [1]], [0, 1], 2))
        assert f.clauses == {clause(neg(xi(1, 1))), clause(neg(xi(1, 0))), clause(pos(xi(1, 0)), pos(xi(1, 1)))}
        assert not sat_bruteforce(f).satisfiable

    def test_solvable(self):
        f = encode_system(LinSystem.from_rows([[1, 1], [0, 1]], [1, 1], 2))
        res = sat_bruteforce(f)
        assert res.satisfiable
        assert res.model[xi(1, 0)] and res.model[xi(2, 1)]

    def test_empty_system(self):
        f = encode_system(LinSystem(np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64), 3))
        assert len(f) == 2 and f.num_vars == 6
        assert sat_bruteforce(f).satisfiable

    def test_unused_coordinates_get_v(self):
        f = encode_system(LinSystem.from_rows([[1, 0, 0]], [1], 2))
        assert clause(pos(xi(3, 0)), pos(xi(3, 1))) in f.clauses


class TestTranslation:
    def test_zero_is_identity(self):
        assert translation_symmetry([0, 0], 3) == IDENTITY

    def test_stabilizes_when_orthogonal(self):
        enc = encode_row([1, 1], 1, 2).clauses
        d = translation_symmetry([1, 1], 2)
        assert {d.apply(c) for c in enc} == enc

    def test_breaks_otherwise(self):
        enc = encode_row([1, 0], 1, 2).clauses
        d = translation_symmetry([1, 0], 2)
        assert {d.apply(c) for c in enc} != enc


def test_assignments_order():
    got = [x.tolist() for x in assignments([0, 2], 2, 3)]
    assert got == [[0, 0, 0], [0, 0, 1], [1, 0, 0], [1, 0, 1]]


def test_cycle_system_is_inconsistent():
    for L in range(3, 8):
        s = cycle_system(L)
        assert s.width == 2
        assert solve(s.A, s.b, 2) is None


def test_random_system_deterministic_and_inconsistent():
    a = random_system(random.Random(4), 3, 5, 4, 2, inconsistent=True)
    b = random_system(random.Random(4), 3, 5, 4, 2, inconsistent=True)
    assert a == b and a.width <= 2
    assert solve(a.A, a.b, 3) is None


# ---------------------------------------------------------------------------
# properties


@st.composite
def rows(draw, max_n=4):
    p = draw(st.sampled_from([2, 3, 5]))
    n = draw(st.integers(1, max_n))
    a = draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n))
    b = draw(st.integers(0, p - 1))
    return np.array(a), b, p


@given(rows())
def test_row_clause_count(row):
    a, b, p = row
    s = int((a != 0).sum())
    if s:
        assert len(encode_row(a, b, p).clauses) == p**s - p ** (s - 1)


@given(rows(), st.integers(1, 4))
def test_scaling_invariance(row, k):
    a, b, p = row
    if k % p == 0:
        return
    assert encode_row(a, b, p).clauses == encode_row(k * a % p, k * b % p, p).clauses


@given(rows(), st.data())
def test_restriction_law(row, data):
    # diag(a)d = diag(a)d' ⇒ Δ_d and Δ_d' agree on every clause of F(a,b)
    a, b, p = row
    n = len(a)
    d = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)))
    noise = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)))
    d2 = np.where(a != 0, d, noise)
    s1, s2 = translation_symmetry(d, p), translation_symmetry(d2, p)
    for c in encode_row(a, b, p).clauses:
        assert s1.apply(c) == s2.apply(c)


@given(rows(max_n=3), st.data())
def test_system_symmetry_from_kernel(row, data):
    a, b, p = row
    n = len(a)
    d = np.array(data.draw(st.lists(st.integers(0, p - 1), min_size=n, max_size=n)))
    f = CnfFormula.from_clauses(encode_row(a, b, p).clauses, modulus=p)
    sigma = translation_symmetry(d, p)
    assert f.stabilized_by(sigma) == (int(a @ d) % p == 0)


def test_forbidden_points_small():
    pts = sorted(tuple(x) for x in forbidden_points([1, 0, 1], 0, 2))
    assert pts == [(0, 0, 1), (1, 0, 0)]


def test_namer():
    assert xi_namer(3)(0, 2) == Xi(1, 2, 3)


def test_exhaustive_small_equivalence():
    # solvability ⇔ satisfiability on every 2×2 system over F_2
    for entries in itertools.product(range(2), repeat=6):
        A = np.array(entries[:4]).reshape(2, 2)
        b = np.array(entries[4:])
        s = LinSystem(A, b, 2)
        assert (solve(A, b, 2) is not None) == sat_bruteforce(encode_system(s)).satisfiable
