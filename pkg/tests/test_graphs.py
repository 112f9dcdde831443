import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symres.cnf import IsoVar, neg
from symres.graphs import (
    BaseGraph,
    BipartiteGraph,
    ColoredGraph,
    GraphError,
    GraphFormatError,
    NoEdge,
    NotBipartite,
    SizeMismatch,
    TooLarge,
    base_from_spec,
    cfi_gadget,
    cfi_pair,
    complete_graph,
    cycle_graph,
    emit_bipartite,
    emit_graph,
    encode_iso,
    even_subsets,
    gadget_automorphisms,
    individualize,
    mp_matrix,
    multipede,
    odd_subsets,
    parse_bipartite,
    parse_graph,
    path_graph,
)
from symres.linalg import kernel_basis
from symres.oracle import automorphisms_bruteforce, iso_bruteforce, models_bruteforce, sat_bruteforce


def partition(g: ColoredGraph):
    classes = {}
    for v, c in enumerate(g.colors):
        classes.setdefault(c, set()).add(v)
    return sorted(map(sorted, classes.values()))


class TestGadget:
    def test_three_feet(self):
        g = cfi_gadget([1, 2, 3])
        assert g.n == 10
        assert gadget_automorphisms([1, 2, 3]) == [frozenset(), *map(frozenset, [(1, 2), (1, 3), (2, 3)])]

    def test_single_foot(self):
        assert gadget_automorphisms([7]) == [frozenset()]

    def test_middle_adjacency(self):
        g = cfi_gadget([1, 2])
        idx = {lab: i for i, lab in enumerate(g.labels)}
        assert g.neighbors(idx["m_{1,2}"]) == sorted([idx["a_1"], idx["a_2"]])
        assert g.neighbors(idx["m_{}"]) == sorted([idx["b_1"], idx["b_2"]])

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_count_against_oracle(self, k):
        N = list(range(k))
        g = cfi_gadget(N)
        assert g.n == 2 * k + 2 ** (k - 1)
        autos = automorphisms_bruteforce(g, cap=16)
        assert len(autos) == len(gadget_automorphisms(N)) == 2 ** (k - 1)
        # swap-sets read off the oracle's automorphisms are the even subsets
        idx = {lab: i for i, lab in enumerate(g.labels)}
        swaps = {frozenset(w for w in N if img[idx[f"a_{w}"]] == idx[f"b_{w}"]) for img in autos}
        assert swaps == set(even_subsets(N))

    def test_degree_guard(self):
        with pytest.raises(TooLarge):
            cfi_gadget(range(13))


class TestCfiPair:
    def test_single_edge(self):
        X, Xt = cfi_pair(path_graph(2))
        assert X.graph.n == Xt.graph.n == 6
        assert X.graph.colors == Xt.graph.colors
        assert len(X.graph.edges ^ Xt.graph.edges) == 4
        assert iso_bruteforce(X.graph, Xt.graph) == []

    def test_triangle_size(self):
        X, _ = cfi_pair(cycle_graph(3))
        assert X.graph.n == 18

    def test_triangle_not_isomorphic(self):
        X, Xt = cfi_pair(cycle_graph(3))
        assert iso_bruteforce(X.graph, Xt.graph, limit=1, cap=18) == []
        assert iso_bruteforce(X.graph, X.graph, limit=1, cap=18)

    def test_twist_variants_isomorphic(self):
        base = cycle_graph(3)
        _, t0 = cfi_pair(base, 0)
        _, t2 = cfi_pair(base, (2, 0))
        assert t0.twist != t2.twist
        assert iso_bruteforce(t0.graph, t2.graph, limit=1, cap=18)

    def test_errors(self):
        with pytest.raises(NoEdge):
            cfi_pair(BaseGraph.build(2, []))
        with pytest.raises(GraphError):
            cfi_pair(path_graph(3), (0, 2))

    def test_unsatisfiable_encoding(self):
        X, Xt = cfi_pair(path_graph(2))
        F = encode_iso(X.graph, Xt.graph)
        assert F.num_vars == 10
        assert not sat_bruteforce(F).satisfiable


class TestMultipede:
    def test_path(self):
        g = BipartiteGraph.build([0], [1, 2], [(0, 1), (0, 2)])
        mp = multipede(g)
        assert mp_matrix(g).tolist() == [[1, 1]]
        assert mp.graph.n == 6
        assert sorted(S for _, S in mp.mid) == sorted(even_subsets([1, 2]))

    def test_feet_shared(self):
        g = BipartiteGraph.build([0, 1], [2, 3], [(0, 2), (0, 3), (1, 3)])
        mp = multipede(g)
        feet = {mp.a[3], mp.b[3]}
        touching = {m for (v, _), m in mp.mid.items() if set(mp.graph.neighbors(m)) & feet}
        assert {v for (v, _), m in mp.mid.items() if m in touching} == {0, 1}

    @pytest.mark.parametrize(
        "V,W,edges",
        [
            ([0], [1, 2], [(0, 1), (0, 2)]),
            ([0, 1], [2, 3], [(0, 2), (0, 3), (1, 3)]),
            ([0, 1], [2, 3], [(0, 2), (0, 3), (1, 2), (1, 3)]),
            ([0, 1], [2, 3, 4], [(0, 2), (0, 3), (1, 3), (1, 4)]),
        ],
    )
    def test_automorphisms_match_kernel(self, V, W, edges):
        g = BipartiteGraph.build(V, W, edges)
        mp = multipede(g)
        autos = automorphisms_bruteforce(mp.graph)
        K = kernel_basis(g.matrix(), 2)
        assert len(autos) == 2 ** len(K)
        kernel = {tuple(int(x) for x in np.array(c) @ K % 2) for c in itertools.product(range(2), repeat=len(K))}
        if not len(K):
            kernel = {(0,) * len(W)}
        swaps = {tuple(int(img[mp.a[w]] == mp.b[w]) for w in g.W) for img in autos}
        assert swaps == kernel

    def test_not_bipartite(self):
        with pytest.raises(NotBipartite):
            BipartiteGraph.build([0, 1], [2], [(0, 1)])
        with pytest.raises(NotBipartite):
            BipartiteGraph.build([0], [0], [])


def test_individualize():
    g = cfi_gadget([1, 2]).recolored(["x"] * 6)
    once = individualize(g, 2)
    assert once.colors[2] == "(x,1)" and once.colors[0] == "(x,0)"
    assert partition(individualize(once, 2)) == partition(once) == [[0, 1, 3, 4, 5], [2]]


class TestEncodeIso:
    def test_single_edges(self):
        g = ColoredGraph.build(2, [(0, 1)])
        F = encode_iso(g, g)
        assert sat_bruteforce(F).satisfiable
        assert len(models_bruteforce(F)) == 2

    def test_type3_clause(self):
        g1 = ColoredGraph.build(3, [(0, 1)])
        g2 = ColoredGraph.build(3, [(1, 2)])
        F = encode_iso(g1, g2)
        assert frozenset([neg(IsoVar(0, 0)), neg(IsoVar(1, 1))]) in F.clauses
        assert frozenset([neg(IsoVar(0, 1)), neg(IsoVar(1, 2))]) not in F.clauses

    def test_colors_restrict_variables(self):
        g1 = ColoredGraph.build(2, [], ["r", "g"])
        g2 = ColoredGraph.build(2, [], ["g", "r"])
        assert set(encode_iso(g1, g2).symbols) == {IsoVar(0, 1), IsoVar(1, 0)}

    def test_missing_color_gives_bottom(self):
        g1 = ColoredGraph.build(1, [], ["r"])
        g2 = ColoredGraph.build(1, [], ["g"])
        assert frozenset() in encode_iso(g1, g2).clauses

    def test_size_mismatch(self):
        with pytest.raises(SizeMismatch):
            encode_iso(ColoredGraph.build(1, []), ColoredGraph.build(2, []))


@st.composite
def colored_graphs(draw, n):
    edges = [e for e in itertools.combinations(range(n), 2) if draw(st.booleans())]
    colors = [draw(st.sampled_from("rgb")) for _ in range(n)]
    return ColoredGraph.build(n, edges, colors)


@settings(max_examples=60)
@given(st.integers(1, 7).flatmap(lambda n: st.tuples(colored_graphs(n), colored_graphs(n))))
def test_models_are_isomorphisms(pair):
    g1, g2 = pair
    F = encode_iso(g1, g2)
    if F.num_vars > 18:
        return
    keys = sorted(F.symbols, key=F.symbols.get)
    models = set()
    for row in models_bruteforce(F):
        image = [None] * g1.n
        for k, on in zip(keys, row):
            if on:
                assert image[k.u] is None
                image[k.u] = k.v
        models.add(tuple(image))
    assert models == set(iso_bruteforce(g1, g2))


class TestFormats:
    def test_graph_round_trip(self):
        X, _ = cfi_pair(path_graph(2))
        back = parse_graph(emit_graph(X.graph))
        assert (back.n, back.edges, back.colors) == (X.graph.n, X.graph.edges, X.graph.colors)

    def test_bipartite_round_trip(self):
        g = BipartiteGraph.build([0, 1], [2, 3], [(0, 2), (0, 3), (1, 3)])
        assert parse_bipartite(emit_bipartite(g)) == g

    def test_default_color(self):
        assert parse_graph("graph 2\ne 0 1\n").colors == ("0", "0")

    @pytest.mark.parametrize(
        "text", ["", "e 0 1\n", "graph 2\ne 0 5\n", "graph 2\nfoo\n", "graph x\n", "graph 2\ngraph 2\n"]
    )
    def test_malformed(self, text):
        with pytest.raises(GraphFormatError):
            parse_graph(text)

    def test_bipartite_needs_parts(self):
        with pytest.raises(GraphFormatError):
            parse_bipartite("graph 2\npart v 0\ne 0 1\n")

    def test_base_specs(self, tmp_path):
        assert base_from_spec("cycle:4").edges == cycle_graph(4).edges
        assert base_from_spec("complete:4") == complete_graph(4)
        f = tmp_path / "g.graph"
        f.write_text("graph 3\ne 0 1\ne 1 2\n")
        assert base_from_spec(str(f)) == path_graph(3)
        with pytest.raises(GraphFormatError):
            base_from_spec("path:x")


def test_phi4():
    assert path_graph(3).phi4() == 4 + 16 + 4
    assert complete_graph(4).phi4() == 4 * 64


def test_subsets():
    assert len(even_subsets(range(4))) == len(odd_subsets(range(4))) == 8
