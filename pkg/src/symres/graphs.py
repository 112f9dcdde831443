"""Colored graphs, CFI gadgets and graphs, multipedes and the isomorphism CNF.

Vertices are the integers ``0..n-1``; every graph also carries a tuple of
human-readable labels.  Colors are opaque strings compared for equality.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .cnf import CnfFormula, IsoVar, neg, pos

MAX_DEGREE = 12


class GraphError(ValueError):
    pass


class TooLarge(GraphError):
    pass


class NoEdge(GraphError):
    pass


class NotBipartite(GraphError):
    pass


class Disconnected(GraphError):
    pass


class SizeMismatch(GraphError):
    pass


class GraphFormatError(GraphError):
    pass


def _edge(u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise GraphError(f"self-loop at {u}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class ColoredGraph:
    n: int
    edges: frozenset  # of (u, v) with u < v
    colors: tuple[str, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.colors) != self.n:
            raise GraphError("one color per vertex required")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise GraphError(f"bad edge {(u, v)}")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(self.n)))

    @classmethod
    def build(cls, n: int, edges: Iterable[tuple[int, int]], colors: Sequence[str] | None = None, labels=()):
        colors = tuple(colors) if colors is not None else ("0",) * n
        return cls(n, frozenset(_edge(u, v) for u, v in edges), colors, tuple(labels))

    def has_edge(self, u: int, v: int) -> bool:
        return u != v and _edge(u, v) in self.edges

    def neighbors(self, u: int) -> list[int]:
        return sorted({b if a == u else a for a, b in self.edges if u in (a, b)})

    def adjacency(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            adj[u, v] = adj[v, u] = True
        return adj

    def recolored(self, colors: Sequence[str]) -> "ColoredGraph":
        return ColoredGraph(self.n, self.edges, tuple(colors), self.labels)


def individualize(g: ColoredGraph, vertex: int) -> ColoredGraph:
    """Give ``vertex`` a color of its own: (f(v),1) for it, (f(v'),0) for all others."""
    colors = [f"({c},{int(i == vertex)})" for i, c in enumerate(g.colors)]
    return g.recolored(colors)


# ---------------------------------------------------------------------------
# Base graphs


@dataclass(frozen=True)
class BaseGraph:
    """Uncolored simple graph; edges are kept sorted and indexed."""

    n: int
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def build(cls, n: int, edges: Iterable[tuple[int, int]]) -> "BaseGraph":
        es = sorted({_edge(u, v) for u, v in edges})
        for u, v in es:
            if v >= n:
                raise GraphError(f"edge {(u, v)} references a missing vertex")
        return cls(n, tuple(es))

    def incident(self, v: int) -> list[tuple[int, int]]:
        return [e for e in self.edges if v in e]

    def degree(self, v: int) -> int:
        return len(self.incident(v))

    def edge_index(self, e: tuple[int, int]) -> int:
        return self.edges.index(_edge(*e))

    def phi4(self) -> int:
        return sum(4 ** self.degree(v) for v in range(self.n))

    def component(self, v: int, edges: Iterable[tuple[int, int]] | None = None) -> set[int]:
        edges = list(self.edges if edges is None else edges)
        seen, stack = {v}, [v]
        while stack:
            x = stack.pop()
            for a, b in edges:
                for s, t in ((a, b), (b, a)):
                    if s == x and t not in seen:
                        seen.add(t)
                        stack.append(t)
        return seen

    def is_connected(self) -> bool:
        return self.n == 0 or len(self.component(0)) == self.n

    def to_colored(self) -> ColoredGraph:
        return ColoredGraph.build(self.n, self.edges)


def path_graph(n: int) -> BaseGraph:
    return BaseGraph.build(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> BaseGraph:
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    return BaseGraph.build(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> BaseGraph:
    return BaseGraph.build(n, itertools.combinations(range(n), 2))


def even_subsets(items: Sequence) -> list[frozenset]:
    """Even-size subsets of ``items``, ordered by size then lexicographically."""
    items = sorted(items)
    out = []
    for r in range(0, len(items) + 1, 2):
        out.extend(frozenset(c) for c in itertools.combinations(items, r))
    return out


def odd_subsets(items: Sequence) -> list[frozenset]:
    items = sorted(items)
    out = []
    for r in range(1, len(items) + 1, 2):
        out.extend(frozenset(c) for c in itertools.combinations(items, r))
    return out


def _guard_degree(d: int) -> None:
    if d > MAX_DEGREE:
        raise TooLarge(f"degree {d} exceeds the cap of {MAX_DEGREE}")


# ---------------------------------------------------------------------------
# CFI gadgets and graphs


def cfi_gadget(N: Sequence) -> ColoredGraph:
    """X_N: pairs a_w, b_w colored c_w and one middle m_S per even S ⊆ N."""
    N = sorted(N)
    _guard_degree(len(N))
    labels, colors, index = [], [], {}
    for w in N:
        for side in "ab":
            index[(side, w)] = len(labels)
            labels.append(f"{side}_{w}")
            colors.append(f"c:{w}")
    edges = []
    for S in even_subsets(N):
        m = len(labels)
        labels.append("m_{" + ",".join(map(str, sorted(S))) + "}")
        colors.append("m")
        for w in N:
            edges.append((m, index[("a" if w in S else "b", w)]))
    return ColoredGraph.build(len(labels), edges, colors, labels)


def gadget_automorphisms(N: Sequence) -> list[frozenset]:
    """Swap-sets of the automorphisms of X_N: exactly the even subsets of N."""
    N = sorted(N)
    _guard_degree(len(N))
    g = cfi_gadget(N)
    pos_of = {lab: i for i, lab in enumerate(g.labels)}
    out = []
    for D in even_subsets(N):
        perm = gadget_swap(N, D, pos_of)
        assert all(g.colors[perm[i]] == g.colors[i] for i in range(g.n))
        assert {_edge(perm[u], perm[v]) for u, v in g.edges} == set(g.edges)
        out.append(D)
    return out


def gadget_swap(N: Sequence, D: frozenset, pos_of: dict) -> list[int]:
    perm = list(range(len(pos_of)))
    for w in N:
        if w in D:
            perm[pos_of[f"a_{w}"]], perm[pos_of[f"b_{w}"]] = pos_of[f"b_{w}"], pos_of[f"a_{w}"]
    for S in even_subsets(N):
        T = S ^ D
        src = pos_of["m_{" + ",".join(map(str, sorted(S))) + "}"]
        perm[src] = pos_of["m_{" + ",".join(map(str, sorted(T))) + "}"]
    return perm


@dataclass(frozen=True)
class CfiInstance:
    base: BaseGraph
    twist: tuple[int, int] | None
    graph: ColoredGraph
    a: dict = field(repr=False)  # (v, e) -> vertex
    b: dict = field(repr=False)
    mid: dict = field(repr=False)  # (v, S) -> vertex, S a frozenset of base edges


def _cfi(base: BaseGraph, twist: tuple[int, int] | None) -> CfiInstance:
    for v in range(base.n):
        _guard_degree(base.degree(v))
    labels, colors = [], []
    a, b, mid = {}, {}, {}
    for v in range(base.n):
        inc = base.incident(v)
        for e in inc:
            ei = base.edge_index(e)
            for side, table in (("a", a), ("b", b)):
                table[(v, e)] = len(labels)
                labels.append(f"{side}^{v}_{e[0]}-{e[1]}")
                colors.append(f"ab:{v}:{ei}")
        for S in even_subsets(inc):
            mid[(v, S)] = len(labels)
            labels.append(f"m^{v}_" + "{" + ",".join(f"{x}-{y}" for x, y in sorted(S)) + "}")
            colors.append(f"m:{v}")
    edges = []
    for (v, S), m in mid.items():
        for e in base.incident(v):
            edges.append((m, (a if e in S else b)[(v, e)]))
    for e in base.edges:
        u, v = e
        if e == twist:
            edges += [(a[(u, e)], b[(v, e)]), (b[(u, e)], a[(v, e)])]
        else:
            edges += [(a[(u, e)], a[(v, e)]), (b[(u, e)], b[(v, e)])]
    g = ColoredGraph.build(len(labels), edges, colors, labels)
    return CfiInstance(base, twist, g, a, b, mid)


def cfi_graph(base: BaseGraph) -> CfiInstance:
    return _cfi(base, None)


def cfi_pair(base: BaseGraph, twist: tuple[int, int] | int = 0) -> tuple[CfiInstance, CfiInstance]:
    """(X(G), X̃(G)) with the pair edges of ``twist`` crossed in the second graph.

    ``twist`` is a base edge or an index into the sorted edge list.
    """
    if not base.edges:
        raise NoEdge("the base graph has no edge")
    e = base.edges[twist] if isinstance(twist, int) else _edge(*twist)
    if e not in base.edges:
        raise GraphError(f"{e} is not an edge of the base graph")
    return _cfi(base, None), _cfi(base, e)


# ---------------------------------------------------------------------------
# Multipedes


@dataclass(frozen=True)
class BipartiteGraph:
    V: tuple[int, ...]
    W: tuple[int, ...]
    edges: frozenset  # of (v, w) with v ∈ V, w ∈ W

    @classmethod
    def build(cls, V: Iterable[int], W: Iterable[int], edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        V, W = tuple(sorted(V)), tuple(sorted(W))
        if set(V) & set(W):
            raise NotBipartite("the two sides share a vertex")
        es = set()
        for x, y in edges:
            if x in V and y in W:
                es.add((x, y))
            elif y in V and x in W:
                es.add((y, x))
            else:
                raise NotBipartite(f"edge {(x, y)} does not cross the bipartition")
        return cls(V, W, frozenset(es))

    def neighbors(self, x: int) -> list[int]:
        if x in self.V:
            return sorted(w for v, w in self.edges if v == x)
        return sorted(v for v, w in self.edges if w == x)

    def matrix(self) -> np.ndarray:
        M = np.zeros((len(self.V), len(self.W)), dtype=np.int64)
        col = {w: j for j, w in enumerate(self.W)}
        row = {v: i for i, v in enumerate(self.V)}
        for v, w in self.edges:
            M[row[v], col[w]] = 1
        return M

    def is_connected(self) -> bool:
        nodes = list(self.V) + list(self.W)
        if not nodes:
            return True
        seen, stack = {nodes[0]}, [nodes[0]]
        while stack:
            x = stack.pop()
            for y in self.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(nodes)


def mp_matrix(g: BipartiteGraph) -> np.ndarray:
    """M(G) over F_2: rows V, columns W, 1 on edges."""
    return g.matrix()


@dataclass(frozen=True)
class MultipedeInstance:
    base: BipartiteGraph
    graph: ColoredGraph
    a: dict = field(repr=False)  # w -> vertex
    b: dict = field(repr=False)
    mid: dict = field(repr=False)  # (v, S) -> vertex, S a frozenset of feet

    def foot(self, w: int) -> tuple[int, int]:
        return self.a[w], self.b[w]


def multipede(g: BipartiteGraph) -> MultipedeInstance:
    """MP(G): feet pairs for W, one CFI gadget per v ∈ V sharing the feet."""
    labels, colors = [], []
    a, b, mid = {}, {}, {}
    for w in g.W:
        for side, table in (("a", a), ("b", b)):
            table[w] = len(labels)
            labels.append(f"{side}_{w}")
            colors.append(f"foot:{w}")
    edges = []
    for v in g.V:
        N = g.neighbors(v)
        _guard_degree(len(N))
        for S in even_subsets(N):
            m = mid[(v, S)] = len(labels)
            labels.append(f"m^{v}_" + "{" + ",".join(map(str, sorted(S))) + "}")
            colors.append(f"m:{v}")
            for w in N:
                edges.append((m, (a if w in S else b)[w]))
    return MultipedeInstance(g, ColoredGraph.build(len(labels), edges, colors, labels), a, b, mid)


# ---------------------------------------------------------------------------
# Isomorphism formula


def compatible(g1: ColoredGraph, g2: ColoredGraph) -> dict[int, list[int]]:
    by_color: dict[str, list[int]] = {}
    for v in range(g2.n):
        by_color.setdefault(g2.colors[v], []).append(v)
    return {u: by_color.get(g1.colors[u], []) for u in range(g1.n)}


def encode_iso(g1: ColoredGraph, g2: ColoredGraph) -> CnfFormula:
    """F(G1,G2) = T1 ∧ T2 ∧ T3 over the color-compatible variables x_{u,v}."""
    if g1.n != g2.n:
        raise SizeMismatch(f"{g1.n} vs {g2.n} vertices")
    comp = compatible(g1, g2)
    variables = [IsoVar(u, v) for u in range(g1.n) for v in comp[u]]
    clauses = set()
    for u in range(g1.n):
        clauses.add(frozenset(pos(IsoVar(u, v)) for v in comp[u]))
    pre: dict[int, list[int]] = {}
    for u in range(g1.n):
        for v in comp[u]:
            pre.setdefault(v, []).append(u)
    for v, us in pre.items():
        for u1, u2 in itertools.combinations(us, 2):
            clauses.add(frozenset((neg(IsoVar(u1, v)), neg(IsoVar(u2, v)))))
    adj1, adj2 = g1.adjacency(), g2.adjacency()
    for u1, v1 in itertools.combinations(range(g1.n), 2):
        e1 = adj1[u1, v1]
        for u2 in comp[u1]:
            for v2 in comp[v1]:
                if u2 != v2 and e1 != adj2[u2, v2]:
                    clauses.add(frozenset((neg(IsoVar(u1, u2)), neg(IsoVar(v1, v2)))))
    return CnfFormula.from_clauses(clauses, extra_vars=variables)


# ---------------------------------------------------------------------------
# Text formats


def emit_graph(g: ColoredGraph) -> str:
    lines = [f"graph {g.n}"]
    lines += [f"e {u} {v}" for u, v in sorted(g.edges)]
    lines += [f"c {v} {g.colors[v]}" for v in range(g.n)]
    return "\n".join(lines) + "\n"


def emit_bipartite(g: BipartiteGraph) -> str:
    n = len(g.V) + len(g.W)
    lines = [f"graph {n}"]
    lines += [f"part v {v}" for v in g.V] + [f"part w {w}" for w in g.W]
    lines += [f"e {v} {w}" for v, w in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def _parse(text: str):
    n = None
    edges, colors, parts = [], {}, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        try:
            if toks[0] == "graph" and len(toks) == 2:
                if n is not None:
                    raise GraphFormatError(f"line {lineno}: second header")
                n = int(toks[1])
            elif n is None:
                raise GraphFormatError(f"line {lineno}: content before 'graph' header")
            elif toks[0] == "e" and len(toks) == 3:
                edges.append((int(toks[1]), int(toks[2])))
            elif toks[0] == "c" and len(toks) == 3:
                colors[int(toks[1])] = toks[2]
            elif toks[0] == "part" and len(toks) == 3 and toks[1] in ("v", "w"):
                parts[int(toks[2])] = toks[1]
            else:
                raise GraphFormatError(f"line {lineno}: cannot parse {line!r}")
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {line!r}") from None
    if n is None:
        raise GraphFormatError("missing 'graph <n>' header")
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphFormatError(f"edge {(u, v)} out of range")
    return n, edges, colors, parts


def parse_graph(text: str) -> ColoredGraph:
    n, edges, colors, _ = _parse(text)
    return ColoredGraph.build(n, edges, [colors.get(v, "0") for v in range(n)])


def parse_base(text: str) -> BaseGraph:
    n, edges, _, _ = _parse(text)
    return BaseGraph.build(n, edges)


def parse_bipartite(text: str) -> BipartiteGraph:
    n, edges, _, parts = _parse(text)
    if set(parts) != set(range(n)):
        raise GraphFormatError("every vertex needs a 'part v|w' line")
    V = [x for x, s in parts.items() if s == "v"]
    W = [x for x, s in parts.items() if s == "w"]
    return BipartiteGraph.build(V, W, edges)


def base_from_spec(spec: str) -> BaseGraph:
    """``path:N``, ``cycle:N`` or ``complete:N``; anything else is a file path."""
    kind, sep, arg = spec.partition(":")
    if sep and kind in ("path", "cycle", "complete"):
        try:
            n = int(arg)
        except ValueError:
            raise GraphFormatError(f"bad size in {spec!r}") from None
        return {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph}[kind](n)
    with open(spec) as fh:
        return parse_base(fh.read())
