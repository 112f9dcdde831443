"""SRC-I refutations for CFI pairs and SRC-II refutations for multipedes.

Notation follows the variable aliases used in the comments:
``y_{c,d}`` is ``x_{c,d}`` for a/b (or foot) vertices and ``z^v_{S,T}`` is
``x_{m^v_S, m^v_T}`` for middle vertices of gadget ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import CnfFormula, IsoVar, Literal, Renaming, neg, pos
from .graphs import (
    BaseGraph,
    BipartiteGraph,
    CfiInstance,
    Disconnected,
    GraphError,
    MultipedeInstance,
    NoEdge,
    _guard_degree,
    cfi_pair,
    encode_iso,
    even_subsets,
    individualize,
    multipede,
    odd_subsets,
)
from .linalg import inconsistency_certificate, kernel_basis, solve
from .lineq_prove import ProofContext, derive_sum_clauses
from .trace import GLOBAL, Derivation, DerivationBuilder


class NotACycle(GraphError):
    pass


class HasAutomorphisms(GraphError):
    def __init__(self, msg: str, witness: np.ndarray | None = None):
        super().__init__(msg)
        self.witness = witness


class NotInKernel(ValueError):
    pass


def _resolve_if(b: DerivationBuilder, left: int, right: int, var) -> int:
    """Resolve on ``var`` unless a premise already lacks its literal (then keep that premise)."""
    cl, cr = b.clause(left), b.clause(right)
    p, n = Literal(var, True), Literal(var, False)
    if p in cl and n in cr or n in cl and p in cr:
        return b.resolve(left, right, var)
    # One premise is already stronger than the intended resolvent.
    return left if (p not in cl and n not in cl) else right


# ---------------------------------------------------------------------------
# CFI


def cfi_budget(base: BaseGraph) -> int:
    """6 (|E| + Φ₄(G))."""
    return 6 * (len(base.edges) + base.phi4())


def _find_cycle(edges: list[tuple[int, int]]) -> list[tuple[int, int]] | None:
    """Edges of the first simple cycle met by a DFS (lowest vertex first, sorted neighbors)."""
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    for x in adj:
        adj[x].sort()
    seen: set[int] = set()
    for root in sorted(adj):
        if root in seen:
            continue
        parent = {root: None}
        stack = [(root, iter(adj[root]))]
        seen.add(root)
        while stack:
            x, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                stack.pop()
                continue
            if nxt == parent[x]:
                continue
            if nxt in parent:
                # back edge closes a cycle x -> ... -> nxt
                cyc = [x]
                while cyc[-1] != nxt:
                    cyc.append(parent[cyc[-1]])
                return [tuple(sorted((cyc[i], cyc[(i + 1) % len(cyc)]))) for i in range(len(cyc))]
            parent[nxt] = x
            seen.add(nxt)
            stack.append((nxt, iter(adj[nxt])))
    return None


def cycle_automorphism(inst: CfiInstance, cycle: list[tuple[int, int]], formula: CnfFormula | None = None) -> Renaming:
    """The formula symmetry induced by swapping every a/b pair along ``cycle``.

    The underlying automorphism φ of X(G) exchanges a^x_f and b^x_f for both
    cycle edges f at every cycle vertex x and sends m^x_S to m^x_{S △ {f1,f2}}.
    It acts on the first index of every variable x_{s,t}.
    """
    base = inst.base
    cyc_edges = {tuple(sorted(e)) for e in cycle}
    at: dict[int, list] = {}
    for e in cyc_edges:
        if e not in base.edges:
            raise NotACycle(f"{e} is not a base edge")
        for x in e:
            at.setdefault(x, []).append(e)
    if len(cyc_edges) < 3 or any(len(es) != 2 for es in at.values()):
        raise NotACycle("edges do not form a simple cycle")
    if len(base.component(next(iter(at)), cyc_edges)) != len(at):
        raise NotACycle("edges form several cycles")
    phi = {}
    for x, es in at.items():
        swap = frozenset(es)
        for e in es:
            phi[inst.a[(x, e)]] = inst.b[(x, e)]
            phi[inst.b[(x, e)]] = inst.a[(x, e)]
        for S in even_subsets(base.incident(x)):
            phi[inst.mid[(x, S)]] = inst.mid[(x, S ^ swap)]
    g = inst.graph
    assert {tuple(sorted((phi.get(u, u), phi.get(v, v)))) for u, v in g.edges} == set(g.edges)
    var_map = {}
    compat = _compat_targets(inst)
    for s, t_s in phi.items():
        for t in compat[s]:
            var_map[IsoVar(s, t)] = pos(IsoVar(t_s, t))
    sigma = Renaming.from_var_map(var_map)
    if formula is not None and not formula.stabilized_by(sigma):
        raise AssertionError("cycle symmetry does not stabilize the formula")
    return sigma


def _compat_targets(inst: CfiInstance) -> dict[int, list[int]]:
    g = inst.graph
    by_color: dict[str, list[int]] = {}
    for v in range(g.n):
        by_color.setdefault(g.colors[v], []).append(v)
    return {u: by_color[g.colors[u]] for u in range(g.n)}


@dataclass
class CfiProof:
    derivation: Derivation
    formula: CnfFormula
    budget: int
    plan: list  # ("base", e) | ("tree", u, e) | ("cycle", cycle, e)


class _CfiProver:
    def __init__(self, X: CfiInstance, Xt: CfiInstance, formula: CnfFormula):
        self.X, self.Xt, self.F = X, Xt, formula
        self.base = X.base
        self.twist = Xt.twist
        self.b = DerivationBuilder(formula)
        self.plan: list = []
        self.t1: dict[tuple, int] = {}

    def ax(self, *lits) -> int:
        c = frozenset(lits)
        assert c in self.F.clauses, f"expected axiom {sorted(c)}"
        return self.b.axiom(c)

    # variable helpers ------------------------------------------------------
    def y(self, s: int, t: int) -> IsoVar:
        return IsoVar(s, t)

    def z(self, v: int, S: frozenset, T: frozenset) -> IsoVar:
        return IsoVar(self.X.mid[(v, S)], self.X.mid[(v, T)])

    # ----------------------------------------------------------------------
    def run(self, edges: list[tuple[int, int]]) -> int:
        verts = {x for e in edges for x in e}
        for v in sorted(verts):
            inc = self.base.incident(v)
            for S in even_subsets(inc):
                self.t1[(v, S)] = self.ax(*(pos(self.z(v, S, T)) for T in even_subsets(inc)))
        return self.refute(sorted(edges))

    def current_subsets(self, v: int, edges) -> list[frozenset]:
        return even_subsets([e for e in edges if v in e])

    def refute(self, edges: list[tuple[int, int]]) -> int:
        if len(edges) == 1:
            return self.base_case(edges[0])
        cycle = _find_cycle(edges)
        if cycle is None:
            return self.tree_case(edges)
        return self.cycle_case(edges, cycle)

    def base_case(self, e) -> int:
        assert e == self.twist, "recursion must end at the twisted edge"
        self.plan.append(("base", e))
        u, v = e
        X, b = self.X, self.b
        au, bu, av, bv = X.a[(u, e)], X.b[(u, e)], X.a[(v, e)], X.b[(v, e)]
        E0 = frozenset()
        zu, zv = self.z(u, E0, E0), self.z(v, E0, E0)
        s = _resolve_if(b, self.t1[(u, E0)], self.ax(neg(zu), neg(self.y(bu, au))), zu)
        s = _resolve_if(b, s, self.ax(pos(self.y(bu, au)), pos(self.y(bu, bu))), self.y(bu, au))
        s = _resolve_if(b, s, self.ax(neg(self.y(bu, bu)), neg(self.y(av, av))), self.y(bu, bu))
        s = _resolve_if(b, s, self.ax(pos(self.y(av, av)), pos(self.y(av, bv))), self.y(av, av))
        s = _resolve_if(b, s, self.ax(neg(zv), neg(self.y(av, bv))), self.y(av, bv))
        return _resolve_if(b, s, self.t1[(v, E0)], zv)

    def _strip(self, v: int, e, edges, unit_of) -> None:
        """Cut every z^v_{S,S'} with e ∉ S, e ∈ S' from the current Type-1 clauses."""
        subsets = self.current_subsets(v, edges)
        for S in subsets:
            if e in S:
                continue
            cur = self.t1[(v, S)]
            for T in subsets:
                if e in T:
                    cur = _resolve_if(self.b, cur, unit_of(S, T), self.z(v, S, T))
            self.t1[(v, S)] = cur
        for S in subsets:
            if e in S:
                del self.t1[(v, S)]

    def tree_case(self, edges) -> int:
        deg: dict[int, list] = {}
        for e in edges:
            for x in e:
                deg.setdefault(x, []).append(e)
        u = min(x for x, es in deg.items() if len(es) == 1 and es[0] != self.twist)
        (e,) = deg[u]
        v = e[0] if e[1] == u else e[1]
        self.plan.append(("tree", u, e))
        X, b = self.X, self.b
        au, bu, av, bv = X.a[(u, e)], X.b[(u, e)], X.a[(v, e)], X.b[(v, e)]
        E0 = frozenset()
        zu = self.z(u, E0, E0)
        s = _resolve_if(b, self.t1[(u, E0)], self.ax(neg(zu), neg(self.y(au, bu))), zu)
        s = _resolve_if(b, s, self.ax(pos(self.y(au, au)), pos(self.y(au, bu))), self.y(au, bu))
        s = _resolve_if(b, s, self.ax(neg(self.y(au, au)), neg(self.y(av, bv))), self.y(au, au))
        s = _resolve_if(b, s, self.ax(pos(self.y(av, av)), pos(self.y(av, bv))), self.y(av, bv))
        units = {}

        def unit_of(S, T):
            if (S, T) not in units:
                t3 = self.ax(neg(self.z(v, S, T)), neg(self.y(av, av)))
                units[(S, T)] = _resolve_if(b, s, t3, self.y(av, av))
            return units[(S, T)]

        self._strip(v, e, edges, unit_of)
        del self.t1[(u, E0)]
        return self.refute([f for f in edges if f != e])

    def cycle_case(self, edges, cycle) -> int:
        e = min((f for f in cycle if f != self.twist), key=self.base.edge_index)
        u, v = e
        self.plan.append(("cycle", cycle, e))
        X, b = self.X, self.b
        au, bu, av, bv = X.a[(u, e)], X.b[(u, e)], X.a[(v, e)], X.b[(v, e)]
        yaa = self.y(au, au)
        c1 = _resolve_if(
            b,
            self.ax(neg(yaa), neg(self.y(av, bv))),
            self.ax(pos(self.y(av, av)), pos(self.y(av, bv))),
            self.y(av, bv),
        )
        for mu, a_mu in ((u, au), (v, av)):
            units = {}

            def unit_of(S, T, mu=mu, a_mu=a_mu, units=units):
                if (S, T) not in units:
                    t3 = self.ax(neg(self.z(mu, S, T)), neg(self.y(a_mu, a_mu)))
                    # For μ = u the Type-3 clause already carries ¬y_{a^u,a^u}.
                    units[(S, T)] = t3 if mu == u else _resolve_if(b, c1, t3, self.y(av, av))
                return units[(S, T)]

            # derive all units for v first, matching the step order of the argument
            if mu == v:
                for S in self.current_subsets(v, edges):
                    for T in self.current_subsets(v, edges):
                        if e not in S and e in T:
                            unit_of(S, T)
            self._strip(mu, e, edges, unit_of)
        rest = [f for f in edges if f != e]
        prev = self.refute(rest)  # ⊆ {¬y_{a^u_e,a^u_e}} ∪ extras
        sigma = cycle_automorphism(X, cycle)
        assert sigma(pos(yaa)) == pos(self.y(bu, au))
        sym = b.symmetry(prev, sigma, GLOBAL)  # ⊆ {¬y_{b^u_e,a^u_e}} ∪ extras
        ybb, yab, yba = self.y(bu, bu), self.y(au, bu), self.y(bu, au)
        r = _resolve_if(b, self.ax(pos(yaa), pos(yab)), self.ax(neg(yab), neg(ybb)), yab)
        r = _resolve_if(b, r, self.ax(pos(yba), pos(ybb)), ybb)
        r = _resolve_if(b, r, sym, yba)
        return _resolve_if(b, r, prev, yaa)


def refute_cfi(base: BaseGraph, twist: tuple[int, int] | int = 0) -> CfiProof:
    """SRC-I refutation of F(X(G), X̃(G)) within 6(|E| + Φ₄(G)) steps."""
    if not base.edges:
        raise NoEdge("the base graph has no edge")
    for v in range(base.n):
        _guard_degree(base.degree(v))
    X, Xt = cfi_pair(base, twist)
    e = Xt.twist
    comp = base.component(e[0])
    edges = [f for f in base.edges if f[0] in comp]
    if not edges or e not in edges:
        raise Disconnected("twisted edge is not in a component")
    F = encode_iso(X.graph, Xt.graph)
    prover = _CfiProver(X, Xt, F)
    bottom = prover.run(edges)
    assert not prover.b.clause(bottom)
    return CfiProof(prover.b.build(), F, cfi_budget(base), prover.plan)


# ---------------------------------------------------------------------------
# Multipedes


def lift_symmetry(mp: MultipedeInstance, d, rows=None, formula: CnfFormula | None = None) -> Renaming:
    """ψ_d: act on the second index of x_{s,t} by swapping feet in D and T ↦ T △ D on gadgets.

    Gadgets meeting D in an odd number of feet are left untouched.  With
    ``rows`` given, ``M[rows]·d = 0`` is required; with ``formula`` the
    variables are restricted to those of that formula.
    """
    g = mp.base
    d = np.asarray(d, dtype=np.int64) % 2
    M = g.matrix()
    check_rows = range(len(g.V)) if rows is None else rows
    for i in check_rows:
        if int(M[i] @ d) % 2:
            raise NotInKernel(f"row {g.V[i]} is violated by d")
    D = {w for j, w in enumerate(g.W) if d[j]}
    pi: dict[int, int] = {}
    for w in D:
        pi[mp.a[w]], pi[mp.b[w]] = mp.b[w], mp.a[w]
    for (v, S), m in mp.mid.items():
        local = D & set(g.neighbors(v))
        if len(local) % 2 == 0 and local:
            pi[m] = mp.mid[(v, S ^ frozenset(local))]
    graph = mp.graph
    by_color: dict[str, list[int]] = {}
    for s in range(graph.n):
        by_color.setdefault(graph.colors[s], []).append(s)
    var_map = {}
    for t, t2 in pi.items():
        for s in by_color[graph.colors[t]]:
            var = IsoVar(s, t)
            if formula is None or var in formula.symbols:
                var_map[var] = pos(IsoVar(s, t2))
    return Renaming.from_var_map(var_map)


def choose_gamma(N: list[int], B: frozenset) -> dict[frozenset, int]:
    """γ: even subsets of N → N with γ(S) ∈ S △ B, surjective onto N.

    Every foot is first matched to a distinct subset (augmenting paths);
    unmatched subsets take min(S △ B).
    """
    subsets = even_subsets(N)
    options = {w: [S for S in subsets if w in (S ^ B)] for w in N}
    owner: dict[frozenset, int] = {}

    def augment(w, seen) -> bool:
        for S in options[w]:
            if S in seen:
                continue
            seen.add(S)
            if S not in owner or augment(owner[S], seen):
                owner[S] = w
                return True
        return False

    for w in N:
        augment(w, set())
    return {S: owner.get(S, min(S ^ B)) for S in subsets}


class _Bridge:
    """Derives r(C_{M_v}(x_B)) inside the multipede formula, one gadget at a time."""

    def __init__(self, mp: MultipedeInstance, builder: DerivationBuilder, F: CnfFormula):
        self.mp, self.b, self.F = mp, builder, F
        self.memo: dict[tuple, int] = {}
        self.steps = 0

    def ax(self, c) -> int:
        c = frozenset(c)
        assert c in self.F.clauses, f"expected axiom {sorted(c)}"
        return self.b.axiom(c)

    def clause(self, v: int, B: frozenset) -> int:
        key = (v, B)
        if key in self.memo:
            return self.memo[key]
        mp = self.mp
        N = mp.base.neighbors(v)
        E0 = frozenset()
        m0 = mp.mid[(v, E0)]
        subsets = even_subsets(N)
        gamma = choose_gamma(N, B)
        cur = self.ax(pos(IsoVar(m0, mp.mid[(v, S)])) for S in subsets)
        before = len(self.b)
        for S in subsets:
            zv = IsoVar(m0, mp.mid[(v, S)])
            w = gamma[S]
            other = IsoVar(mp.a[w], mp.b[w]) if w in B else IsoVar(mp.a[w], mp.a[w])
            cur = _resolve_if(self.b, cur, self.ax([neg(zv), neg(other)]), zv)
        self.steps += sum(1 for s in self.b.steps[before:] if not s.is_axiom)
        self.memo[key] = cur
        return cur


def bridge_to_linear(g: BipartiteGraph) -> tuple[Derivation, dict]:
    """Derive r(F(M(G),0)) from F₁ = F(MP(G), MP(G)).

    Returns the derivation and a map (v, B) ↦ step id for every gadget v and
    odd B ⊆ N(v).
    """
    mp = multipede(g)
    F1 = encode_iso(mp.graph, mp.graph)
    b = DerivationBuilder(F1)
    br = _Bridge(mp, b, F1)
    ids = {(v, B): br.clause(v, B) for v in g.V for B in odd_subsets(g.neighbors(v))}
    return b.build(), ids


def bridge_bound(g: BipartiteGraph) -> int:
    return sum(2 ** (len(g.neighbors(v)) - 1) * 2 ** len(g.neighbors(v)) for v in g.V)


def foot_namer(mp: MultipedeInstance):
    """r: ξ_{j,0} ↦ y_{a_w,a_w}, ξ_{j,1} ↦ y_{a_w,b_w} for the j-th foot w."""
    W = mp.base.W

    def namer(j: int, k: int) -> IsoVar:
        w = W[j]
        return IsoVar(mp.a[w], mp.a[w] if k == 0 else mp.b[w])

    return namer


@dataclass
class MultipedeProof:
    derivation: Derivation
    formula: CnfFormula
    foot: int
    bound: float
    bridge_steps: int


MULTIPEDE_C = 1.0


def multipede_bound(g: BipartiteGraph, f1_size: int, c: float = MULTIPEDE_C) -> float:
    """c · (m · 2^(L+1) + |F₁|)."""
    L = max((len(g.neighbors(v)) for v in g.V), default=0)
    return c * (len(g.V) * 2 ** (L + 1) + f1_size)


def _require_trivial_kernel(g: BipartiteGraph) -> None:
    K = kernel_basis(g.matrix(), 2)
    if len(K):
        raise HasAutomorphisms("ker M(G) is nontrivial, so MP(G) has automorphisms", K[0])


def individualized_pair(g: BipartiteGraph, foot: int):
    mp = multipede(g)
    G1 = individualize(mp.graph, mp.a[foot])
    G2 = individualize(mp.graph, mp.b[foot])
    return mp, G1, G2


def refute_multipede(g: BipartiteGraph, foot: int) -> MultipedeProof:
    """SRC-II refutation of F₀ = F(MP(G)_{a_ω}, MP(G)_{b_ω}).

    The system M(G) y = 0 with y_ω = 1 is inconsistent when ker M(G) = 0.
    With column ω moved to the right-hand side it is refuted by the linear
    prover; its row clauses are bridged from gadget clauses of F₀ (feet sets
    B ∋ ω are closed with the unit Type-1 clause {y_{a_ω,b_ω}}), and its
    translations are lifted to ψ_d with d_ω = 0.
    """
    if foot not in g.W:
        raise GraphError(f"{foot} is not a vertex of W")
    if not g.is_connected():
        raise Disconnected("the bipartite base graph is not connected")
    _require_trivial_kernel(g)
    mp, G1, G2 = individualized_pair(g, foot)
    F0 = encode_iso(G1, G2)
    b = DerivationBuilder(F0)
    M = g.matrix()
    k = g.W.index(foot)
    M0 = M.copy()
    M0[:, k] = 0
    rhs = M[:, k] % 2
    row_of = {}
    for i, v in enumerate(g.V):
        row_of.setdefault((tuple(int(t) for t in M0[i]), int(rhs[i])), v)
    bridge = _Bridge(mp, b, F0)
    a_w, b_w = mp.a[foot], mp.b[foot]
    unit = None
    namer = foot_namer(mp)

    def row_hook(a, rb, x):
        v = row_of[(tuple(int(t) for t in a), int(rb) % 2)]
        B = {w for j, w in enumerate(g.W) if j != k and a[j] and x[j]}
        if M[g.V.index(v), k]:
            B.add(foot)
        cid = bridge.clause(v, frozenset(B))
        if foot in B:
            nonlocal unit
            if unit is None:
                unit = bridge.ax([pos(IsoVar(a_w, b_w))])
            cid = _resolve_if(b, cid, unit, IsoVar(a_w, b_w))
        return cid

    def lift(d):
        d = np.asarray(d, dtype=np.int64) % 2
        d[k] = 0
        return lift_symmetry(mp, d, rows=[], formula=F0)

    ctx = ProofContext(b, 2, len(g.W), namer=namer, lift=lift, row_hook=row_hook)
    v = inconsistency_certificate(M0, rhs, 2)
    rows = [i for i in range(len(g.V)) if v[i]]
    ids = derive_sum_clauses(ctx, M0[rows], rhs[rows], [np.zeros(len(g.W), dtype=np.int64)])
    (bottom,) = ids.values()
    assert not b.clause(bottom)
    F1_size = len(encode_iso(mp.graph, mp.graph))
    return MultipedeProof(b.build(), F0, foot, multipede_bound(g, F1_size), bridge.steps)


def derive_f1_unit(g: BipartiteGraph, foot: int) -> tuple[Derivation, CnfFormula]:
    """SRC-II derivation of {y_{a_ω,a_ω}} from F₁ = F(MP(G), MP(G)).

    Rows are combined with u, u·M(G) = e_ω, so the summed row asserts y_ω = 0;
    the derived unit {¬y_{a_ω,b_ω}} is resolved with the Type-1 foot clause.
    """
    if foot not in g.W:
        raise GraphError(f"{foot} is not a vertex of W")
    mp = multipede(g)
    F1 = encode_iso(mp.graph, mp.graph)
    b = DerivationBuilder(F1)
    M = g.matrix()
    k = g.W.index(foot)
    e = np.zeros(len(g.W), dtype=np.int64)
    e[k] = 1
    sol = solve(M.T, e, 2)
    if sol is None:
        raise HasAutomorphisms("y_ω is not determined by M(G) y = 0")
    u = sol.particular
    rows = [i for i in range(len(g.V)) if u[i]]
    bridge = _Bridge(mp, b, F1)
    row_of = {}
    for i, v in enumerate(g.V):
        row_of.setdefault(tuple(int(t) for t in M[i]), v)

    def row_hook(a, rb, x):
        v = row_of[tuple(int(t) for t in a)]
        return bridge.clause(v, frozenset(w for j, w in enumerate(g.W) if a[j] and x[j]))

    ctx = ProofContext(
        b, 2, len(g.W), namer=foot_namer(mp), lift=lambda d: lift_symmetry(mp, d, rows=[]), row_hook=row_hook
    )
    ids = derive_sum_clauses(ctx, M[rows], np.zeros(len(rows), dtype=np.int64), [e])
    (cid,) = ids.values()
    a_w, b_w = mp.a[foot], mp.b[foot]
    t1 = b.axiom(frozenset([pos(IsoVar(a_w, a_w)), pos(IsoVar(a_w, b_w))]))
    _resolve_if(b, cid, t1, IsoVar(a_w, b_w))
    return b.build(), F1


def restrict_trace(trace: Derivation, target: CnfFormula, killed: set) -> Derivation:
    """Substitute 0 for the ``killed`` variables and re-derive over ``target``.

    Clauses containing a negated killed variable become true and their steps
    are dropped; positive occurrences are deleted.  Resolutions with a dropped
    premise keep the surviving premise when it is already stronger, and
    symmetry steps are kept only if their renaming avoids the killed
    variables.  Raises ``ValueError`` when the substitution does not go through.
    """
    from .trace import Axiom, Resolve

    b = DerivationBuilder(target)
    ids: dict[int, int | None] = {}

    def shrink(c):
        if any(l.var in killed and not l.positive for l in c):
            return None
        return frozenset(l for l in c if l.var not in killed)

    for s in trace.steps:
        k = s.kind
        if isinstance(k, Axiom):
            c = shrink(s.clause)
            if c is None:
                ids[s.id] = None
            elif c in target.clauses:
                ids[s.id] = b.axiom(c)
            else:
                raise ValueError(f"restricted axiom {sorted(c)} is not in the target formula")
        elif isinstance(k, Resolve):
            l, r = ids[k.left], ids[k.right]
            if k.pivot in killed:
                keep = [i for i in (l, r) if i is not None]
                ids[s.id] = keep[0] if keep else None
            elif l is None or r is None:
                ids[s.id] = None
            else:
                ids[s.id] = _resolve_if(b, l, r, k.pivot)
        else:
            src = ids[k.source]
            if src is None:
                ids[s.id] = None
            elif k.sigma.moved_vars() & killed:
                raise ValueError("symmetry step moves a killed variable")
            else:
                ids[s.id] = b.symmetry(src, k.sigma, k.mode)
    return b.build()
