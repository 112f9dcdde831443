"""Command-line front end: ``symres gen|prove|check|stats|oracle``."""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import oracle
from .checker import RESOLUTION, SRC1, SRC2, ancestry_sizes, check
from .cnf import CnfFormula, emit_dimacs, parse_dimacs
from .graph_prove import cfi_budget, individualized_pair, multipede_bound, refute_cfi, refute_multipede
from .graphs import (
    BaseGraph,
    cfi_pair,
    emit_graph,
    encode_iso,
    multipede,
    parse_bipartite,
    parse_graph,
    base_from_spec,
)
from .lineq import encode_system, random_system
from .lineq_prove import LINEQ_C, lineq_bound, refute_system
from .linalg import SystemConsistent, emit_lin, parse_lin
from .trace import Derivation, emit_trace, parse_trace

EXIT_OK, EXIT_INVALID, EXIT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _write(path: str | Path, text: str) -> None:
    Path(path).write_text(text)
    print(f"wrote {path}")


def _twist(spec: str, base: BaseGraph):
    if "-" in spec:
        u, _, v = spec.partition("-")
        try:
            return (int(u), int(v))
        except ValueError:
            raise UsageError(f"bad edge {spec!r}") from None
    try:
        return int(spec)
    except ValueError:
        raise UsageError(f"bad edge {spec!r}; use an index or u-v") from None


def _fmt_bound(x: float) -> str:
    return f"{x:.6g}"


# ---------------------------------------------------------------------------
# gen


def cmd_gen(args) -> int:
    out = args.out
    if args.kind == "lineq":
        rng = random.Random(args.seed)
        system = random_system(rng, args.p, args.m, args.n, args.width, inconsistent=args.inconsistent)
        _write(f"{out}.lin", emit_lin(system))
        _write(f"{out}.cnf", emit_dimacs(encode_system(system)))
    elif args.kind == "cfi":
        base = base_from_spec(args.base)
        X, Xt = cfi_pair(base, _twist(args.twist, base))
        _write(f"{out}.x.graph", emit_graph(X.graph))
        _write(f"{out}.xt.graph", emit_graph(Xt.graph))
        _write(f"{out}.cnf", emit_dimacs(encode_iso(X.graph, Xt.graph)))
    else:
        g = parse_bipartite(_read(args.base))
        if args.foot not in g.W:
            raise UsageError(f"{args.foot} is not a vertex of W")
        _, G1, G2 = individualized_pair(g, args.foot)
        _write(f"{out}.g1.graph", emit_graph(G1))
        _write(f"{out}.g2.graph", emit_graph(G2))
        _write(f"{out}.cnf", emit_dimacs(encode_iso(G1, G2)))
    return EXIT_OK


# ---------------------------------------------------------------------------
# prove


def _emit_proof(d: Derivation, formula: CnfFormula, out: str, bound_label: str, bound: float) -> None:
    Path(out).write_text(emit_trace(d, formula))
    counts = d.count_kinds()
    print(f"length {len(d)}")
    print(f"{bound_label} {_fmt_bound(bound)}")
    print("steps " + " ".join(f"{k}={counts[k]}" for k in sorted(counts)))
    print(f"wrote {out}")


def cmd_prove(args) -> int:
    if args.kind == "lineq":
        if not args.input:
            raise UsageError("prove lineq needs a linear-system file")
        system = parse_lin(_read(args.input))
        proof = refute_system(system)
        label = f"bound(C={LINEQ_C:g}·p^(L+1)·m^λ)"
        _emit_proof(proof.derivation, proof.derivation.formula, args.output, label, proof.bound)
    elif args.kind == "cfi":
        if not args.base:
            raise UsageError("prove cfi needs --base")
        base = base_from_spec(args.base)
        proof = refute_cfi(base, _twist(args.twist, base))
        _emit_proof(proof.derivation, proof.formula, args.output, "budget(6(|E|+Φ₄))", proof.budget)
    else:
        if not args.base or args.foot is None:
            raise UsageError("prove multipede needs --base and --foot")
        g = parse_bipartite(_read(args.base))
        proof = refute_multipede(g, args.foot)
        _emit_proof(proof.derivation, proof.formula, args.output, "bound(c·(m·2^(L+1)+|F₁|))", proof.bound)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check / stats


def cmd_check(args) -> int:
    formula = parse_dimacs(_read(args.cnf))
    trace = parse_trace(_read(args.trace), formula)
    report = check(formula, trace, mode=args.mode, strict=args.strict, replay=args.replay)
    print(report)
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_stats(args) -> int:
    formula = parse_dimacs(_read(args.cnf)) if args.cnf else None
    trace = parse_trace(_read(args.trace), formula)
    counts = trace.count_kinds()
    print(f"{'kind':<16} count")
    for k in sorted(counts):
        print(f"{k:<16} {counts[k]}")
    scopes = ancestry_sizes(trace, formula)
    if scopes:
        vals = sorted(scopes.values())
        print(f"symmetry scopes: n={len(vals)} min={vals[0]} median={vals[len(vals) // 2]} max={vals[-1]}")
    else:
        print("symmetry scopes: none")
    rows = [("length", str(len(trace)))]
    if formula is not None:
        rows.append(("|F|", str(len(formula))))
        rows.append(("length/|F|", f"{len(trace) / max(len(formula), 1):.4g}"))
    if args.lin:
        s = parse_lin(_read(args.lin))
        rows.append(("lineq bound", _fmt_bound(lineq_bound(s.p, s.width, s.m))))
    if args.cfi:
        rows.append(("cfi budget", str(cfi_budget(base_from_spec(args.cfi)))))
    if args.multipede:
        g = parse_bipartite(_read(args.multipede))
        mp = multipede(g)
        rows.append(("multipede bound", _fmt_bound(multipede_bound(g, len(encode_iso(mp.graph, mp.graph))))))
    for bound_row in rows[1:]:
        if "bound" in bound_row[0] or "budget" in bound_row[0]:
            rows.append(("length/" + bound_row[0].split()[-1], f"{len(trace) / float(bound_row[1]):.4g}"))
    width = max(len(r[0]) for r in rows)
    print(f"{'quantity':<{width}}  value")
    for name, val in rows:
        print(f"{name:<{width}}  {val}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle


def cmd_oracle(args) -> int:
    if args.kind == "sat":
        f = parse_dimacs(_read(args.inputs[0]))
        res = oracle.sat_bruteforce(f)
        if res.satisfiable:
            print("s SATISFIABLE")
            lits = [f.symbols[v] if val else -f.symbols[v] for v, val in res.model.items()]
            print("v " + " ".join(str(x) for x in sorted(lits, key=abs)) + " 0")
        else:
            print("s UNSATISFIABLE")
    elif args.kind == "iso":
        if len(args.inputs) != 2:
            raise UsageError("oracle iso needs two graph files")
        g1, g2 = (parse_graph(_read(p)) for p in args.inputs)
        found = oracle.iso_bruteforce(g1, g2, limit=1, cap=args.cap or oracle.ISO_MAX_VERTICES)
        if found:
            print("isomorphic")
            print("map " + " ".join(str(x) for x in found[0]))
        else:
            print("not isomorphic")
    elif args.kind == "aut":
        g = parse_graph(_read(args.inputs[0]))
        auts = oracle.automorphisms_bruteforce(g, cap=args.cap or oracle.AUT_MAX_VERTICES)
        print(f"automorphisms {len(auts)}")
    else:
        s = parse_lin(_read(args.inputs[0]))
        sols = oracle.lin_bruteforce(s)
        if sols:
            print("consistent")
            print("x " + " ".join(str(int(t)) for t in sols[0]))
        else:
            print("inconsistent")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="symres", description="Resolution with symmetry rules: generate, prove, check.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance and its CNF")
    g.add_argument("kind", choices=["lineq", "cfi", "multipede"])
    g.add_argument("--p", type=int, default=2)
    g.add_argument("--m", type=int, default=4)
    g.add_argument("--n", type=int, default=4)
    g.add_argument("--width", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--inconsistent", action="store_true")
    g.add_argument("--base", help="graph spec (path:N, cycle:N, complete:N or file)")
    g.add_argument("--twist", default="0", help="edge index or u-v")
    g.add_argument("--foot", type=int)
    g.add_argument("--out", help="output prefix (default: the kind)")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("prove", help="write a refutation trace")
    p.add_argument("kind", choices=["lineq", "cfi", "multipede"])
    p.add_argument("input", nargs="?", help="linear-system file for lineq")
    p.add_argument("--base")
    p.add_argument("--twist", default="0")
    p.add_argument("--foot", type=int)
    p.add_argument("-o", "--output", default="trace.srt")
    p.set_defaults(func=cmd_prove)

    c = sub.add_parser("check", help="validate a trace")
    c.add_argument("cnf")
    c.add_argument("trace")
    c.add_argument("--mode", default="src2", choices=["res", "src1", "src2", RESOLUTION, SRC1, SRC2])
    c.add_argument("--strict", action="store_true")
    c.add_argument("--replay", action="store_true")
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("stats", help="summarize a trace")
    s.add_argument("trace")
    s.add_argument("--cnf")
    s.add_argument("--lin", help="linear system for the lineq bound")
    s.add_argument("--cfi", help="base graph spec for the CFI budget")
    s.add_argument("--multipede", help="bipartite base file for the multipede bound")
    s.set_defaults(func=cmd_stats)

    o = sub.add_parser("oracle", help="brute-force ground truth")
    o.add_argument("kind", choices=["sat", "iso", "aut", "lin"])
    o.add_argument("inputs", nargs="+")
    o.add_argument("--cap", type=int, help="vertex cap for iso/aut (defaults 10/12)")
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    if getattr(args, "out", None) is None and args.command == "gen":
        args.out = args.kind
    try:
        return args.func(args)
    except SystemConsistent:
        print("error: system consistent")
    except OSError as exc:
        print(f"error: {exc.strerror}: {exc.filename}")
    except (ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
