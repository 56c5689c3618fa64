"""Command-line interface: ``icprog <command> ...``.

Exit codes: 0 positive verdict, 1 negative verdict, 2 usage or parse error,
3 a bound was hit before a verdict could be reached.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import engine as E
from .analysis import analyze
from .bench import format_rows, run_benchmarks, summary
from .frontend import ParseError, load_program, parse_query
from .pretty import format_atom, format_query, format_substitution
from .semantics import GROUND, SYMBOLIC, FixpointBounds, compute_model, compute_partial_model, dump_model
from .terms import ContractError
from .termination import (
    LevelMapping,
    LevelUndefined,
    canonical_level_mapping,
    check_simply_acceptable,
    probe_termination,
)

OK, NEGATIVE, USAGE, TRUNCATED = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE, "%s: error: %s\n" % (self.prog, message))


def _int_pair(text: str) -> tuple:
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError("expected LO,HI") from e
    return (lo, hi)


def _constants(text: str) -> tuple:
    out = []
    for x in text.split(","):
        x = x.strip()
        if x:
            out.append(int(x) if x.lstrip("-").isdigit() else x)
    return tuple(out)


def _bounds(args) -> FixpointBounds:
    return FixpointBounds(
        max_iterations=args.iters,
        term_depth=args.depth,
        fresh_pool=args.pool,
        max_length=args.max_length,
        constants=args.constants,
        int_range=args.int_range,
    )


def _add_bounds(sp, iters=8, depth=2):
    sp.add_argument("--iters", type=int, default=iters, help="maximum operator iterations")
    sp.add_argument("--depth", type=int, default=depth, help="term depth of the universe")
    sp.add_argument("--pool", type=int, default=1, help="number of pool variables in the universe")
    sp.add_argument("--max-length", type=int, default=None, help="drop atoms needing longer derivations")
    sp.add_argument("--constants", type=_constants, default=(), help="extra constants, comma separated")
    sp.add_argument("--int-range", type=_int_pair, default=(0, 3), help="integer table for =< and >")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="icprog", description="Input-consuming resolution toolkit for moded logic programs.")
    ap.add_argument("--json", action="store_true", help="print one JSON document instead of text")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("check", help="static analysis report")
    sp.add_argument("file")

    sp = sub.add_parser("run", help="answers and derivation traces of a query")
    sp.add_argument("file")
    sp.add_argument("--query", required=True)
    sp.add_argument("--rule", choices=E.RULES, default=E.IC)
    sp.add_argument("--depth", type=int, default=6, help="maximum derivation length")
    sp.add_argument("--traces", type=int, default=20, help="maximum number of traces printed")
    sp.add_argument("--fuel", type=int, default=E.DEFAULT_FUEL)
    sp.add_argument("--int-range", type=_int_pair, default=E.DEFAULT_INT_RANGE)

    sp = sub.add_parser("tree", help="derivation tree and its node count")
    sp.add_argument("file")
    sp.add_argument("--query", required=True)
    sp.add_argument("--kind", choices=(E.IC, E.LIC, E.DELAY), default=E.LIC)
    sp.add_argument("--depth", type=int, default=10, help="depth bound of the tree")
    sp.add_argument("--fuel", type=int, default=E.DEFAULT_FUEL)
    sp.add_argument("--int-range", type=_int_pair, default=E.DEFAULT_INT_RANGE)

    sp = sub.add_parser("model", help="bounded simply-local model")
    sp.add_argument("file")
    sp.add_argument("--partial", action="store_true", help="seed with all simply-moded atoms")
    sp.add_argument("--ground", action="store_true", help="use explicit enumeration over the universe")
    _add_bounds(sp)

    sp = sub.add_parser("terminate", help="simply-acceptability check and termination probe")
    sp.add_argument("file")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--level", choices=("declared",), default="declared", help="use the declared level mapping")
    g.add_argument("--canonical", action="store_true", help="use LIC-tree node counts as levels")
    sp.add_argument("--probe-depth", type=int, default=64, help="derivation depth counted as evidence")
    sp.add_argument("--query-depth", type=int, default=None, help="term depth of probe queries (default --depth)")
    sp.add_argument("--predicate", action="append", default=None, help="probe only NAME/ARITY (repeatable)")
    sp.add_argument("--no-probe", action="store_true")
    _add_bounds(sp, iters=4)

    sp = sub.add_parser("bench", help="compare SM/IC/L verdicts with a table")
    sp.add_argument("dir", nargs="?", default=None, help="corpus directory (default: bundled corpus)")
    sp.add_argument("--expected", default=None, help="CSV name,moding,SM,IC,L[,status]")
    sp.add_argument("--workers", type=int, default=4)
    return ap


def _emit(args, doc: dict, text: str) -> None:
    if args.json:
        json.dump(doc, sys.stdout, indent=2, default=str)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


# -- commands -------------------------------------------------------------


def cmd_check(args) -> int:
    p = load_program(args.file)
    rep = analyze(p)
    sm, ic, l1 = rep.columns()
    lines = ["program: %s" % p.name, "SM: %s" % sm, "IC: %s" % ic, "L: %s" % l1]
    lines.append("simple delays: %s" % ("yes" if rep.simple_delays else "no"))
    for name, info in sorted(rep.predicates.items()):
        lines.append("  %s mode=%s controlled=%s dep=%d" % (name, info["mode"], info["controlled"], info["dep"]))
    lines += ["reason: " + r for r in rep.reasons]
    _emit(args, rep.to_dict(), "\n".join(lines))
    return OK if rep.sm and rep.ic else NEGATIVE


def cmd_run(args) -> int:
    p = load_program(args.file)
    q = parse_query(args.query, p)
    ans = E.answers(q, p, args.rule, args.depth, args.fuel, args.int_range)
    traces, truncated = [], ans.truncated
    for d in E.enumerate_derivations(q, p, args.rule, args.depth, args.fuel, int_range=args.int_range):
        if isinstance(d, E.Truncated):
            truncated = True
            break
        traces.append(d)
        if len(traces) >= args.traces:
            break
    succ = [format_substitution(s) for s in ans.success_substitutions()]
    part = [format_substitution(s) for s in ans.partial_substitutions()]
    statuses = sorted({d.status for d in traces})
    doc = {
        "query": format_query(q),
        "rule": args.rule,
        "depth": args.depth,
        "success": succ,
        "partial": part,
        "depth_cut": ans.depth_cut,
        "truncated": truncated,
        "leaf_statuses": statuses,
        "traces": [E.format_trace(d).split("\n") for d in traces],
    }
    lines = ["query: %s" % format_query(q), "rule: %s" % args.rule]
    lines.append("success answers (%d):" % len(succ))
    lines += ["  " + s for s in succ]
    lines.append("partial answers (%d):" % len(part))
    lines += ["  " + s for s in part]
    for k, d in enumerate(traces):
        lines.append("-- derivation %d" % (k + 1))
        lines.append(E.format_trace(d))
    _emit(args, doc, "\n".join(lines))
    if succ:
        return OK
    return TRUNCATED if (ans.depth_cut or truncated) else NEGATIVE


def _render(node, depth=0, lines=None, step=None):
    lines = [] if lines is None else lines
    label = format_query(node.query)
    if step is not None:
        label = "[%s:%s] %s" % (format_atom(step.atom), step.clause_id, label)
    if node.status and not node.children:
        label += "  (%s)" % node.status
    lines.append("  " * depth + label)
    for s, child in node.children:
        _render(child, depth + 1, lines, s)
    return lines


def _tree_doc(node, step=None) -> dict:
    return {
        "query": format_query(node.query),
        "selected": format_atom(step.atom) if step else None,
        "clause": step.clause_id if step else None,
        "mgu": format_substitution(step.mgu) if step else None,
        "status": node.status,
        "children": [_tree_doc(c, s) for s, c in node.children],
    }


def cmd_tree(args) -> int:
    p = load_program(args.file)
    q = parse_query(args.query, p)
    t = E.build_tree(q, p, args.kind, args.depth, args.fuel, args.int_range)
    doc = {"kind": t.kind, "lnodes": t.lnodes, "finite": t.finite, "truncated": t.truncated, "tree": _tree_doc(t.root)}
    lines = _render(t.root) + ["lnodes: %d" % t.lnodes, "finite: %s" % ("yes" if t.finite else "no")]
    _emit(args, doc, "\n".join(lines))
    return OK if t.finite else TRUNCATED


def cmd_model(args) -> int:
    p = load_program(args.file)
    b = _bounds(args)
    mode = GROUND if args.ground else SYMBOLIC
    m = (compute_partial_model if args.partial else compute_model)(p, b, mode)
    text = dump_model(m, p.name)
    doc = {
        "program": p.name,
        "kind": m.kind,
        "partial": args.partial,
        "iterations": m.iterations,
        "fixpoint": m.fixpoint,
        "bounds": vars(b),
        "atoms": text.splitlines()[1:],
    }
    _emit(args, doc, text)
    return OK if m.fixpoint else TRUNCATED


def cmd_terminate(args) -> int:
    p = load_program(args.file)
    b = _bounds(args)
    if args.canonical:
        lm = canonical_level_mapping(p, args.probe_depth, int_range=args.int_range)
    else:
        lm = LevelMapping.declared(p)
    rep = check_simply_acceptable(p, lm, b=b)
    doc = {"acceptability": rep.to_dict()}
    lines = ["program: %s" % p.name, "mapping: %s" % rep.mapping, "acceptability: %s (%d instances)" % (rep.status, rep.instances)]
    if rep.counterexample:
        ce = rep.counterexample
        lines.append("  counterexample: clause %d atom %d: |%s| = %s, |%s| = %s %s" % (
            ce["clause"], ce["body_atom"], ce["head"], ce["head_level"], ce["atom"], ce["atom_level"], ce["reason"]))
    evidence = False
    if not args.no_probe:
        preds = None
        if args.predicate:
            preds = []
            for s in args.predicate:
                name, _, ar = s.rpartition("/")
                preds.append((name, int(ar)))
        qd = args.query_depth if args.query_depth is not None else args.depth
        pr = probe_termination(p, qd, args.probe_depth, b, preds, int_range=args.int_range)
        doc["probe"] = pr.to_dict()
        evidence = not pr.terminating
        lines.append("probe: %s (%d queries, longest %d)" % (doc["probe"]["verdict"], pr.queries, pr.longest))
        lines += ["  evidence: " + e for e in doc["probe"]["evidence"]]
    _emit(args, doc, "\n".join(lines))
    if rep.status == "rejected" or evidence:
        return NEGATIVE
    return OK if rep.accepted else TRUNCATED


def _bundled() -> Path:
    return Path(str(resources.files("icprog") / "corpus"))


def cmd_bench(args) -> int:
    d = Path(args.dir) if args.dir else _bundled()
    expected = Path(args.expected) if args.expected else d / "expected.csv"
    if not expected.exists():
        raise FileNotFoundError("expected table not found: %s" % expected)
    rows, status = run_benchmarks(d, expected, args.workers)
    counts = summary(rows)
    doc = {"corpus": str(d), "expected": str(expected), "summary": counts, "rows": [r.to_dict() for r in rows]}
    text = format_rows(rows) + "summary: " + ", ".join("%s=%d" % kv for kv in counts.items())
    _emit(args, doc, text)
    return status


COMMANDS = {
    "check": cmd_check,
    "run": cmd_run,
    "tree": cmd_tree,
    "model": cmd_model,
    "terminate": cmd_terminate,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParseError, ContractError, FileNotFoundError, ValueError) as e:
        if isinstance(e, LevelUndefined):
            print("icprog: %s" % e, file=sys.stderr)
            return TRUNCATED
        print("icprog: %s" % e, file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
