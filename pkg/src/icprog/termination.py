"""Moded level mappings, simply-acceptability, and an empirical termination probe."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional

from . import kernels as K
from ._types import CONS, Struct, Var
from .analysis import build_dependency_graph, check_simply_moded
from .engine import DEFAULT_INT_RANGE, IC, LnodesCounter, LongestPath
from .frontend import LevelDecl, Program
from .semantics import (
    GROUND,
    FixpointBounds,
    Interpretation,
    _depth_limits,
    _ground_lookup,
    _levels,
    compute_partial_model,
    match_outputs,
)
from .terms import BUILTINS, ContractError, ModedAtom, apply, fresh_var, rename_apart, vars_of


class LevelUndefined(ValueError):
    """The canonical level of an atom is not determined within the depth bound."""


def norm_len(t) -> int:
    n = 0
    while type(t) is Struct and t[0] == CONS and len(t[1]) == 2:
        n += 1
        t = t[1][1]
    return n


def norm_size(t) -> int:
    """Number of function and constant symbol occurrences."""
    if type(t) is Var:
        return 0
    return 1 + sum(norm_size(a) for a in t[1])


NORMS = {"len": norm_len, "size": norm_size}


def star(a: ModedAtom) -> ModedAtom:
    """``a`` with every output argument replaced by a fresh variable."""
    return a.with_io(a.inputs, [fresh_var() for _ in a.outputs])


class LevelMapping:
    """Declared linear norms, or the canonical node count of LIC-trees."""

    def __init__(self, decls: Optional[dict] = None, canonical: Optional[LnodesCounter] = None, name: str = "declared"):
        self.decls = decls or {}
        self.canonical = canonical
        self.name = name

    @classmethod
    def declared(cls, p: Program, decls: Optional[dict] = None) -> "LevelMapping":
        return cls(dict(p.levels if decls is None else decls), name="declared")

    def __call__(self, a: ModedAtom) -> int:
        return eval_level(self, a)

    def describe(self) -> str:
        if self.canonical is not None:
            return "canonical (LIC-tree nodes, depth %d)" % self.canonical.depth_bound
        parts = []
        for key, d in sorted(self.decls.items()):
            terms = " + ".join(("%d*" % k if k != 1 else "") + "%s(#%d)" % (n, pos + 1) for k, n, pos in d.terms)
            if d.constant or not terms:
                terms = (terms + " + " if terms else "") + str(d.constant)
            parts.append("|%s/%d| = %s" % (key[0], key[1], terms))
        return "; ".join(parts) or "all levels 0"


def eval_level(lm: LevelMapping, a: ModedAtom) -> int:
    if lm.canonical is not None:
        n, finite = lm.canonical.count((star(a),))
        if not finite:
            raise LevelUndefined("LIC-tree of %r is cut at depth %d" % (star(a), lm.canonical.depth_bound))
        return n
    d = lm.decls.get(a.key)
    if d is None:
        return 0
    return d.constant + sum(k * NORMS[n](a.args[pos]) for k, n, pos in d.terms)


def canonical_level_mapping(p: Program, depth: int = 64, probe: Optional[FixpointBounds] = None, int_range=DEFAULT_INT_RANGE) -> LevelMapping:
    """Level = nodes of the LIC-tree of the atom with outputs erased.

    With ``probe`` bounds, first refuses programs showing nontermination evidence.
    """
    if not check_simply_moded(p):
        raise ContractError("canonical level mapping needs a simply-moded program")
    if probe is not None:
        rep = probe_termination(p, probe.term_depth, depth, probe, int_range=int_range)
        if rep.evidence:
            raise LevelUndefined("not certified terminating at this depth: %r" % (rep.evidence[0],))
    return LevelMapping(canonical=LnodesCounter(p, depth, int_range), name="canonical")


# -- simply-acceptability -------------------------------------------------


@dataclass
class AcceptabilityReport:
    program: str
    mapping: str
    status: str  # accepted | rejected | truncated
    instances: int
    checks: list  # one dict per (clause, recursive body atom)
    counterexample: Optional[dict]
    bounds: FixpointBounds
    classes: list = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.status == "accepted"

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "mapping": self.mapping,
            "status": self.status,
            "instances": self.instances,
            "checks": self.checks,
            "counterexample": self.counterexample,
            "classes": [["%s/%d" % k for k in c] for c in self.classes],
            "bounds": vars(self.bounds),
        }


def _prefix_instances(atoms, th: dict, m: Interpretation, memo: dict) -> Iterator[dict]:
    """Extend θ by σ1..σk placing each atom's instance in ``m``."""
    if not atoms:
        yield th
        return
    a, rest = atoms[0], atoms[1:]
    si = K.apply_args(a.inputs, th)
    mapping: dict = {}
    ci = K.canonical_args(si, mapping)
    key = (a.key, ci)
    hits = memo.get(key)
    if hits is None:
        if m.kind == GROUND:
            hits = [outs for outs, _ in _ground_lookup(m, a, ci)]
        else:
            hits = [o for o in (match_outputs(s, ci) for s, _ in m.candidates(a.key, ci)) if o is not None]
        memo[key] = hits
    back = {c: v for v, c in mapping.items()}
    for outs in hits:
        ren = dict(back)
        for v in vars_of(outs):
            if v not in ren:
                ren[v] = fresh_var()
        th2 = dict(th)
        th2.update(zip(a.outputs, K.apply_args(outs, ren)))
        yield from _prefix_instances(rest, th2, m, memo)


def check_simply_acceptable(
    p: Program,
    lm: LevelMapping,
    m: Optional[Interpretation] = None,
    b: Optional[FixpointBounds] = None,
    clauses=None,
    max_instances: int = 1_000_000,
) -> AcceptabilityReport:
    """|Hθ| > |Bθ| for recursive body atoms B over bounded simply-local θ.

    ``clauses`` restricts the check to some clause indices (for modular use);
    ``m`` defaults to the bounded partial model.
    """
    if not check_simply_moded(p):
        raise ContractError("simply-acceptability needs a simply-moded program")
    b = b or FixpointBounds()
    m = m if m is not None else compute_partial_model(p, b)
    graph = build_dependency_graph(p)
    levels = _levels(p, b)
    total, checks, first_bad = 0, [], None
    memo: dict = {}
    truncated = False
    idx = range(len(p.clauses)) if clauses is None else clauses
    for k in idx:
        c = rename_apart(p.clauses[k])
        h = c.head
        lim = _depth_limits(h.inputs, b.term_depth)
        vs = list(lim)
        for i, body_atom in enumerate(c.body):
            if not graph.mutually_recursive(h.key, body_atom.key):
                continue
            n, bad = 0, None
            for combo in itertools.product(*[levels[lim[v]] for v in vs]):
                if bad is not None or truncated:
                    break
                s0 = dict(zip(vs, combo))
                for th in _prefix_instances(c.body[:i], s0, m, memo):
                    n += 1
                    if total + n > max_instances:
                        truncated = True
                        break
                    hi, bi = apply(th, h), apply(th, body_atom)
                    try:
                        lh, lb = lm(hi), lm(bi)
                        ok = lh > lb
                        why = ""
                    except LevelUndefined as e:
                        lh = lb = None
                        ok, why = False, str(e)
                    if not ok:
                        bad = {
                            "clause": k + 1,
                            "body_atom": i + 1,
                            "head": repr(hi),
                            "atom": repr(bi),
                            "head_level": lh,
                            "atom_level": lb,
                            "reason": why,
                        }
                        break
            total += n
            checks.append({"clause": k + 1, "body_atom": i + 1, "instances": n, "ok": bad is None})
            if bad is not None and first_bad is None:
                first_bad = bad
    status = "rejected" if first_bad else ("truncated" if truncated else "accepted")
    return AcceptabilityReport(p.name, lm.describe(), status, total, checks, first_bad, b, graph.classes())


# -- probing --------------------------------------------------------------


@dataclass
class ProbeReport:
    program: str
    queries: int
    derivation_depth: int
    evidence: list  # offending queries
    longest: int

    @property
    def terminating(self) -> bool:
        return not self.evidence

    def to_dict(self) -> dict:
        return {
            "program": self.program,
            "queries": self.queries,
            "derivation_depth": self.derivation_depth,
            "evidence": [repr(q[0]) for q in self.evidence],
            "longest": self.longest,
            "verdict": "no nontermination evidence" if self.terminating else "nontermination evidence",
        }


def probe_queries(p: Program, b: FixpointBounds, predicates=None) -> Iterator[tuple]:
    """Simply-moded one-atom queries: universe inputs, fresh distinct outputs."""
    levels = _levels(p, b)
    keys = predicates or [k for k in p.predicates() if k in p.modes and k not in BUILTINS]
    for key in keys:
        mode = p.modes[key]
        for ins in itertools.product(levels[b.term_depth], repeat=len(mode.ins)):
            a = ModedAtom(key[0], [None] * key[1], mode).with_io(ins, [fresh_var() for _ in mode.outs])
            yield (a,)


def probe_termination(
    p: Program,
    query_depth: int = 2,
    derivation_depth: int = 64,
    b: Optional[FixpointBounds] = None,
    predicates=None,
    stop_at_first: bool = True,
    int_range=DEFAULT_INT_RANGE,
) -> ProbeReport:
    """Search IC-trees of bounded one-atom queries for derivations reaching the depth."""
    if not check_simply_moded(p):
        raise ContractError("probing needs a simply-moded program")
    b = b or FixpointBounds(term_depth=query_depth, fresh_pool=1)
    if b.term_depth != query_depth:
        b = FixpointBounds(b.max_iterations, query_depth, b.fresh_pool, b.max_length, b.constants, b.int_range)
    lp = LongestPath(p, derivation_depth, int_range, IC)
    n, evidence, longest = 0, [], 0
    for q in probe_queries(p, b, predicates):
        n += 1
        v = lp.longest(q)
        longest = max(longest, v)
        if v >= derivation_depth:
            evidence.append(q)
            if stop_at_first:
                break
    return ProbeReport(p.name, n, derivation_depth, evidence, longest)
