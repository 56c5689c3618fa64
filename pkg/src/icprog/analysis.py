"""Static checks over moded programs and the predicate dependency graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ._types import Var
from .frontend import GROUND, NONVAR, DelayDecl, Program
from .terms import BUILTINS, IN, Clause, ModedAtom, is_flat, is_linear, simply_moded_violation


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = ""
    clause: Optional[int] = None  # index into Program.clauses
    position: Optional[int] = None  # body atom index (1-based) or argument index
    condition: str = ""

    def __bool__(self):
        return self.ok


YES = Verdict(True)


def _sm_clause(c) -> Verdict:
    if type(c) is Clause:
        v = simply_moded_violation(c.head.inputs, c.body)
    else:
        v = simply_moded_violation((), tuple(c))
    if v is None:
        return YES
    i, code, msg = v
    return Verdict(False, msg, position=i, condition=code)


def check_simply_moded(x) -> Verdict:
    """Simply-modedness of a clause, a query, or every clause of a program."""
    if isinstance(x, Program):
        for k, c in enumerate(x.clauses):
            v = _sm_clause(c)
            if not v:
                return Verdict(False, "clause %d: %s" % (k + 1, v.reason), k, v.position, v.condition)
        return YES
    if type(x) is ModedAtom:
        x = (x,)
    return _sm_clause(x)


def check_input_consistent(p: Program) -> Verdict:
    """Heads' input arguments are jointly linear and each a variable or flat."""
    for k, c in enumerate(p.clauses):
        ins = c.head.inputs
        for pos, t in zip(c.head.mode.ins, ins):
            if type(t) is not Var and not is_flat(t):
                return Verdict(False, "clause %d: input argument %d, %r, is neither a variable nor flat" % (k + 1, pos + 1, t), k, pos, "not-flat")
        if not is_linear(ins):
            return Verdict(False, "clause %d: head inputs share a variable" % (k + 1), k, None, "not-linear")
    return YES


@dataclass(frozen=True)
class DelayVerdict:
    ok: bool
    controlled: dict = field(default_factory=dict)  # key -> tuple of argument indices
    free: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self):
        return self.ok


def check_simple_delays(p: Program) -> DelayVerdict:
    """Simple iff every guard is a nonvar conjunction over input positions."""
    controlled, free = {}, {}
    reason = ""
    for key in p.predicates():
        mode = p.modes.get(key)
        if mode is None:
            continue
        d = p.delays.get(key, DelayDecl(key))
        for pos, kind in d.conditions:
            if kind == GROUND and not reason:
                reason = "%s/%d: ground condition on argument %d" % (key[0], key[1], pos + 1)
            elif mode.positions[pos] != IN and not reason:
                reason = "%s/%d: condition on output argument %d" % (key[0], key[1], pos + 1)
        ctl = tuple(pos for pos, kind in d.conditions if kind == NONVAR and mode.positions[pos] == IN)
        controlled[key] = ctl
        free[key] = tuple(i for i in mode.ins if i not in ctl)
    return DelayVerdict(not reason, controlled, free, reason)


@dataclass(frozen=True)
class Lemma1Verdict:
    first: Optional[bool]  # None when not applicable
    second: Optional[bool]
    reason: str = ""


def check_lemma1_conditions(p: Program) -> Lemma1Verdict:
    """Variables at free head positions; flat non-variables at controlled ones."""
    if not check_simply_moded(p):
        return Lemma1Verdict(None, None, "program is not simply-moded")
    if not check_input_consistent(p):
        return Lemma1Verdict(None, None, "program is not input-consistent")
    dv = check_simple_delays(p)
    if not dv:
        return Lemma1Verdict(None, None, "delay declarations are not simple: " + dv.reason)
    first, second, reason = True, True, ""
    for k, c in enumerate(p.clauses):
        h = c.head
        for pos in dv.free.get(h.key, ()):
            if type(h.args[pos]) is not Var and first:
                first = False
                reason = reason or "clause %d: free argument %d is not a variable" % (k + 1, pos + 1)
        for pos in dv.controlled.get(h.key, ()):
            if (type(h.args[pos]) is Var or not is_flat(h.args[pos])) and second:
                second = False
                reason = reason or "clause %d: controlled argument %d is not a flat non-variable term" % (k + 1, pos + 1)
    return Lemma1Verdict(first, first and second, reason)


def derive_delays(p: Program) -> dict:
    """Nonvar guards on every input position where some head is not a variable.

    Builtins behave like tables of ground facts, so all their inputs are guarded.
    """
    out = {}
    for key in p.predicates():
        mode = p.modes.get(key)
        if mode is None:
            continue
        if key in BUILTINS:
            pos = mode.ins
        else:
            heads = [c.head for c in p.clauses_for(key)]
            pos = tuple(i for i in mode.ins if any(type(h.args[i]) is not Var for h in heads))
        if pos:
            out[key] = DelayDecl(key, tuple((i, NONVAR) for i in pos))
    return out


# -- dependency graph -----------------------------------------------------


@dataclass
class DependencyGraph:
    nodes: list
    refers: dict  # key -> set of keys
    closure: dict  # key -> set of keys (reflexive, transitive)

    def depends_on(self, p, q) -> bool:
        return q in self.closure.get(p, {p})

    def mutually_recursive(self, p, q) -> bool:
        return self.depends_on(p, q) and self.depends_on(q, p)

    def dep(self, p) -> int:
        """Number of predicates defined in the program that ``p`` depends on."""
        defined = set(self.nodes)
        return len(self.closure.get(p, {p}) & defined)

    def classes(self) -> list:
        seen, out = set(), []
        for n in self.nodes:
            if n in seen:
                continue
            cls = sorted(m for m in self.nodes if self.mutually_recursive(n, m))
            seen.update(cls)
            out.append(cls)
        return out


def build_dependency_graph(p: Program) -> DependencyGraph:
    nodes = sorted(p.defined())
    refers: dict = {}
    for c in p.clauses:
        refers.setdefault(c.head.key, set()).update(b.key for b in c.body)
    allkeys = set(nodes) | {q for qs in refers.values() for q in qs}
    closure = {}
    for n in allkeys:
        seen = {n}
        stack = [n]
        while stack:
            x = stack.pop()
            for y in refers.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure[n] = seen
    return DependencyGraph(nodes, refers, closure)


# -- report ---------------------------------------------------------------

NA = "-"


def _yn(b: Optional[bool]) -> str:
    return NA if b is None else ("yes" if b else "no")


@dataclass
class AnalysisReport:
    program: str
    sm: bool
    ic: Optional[bool]
    simple_delays: bool
    lemma1_first: Optional[bool]
    lemma1_second: Optional[bool]
    clauses: list
    predicates: dict
    reasons: list

    @property
    def lemma1(self) -> Optional[bool]:
        if self.lemma1_first is None:
            return None
        return bool(self.lemma1_first and self.lemma1_second)

    def columns(self) -> tuple:
        """(SM, IC, L) as printed in classification tables."""
        ic = self.ic if self.sm else None
        return (_yn(self.sm), _yn(ic), _yn(self.lemma1 if ic else None))

    def to_dict(self) -> dict:
        sm, ic, l1 = self.columns()
        return {
            "program": self.program,
            "SM": sm,
            "IC": ic,
            "L": l1,
            "simple_delays": self.simple_delays,
            "lemma1": [_yn(self.lemma1_first), _yn(self.lemma1_second)],
            "clauses": self.clauses,
            "predicates": self.predicates,
            "reasons": self.reasons,
        }


def analyze(p: Program) -> AnalysisReport:
    sm = check_simply_moded(p)
    ic = check_input_consistent(p)
    dv = check_simple_delays(p)
    l1 = check_lemma1_conditions(p)
    clauses = []
    for k, c in enumerate(p.clauses):
        v = _sm_clause(c)
        clauses.append({"clause": k + 1, "text": repr(c), "simply_moded": v.ok, "reason": v.reason})
    graph = build_dependency_graph(p)
    preds = {}
    for key in p.predicates():
        name = "%s/%d" % key
        preds[name] = {
            "mode": str(p.modes[key]) if key in p.modes else None,
            "controlled": [i + 1 for i in dv.controlled.get(key, ())],
            "free": [i + 1 for i in dv.free.get(key, ())],
            "dep": graph.dep(key),
        }
    reasons = [r for r in (sm.reason, ic.reason, dv.reason, l1.reason) if r]
    return AnalysisReport(p.name, sm.ok, ic.ok, dv.ok, l1.first, l1.second, clauses, preds, reasons)
