"""Resolution under input-consuming, delay-respecting and leftmost selection."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from . import kernels as K
from ._types import Struct, Var
from .analysis import check_simply_moded
from .frontend import Program
from .pretty import format_atom, format_query, format_substitution
from .terms import (
    EMPTY,
    ContractError,
    ModedAtom,
    Substitution,
    apply,
    canonical_query,
    decompose_simply_local_mgu,
    rename_apart,
    vars_of,
)

IC = "ic"  # every IC-resolvable atom branches
LIC = "lic"  # leftmost IC-resolvable atom
DELAY = "delay"  # leftmost selectable atom
DELAY_ANY = "delay-any"  # every selectable atom branches
LEFTMOST = "leftmost"
RULES = (IC, LIC, DELAY, DELAY_ANY, LEFTMOST)
IC_RULES = (IC, LIC)

SUCCESS = "success"
DEADLOCK = "deadlock"
FAILURE = "failure"
DEPTHCUT = "depthcut"

DEFAULT_INT_RANGE = (0, 64)
DEFAULT_FUEL = 200_000


class RangeError(ArithmeticError):
    """A builtin comparison met an integer outside the configured fact table."""


@dataclass(frozen=True)
class Step:
    query: tuple
    index: int
    clause_id: Union[int, str]  # 1-based clause number, or "builtin"
    mgu: Substitution
    resolvent: tuple
    width: int  # number of body atoms that replaced the selected one

    @property
    def atom(self) -> ModedAtom:
        return self.query[self.index]


@dataclass(frozen=True)
class Derivation:
    query: tuple
    steps: tuple
    status: str
    cas: Substitution

    @property
    def final(self) -> tuple:
        return self.steps[-1].resolvent if self.steps else self.query

    def __len__(self):
        return len(self.steps)


@dataclass(frozen=True)
class Truncated:
    """Marks a stream cut short by the fuel bound."""

    reason: str = "fuel exhausted"


@dataclass
class Node:
    query: tuple
    status: Optional[str] = None  # set on leaves
    children: list = field(default_factory=list)  # (Step, Node)

    def count(self) -> int:
        n, stack = 0, [self]
        while stack:
            x = stack.pop()
            n += 1
            stack.extend(c for _, c in x.children)
        return n

    def leaves(self):
        stack = [self]
        while stack:
            x = stack.pop()
            if not x.children:
                yield x
            stack.extend(c for _, c in x.children)


@dataclass
class DerivationTree:
    root: Node
    kind: str
    depth_bound: int
    truncated: bool = False

    @property
    def lnodes(self) -> int:
        return self.root.count()

    @property
    def finite(self) -> bool:
        """No depth cut and no truncation anywhere in the tree."""
        return not self.truncated and all(l.status != DEPTHCUT for l in self.root.leaves())


# -- single steps ---------------------------------------------------------


def _clause_table(p: Program) -> dict:
    tab = p.__dict__.get("_clause_table")
    if tab is None or tab[0] != len(p.clauses):
        index: dict = {}
        for k, c in enumerate(p.clauses):
            index.setdefault(c.head.key, []).append((k + 1, c))
        tab = (len(p.clauses), index)
        p.__dict__["_clause_table"] = tab
    return tab[1]


def _int(t, int_range):
    if type(t) is Struct and not t[1] and t[0].isdigit():
        n = int(t[0])
        if not int_range[0] <= n <= int_range[1]:
            raise RangeError("integer %d outside builtin range %d..%d" % (n, int_range[0], int_range[1]))
        return n
    return None


def _holds(pred: str, a: int, b: int) -> bool:
    return a <= b if pred == "=<" else a > b


def _builtin_steps(q, i, ic: bool, int_range) -> list:
    b = q[i]
    x, y = b.args
    gx, gy = not vars_of(x), not vars_of(y)
    rest = q[:i] + q[i + 1:]
    if gx and gy:
        nx, ny = _int(x, int_range), _int(y, int_range)
        if nx is None or ny is None or not _holds(b.predicate, nx, ny):
            return []
        return [Step(q, i, "builtin", EMPTY, rest, 0)]
    if ic:
        return []  # a ground fact cannot match a non-ground input without binding it
    # Standard unification against the generated fact table.
    lo, hi = int_range
    xs = [_int(x, int_range)] if gx else range(lo, hi + 1)
    ys = [_int(y, int_range)] if gy else range(lo, hi + 1)
    if (gx and xs[0] is None) or (gy and ys[0] is None):
        return []
    out = []
    for nx in xs:
        for ny in ys:
            if not _holds(b.predicate, nx, ny):
                continue
            m = K.mgu_args(b.args, (Struct(str(nx)), Struct(str(ny))))
            if m is not None:
                th = Substitution._raw(m)
                out.append(Step(q, i, "builtin", th, apply(th, rest), 0))
    return out


def _atom_steps(q, i, p: Program, ic: bool, int_range) -> list:
    b = q[i]
    clauses = _clause_table(p).get(b.key)
    if clauses is None:
        if b.is_builtin:
            return _builtin_steps(q, i, ic, int_range)
        return []
    out = []
    for cid, c in clauses:
        if ic:
            if b.key != c.head.key:
                continue
            s0 = K.match_args(c.head.inputs, b.inputs)
            if s0 is None:
                continue
            c = rename_apart(c)
            d = decompose_simply_local_mgu(b, c.head)
            s0, s1 = d
            m = dict(s0.mapping)
            m.update(s1.mapping)
        else:
            c = rename_apart(c)
            m = K.mgu_args(b.args, c.head.args)
            if m is None:
                continue
        th = Substitution(m)
        res = apply(th, q[:i] + c.body + q[i + 1:])
        out.append(Step(q, i, cid, th, res, len(c.body)))
    return out


def selectable_by_delay(q, i: int, p: Program) -> bool:
    d = p.delays.get(q[i].key)
    return True if d is None else d.allows(q[i])


def node_steps(q, p: Program, rule: str, int_range=DEFAULT_INT_RANGE):
    """All steps the rule allows at ``q`` and, if there are none, the leaf status."""
    if not q:
        return [], SUCCESS
    if rule == IC:
        steps = []
        for i in range(len(q)):
            steps.extend(_atom_steps(q, i, p, True, int_range))
        return steps, (None if steps else DEADLOCK)
    if rule == LIC:
        for i in range(len(q)):
            steps = _atom_steps(q, i, p, True, int_range)
            if steps:
                return steps, None
        return [], DEADLOCK
    if rule == DELAY:
        for i in range(len(q)):
            if selectable_by_delay(q, i, p):
                steps = _atom_steps(q, i, p, False, int_range)
                return steps, (None if steps else FAILURE)
        return [], DEADLOCK
    if rule == DELAY_ANY:
        sel = [i for i in range(len(q)) if selectable_by_delay(q, i, p)]
        if not sel:
            return [], DEADLOCK
        steps = []
        for i in sel:
            steps.extend(_atom_steps(q, i, p, False, int_range))
        return steps, (None if steps else FAILURE)
    if rule == LEFTMOST:
        steps = _atom_steps(q, 0, p, False, int_range)
        return steps, (None if steps else FAILURE)
    raise ValueError("unknown selection rule %r" % rule)


def _require_sm(q, rule):
    if rule in IC_RULES and not check_simply_moded(tuple(q)):
        raise ContractError("input-consuming resolution needs a simply-moded query")


def ic_resolvents(q, i: int, p: Program, int_range=DEFAULT_INT_RANGE) -> list:
    """(renamed clause head, mgu, resolvent) for each IC step on atom ``i``."""
    q = tuple(q)
    _require_sm(q, IC)
    return [(s.clause_id, s.mgu, s.resolvent) for s in _atom_steps(q, i, p, True, int_range)]


# -- derivations ----------------------------------------------------------


def _cas(q, steps) -> Substitution:
    th = EMPTY
    for s in steps:
        th = th.compose(s.mgu)
    return th.restrict(vars_of(q))


def enumerate_derivations(
    q,
    p: Program,
    rule: str = LIC,
    depth_bound: int = 10,
    fuel: int = DEFAULT_FUEL,
    seed: Optional[int] = None,
    int_range=DEFAULT_INT_RANGE,
) -> Iterator[Union[Derivation, Truncated]]:
    """Depth-first stream of maximal derivations, cut at ``depth_bound`` steps.

    A ``Truncated`` marker ends the stream if more than ``fuel`` nodes are visited.
    """
    q = tuple(q)
    _require_sm(q, rule)
    rng = random.Random(seed) if seed is not None else None
    used = 0
    stack = [(q, ())]
    while stack:
        cur, path = stack.pop()
        used += 1
        if used > fuel:
            yield Truncated()
            return
        if cur and len(path) >= depth_bound:
            steps, status = node_steps(cur, p, rule, int_range)
            yield Derivation(q, path, DEPTHCUT if steps else status, _cas(q, path))
            continue
        steps, status = node_steps(cur, p, rule, int_range)
        if not steps:
            yield Derivation(q, path, status, _cas(q, path))
            continue
        if rng is not None:
            rng.shuffle(steps)
        for s in reversed(steps):
            stack.append((s.resolvent, path + (s,)))


def sample_derivation(q, p: Program, rule: str, depth_bound: int, rng: random.Random, int_range=DEFAULT_INT_RANGE) -> Derivation:
    """One derivation chosen by a uniform random walk over the allowed steps."""
    q = tuple(q)
    path = []
    cur = q
    while True:
        steps, status = node_steps(cur, p, rule, int_range)
        if not steps:
            return Derivation(q, tuple(path), status, _cas(q, path))
        if len(path) >= depth_bound:
            return Derivation(q, tuple(path), DEPTHCUT, _cas(q, path))
        s = rng.choice(steps)
        path.append(s)
        cur = s.resolvent


def build_tree(q, p: Program, kind: str = LIC, depth_bound: int = 10, fuel: int = DEFAULT_FUEL, int_range=DEFAULT_INT_RANGE) -> DerivationTree:
    q = tuple(q)
    _require_sm(q, kind)
    root = Node(q)
    tree = DerivationTree(root, kind, depth_bound)
    used = 0
    stack = [(root, 0)]
    while stack:
        node, depth = stack.pop()
        used += 1
        if used > fuel:
            tree.truncated = True
            node.status = DEPTHCUT
            for n, _ in stack:
                n.status = DEPTHCUT
            break
        steps, status = node_steps(node.query, p, kind, int_range)
        if not steps:
            node.status = status
            continue
        if depth >= depth_bound:
            node.status = DEPTHCUT
            continue
        for s in steps:
            child = Node(s.resolvent)
            node.children.append((s, child))
        for _, child in reversed(node.children):
            stack.append((child, depth + 1))
    return tree


# -- answers --------------------------------------------------------------


@dataclass(frozen=True)
class AnswerSet:
    """Answers as canonical instances of the query, i.e. c.a.s. modulo renaming."""

    query: tuple
    success: frozenset
    partial: frozenset
    depth_cut: bool
    truncated: bool

    def success_substitutions(self) -> list:
        return [_as_substitution(self.query, a) for a in sorted(self.success, key=repr)]

    def partial_substitutions(self) -> list:
        return [_as_substitution(self.query, a) for a in sorted(self.partial, key=repr)]


def _as_substitution(q, inst) -> Substitution:
    """θ with qθ a variant of ``inst``, keeping q's own variable names where possible."""
    qa = tuple(a for x in q for a in x.args)
    ia = tuple(a for x in inst for a in x.args)
    g = K.match_args(qa, ia) or {}
    ren, used = {}, set()
    for x in vars_of(q):
        t = g.get(x)
        if type(t) is Var and t not in ren and x not in used:
            ren[t] = x
            used.add(x)
    for k, v in enumerate(v for v in vars_of(inst) if v not in ren):
        ren[v] = Var("V%d'" % k)
    return Substitution(K.match_args(qa, K.apply_args(ia, ren)))


def answers(q, p: Program, rule: str = IC, depth_bound: int = 6, fuel: int = DEFAULT_FUEL, int_range=DEFAULT_INT_RANGE) -> AnswerSet:
    """Success and partial answers of all derivations of length at most ``depth_bound``."""
    q = tuple(q)
    _require_sm(q, rule)
    n = len(q)
    memo: dict = {}
    budget = [fuel]
    flags = {"cut": False, "trunc": False}

    def go(inst, cur, depth):
        key = (canonical_query(inst + cur), depth)
        hit = memo.get(key)
        if hit is not None:
            return hit
        budget[0] -= 1
        me = canonical_query(inst)
        succ, part = set(), {me}
        if not cur:
            succ.add(me)
        elif budget[0] < 0:
            flags["trunc"] = True
        else:
            steps, _ = node_steps(cur, p, rule, int_range)
            if steps and depth == 0:
                flags["cut"] = True
            elif steps:
                for s in steps:
                    s2, p2 = go(apply(s.mgu, inst), s.resolvent, depth - 1)
                    succ |= s2
                    part |= p2
        res = (frozenset(succ), frozenset(part))
        memo[key] = res
        return res

    succ, part = go(q, q, depth_bound)
    return AnswerSet(q, succ, part, flags["cut"], flags["trunc"])


# -- counting and probing -------------------------------------------------


class LnodesCounter:
    """Memoized node counts of LIC-trees, keyed by query variant."""

    def __init__(self, p: Program, depth_bound: int, int_range=DEFAULT_INT_RANGE, kind: str = LIC):
        self.p = p
        self.depth_bound = depth_bound
        self.int_range = int_range
        self.kind = kind
        self.memo: dict = {}

    def count(self, q) -> tuple:
        """(lnodes, finite) for the tree rooted at ``q``."""
        return self._count(canonical_query(tuple(q)), self.depth_bound)

    def _count(self, q, depth):
        key = (q, depth)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        steps, _ = node_steps(q, self.p, self.kind, self.int_range)
        if not steps:
            res = (1, True)
        elif depth == 0:
            res = (1, False)
        else:
            total, fin = 1, True
            for s in steps:
                c, f = self._count(canonical_query(s.resolvent), depth - 1)
                total += c
                fin = fin and f
            res = (total, fin)
        self.memo[key] = res
        return res


def lnodes(q, p: Program, depth_bound: int = 64, int_range=DEFAULT_INT_RANGE) -> tuple:
    return LnodesCounter(p, depth_bound, int_range).count(q)


class LongestPath:
    """Longest IC-any derivation from a query, capped, with variant-cycle detection."""

    def __init__(self, p: Program, cap: int, int_range=DEFAULT_INT_RANGE, rule: str = IC):
        self.p = p
        self.cap = cap
        self.int_range = int_range
        self.rule = rule
        self.memo: dict = {}

    def longest(self, q) -> int:
        """Length of the longest derivation, or ``cap`` when it reaches the cap or loops."""
        return self._go(canonical_query(tuple(q)), self.cap, set())

    def _go(self, q, cap, onpath):
        hit = self.memo.get(q)
        if hit is not None:
            val, exact = hit
            if exact or val >= cap:
                return min(val, cap)
        if q in onpath:
            return cap
        if cap == 0:
            return 0
        steps, _ = node_steps(q, self.p, self.rule, self.int_range)
        if not steps:
            self.memo[q] = (0, True)
            return 0
        onpath.add(q)
        best = 0
        for s in steps:
            v = 1 + self._go(canonical_query(s.resolvent), cap - 1, onpath)
            if v > best:
                best = v
            if best >= cap:
                break
        onpath.discard(q)
        self.memo[q] = (best, best < cap)
        return best


# -- delay versus input-consuming steps ----------------------------------


def _step_key(q, s: Step):
    return (s.index, s.clause_id, canonical_query(apply(s.mgu, q) + s.resolvent))


def compare_step_sets(q, p: Program, depth_bound: int = 6, int_range=DEFAULT_INT_RANGE) -> list:
    """Nodes where delay-respecting and input-consuming steps differ.

    Walks both trees in lockstep; each reported item is (query, delay-only keys, IC-only keys).
    """
    out = []
    seen = set()
    stack = [(tuple(q), 0)]
    while stack:
        cur, depth = stack.pop()
        ck = (canonical_query(cur), depth)
        if ck in seen:
            continue
        seen.add(ck)
        d_steps, _ = node_steps(cur, p, DELAY_ANY, int_range)
        i_steps, _ = node_steps(cur, p, IC, int_range)
        dk = {_step_key(cur, s): s for s in d_steps}
        ik = {_step_key(cur, s): s for s in i_steps}
        if set(dk) != set(ik):
            out.append((cur, set(dk) - set(ik), set(ik) - set(dk)))
            continue
        if depth < depth_bound:
            for k in ik:
                stack.append((ik[k].resolvent, depth + 1))
                stack.append((dk[k].resolvent, depth + 1))
    return out


# -- trace export ---------------------------------------------------------


def format_trace(d: Derivation) -> str:
    lines = []
    for k, s in enumerate(d.steps):
        lines.append(
            "%d | %s | %s | %s | %s"
            % (k + 1, format_atom(s.atom), s.clause_id, format_substitution(s.mgu), format_query(s.resolvent))
        )
    lines.append("status: %s | cas: %s" % (d.status, format_substitution(d.cas)))
    return "\n".join(lines)
