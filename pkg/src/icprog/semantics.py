"""Simply-local models: the T^SL operator, bounded fixpoints and witness search.

Symbolic interpretations store canonical atoms read schematically: variables
occurring in input positions are generic (any term may replace them), while
variables occurring only in output positions are rigid (they may only be
renamed to distinct variables that do not occur in the inputs).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from . import kernels as K
from ._types import Struct, Var
from .analysis import check_simply_moded
from .frontend import Program
from .pretty import format_atom
from .terms import (
    BUILTINS,
    ContractError,
    ModedAtom,
    Substitution,
    apply,
    canonical_atom,
    check_simply_local,
    fresh_var,
    rename_apart,
    vars_of,
)

SYMBOLIC = "symbolic"
GROUND = "ground-enumeration"


@dataclass(frozen=True)
class FixpointBounds:
    max_iterations: int = 8
    term_depth: int = 2
    fresh_pool: int = 2
    max_length: Optional[int] = None  # drop atoms needing longer derivations
    constants: tuple = ()  # extra constants for the term universe
    int_range: tuple = (0, 3)  # fact table for the comparison builtins

    def __post_init__(self):
        if self.max_iterations < 1 or self.term_depth < 0 or self.fresh_pool < 0:
            raise ValueError("bounds must be positive")


class Interpretation:
    """Set of canonical atoms, each tagged with the shortest derivation producing it."""

    def __init__(self, bounds: FixpointBounds, kind: str = SYMBOLIC, seeded: bool = False, atoms=None):
        self.bounds = bounds
        self.kind = kind
        self.seeded = seeded
        self.atoms: dict = {}
        self.by_key: dict = {}
        self.by_input: dict = {}
        self.by_first: dict = {}
        self.fixpoint = False
        self.iterations = 0
        for a, tag in (atoms or {}).items():
            self.add(a, tag)

    def add(self, atom: ModedAtom, tag: int = 0) -> bool:
        a = canonical_atom(atom)
        old = self.atoms.get(a)
        if old is not None and old <= tag:
            return False
        self.atoms[a] = tag
        self.by_key.setdefault(a.key, {})[a] = tag
        self.by_input.setdefault((a.key, a.inputs), {})[a] = tag
        self.by_first.setdefault((a.key, _first_functor(a)), {})[a] = tag
        return old is None or tag < old

    def copy(self) -> "Interpretation":
        out = Interpretation(self.bounds, self.kind, self.seeded)
        out.atoms = dict(self.atoms)
        out.by_key = {k: dict(v) for k, v in self.by_key.items()}
        out.by_input = {k: dict(v) for k, v in self.by_input.items()}
        out.by_first = {k: dict(v) for k, v in self.by_first.items()}
        return out

    def candidates(self, key, inputs=None) -> list:
        """Stored atoms for a predicate, plus builtin facts, as (atom, tag).

        Given ``inputs`` that the stored inputs must match onto, atoms whose
        first input has a different principal functor are skipped.
        """
        first = _first_of(inputs) if inputs else None
        if first is None:
            out = list(self.by_key.get(key, {}).items())
        else:
            out = list(self.by_first.get((key, first), {}).items())
            out.extend(self.by_first.get((key, None), {}).items())
        if key in BUILTINS:
            facts = builtin_facts(key, self.bounds.int_range)
            out.extend((f, 1) for f in facts if first is None or _first_functor(f) == first)
        return out

    def __contains__(self, atom) -> bool:
        return member(atom, self) is not None

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def tag(self, atom) -> Optional[int]:
        return self.atoms.get(canonical_atom(atom))

    def same_atoms(self, other: "Interpretation") -> bool:
        return self.atoms == other.atoms


def _first_of(inputs):
    t = inputs[0]
    return None if type(t) is Var else (t[0], len(t[1]))


def _first_functor(a: ModedAtom):
    ins = a.inputs
    return _first_of(ins) if ins else None


_BUILTIN_MODE = {}


def builtin_facts(key, int_range) -> list:
    from .terms import IN, Mode

    mode = _BUILTIN_MODE.setdefault(key, Mode(key[0], (IN, IN)))
    lo, hi = int_range
    out = []
    for a in range(lo, hi + 1):
        for b in range(lo, hi + 1):
            if (a <= b) if key[0] == "=<" else (a > b):
                out.append(ModedAtom(key[0], (Struct(str(a)), Struct(str(b))), mode))
    return out


# -- membership -----------------------------------------------------------


def _rigid_ok(stored: ModedAtom, gamma: dict, target_inputs_vars: set) -> bool:
    """Rigid variables of ``stored`` map injectively to variables outside the inputs."""
    generic = set(vars_of(stored.inputs))
    seen = set()
    for v in vars_of(stored.outputs):
        if v in generic:
            continue
        t = gamma.get(v)
        if type(t) is not Var or t in target_inputs_vars or t in seen:
            return False
        seen.add(t)
    return True


def member(a: ModedAtom, i: Interpretation) -> Optional[Substitution]:
    """A substitution γ with Sγ == a for some stored S, or None."""
    if i.kind == GROUND:
        c = canonical_atom(a)
        if c in i.atoms or (a.key in BUILTINS and c in builtin_facts(a.key, i.bounds.int_range)):
            return Substitution(K.match_args(c.args, a.args))
        return None
    in_vars = set(vars_of(a.inputs))
    for s, _ in i.candidates(a.key, a.inputs):
        g = K.match_args(s.inputs, a.inputs)
        if g is None:
            continue
        g = K.match_args(s.outputs, a.outputs, g)
        if g is None or not _rigid_ok(s, g, in_vars):
            continue
        return Substitution(g)
    return None


def match_outputs(s: ModedAtom, inputs) -> Optional[tuple]:
    """Out(s)γ where In(s)γ == inputs, with s's rigid variables made fresh; None if no match."""
    g = K.match_args(s.inputs, inputs)
    if g is None:
        return None
    for v in vars_of(s.outputs):
        if v not in g:
            g[v] = fresh_var()
    return K.apply_args(s.outputs, g)


# -- the operator ---------------------------------------------------------


def _require_sm(p: Program):
    if not check_simply_moded(p):
        raise ContractError("the simply-local semantics needs a simply-moded program")


def _symbolic_step(p: Program, i: Interpretation) -> dict:
    out: dict = {}
    lmax = i.bounds.max_length
    for c in p.clauses:
        c = rename_apart(c)
        hin = c.head.inputs
        states = [({}, 0)]
        for b in c.body:
            nxt = []
            for th, tag in states:
                generic = set(vars_of(K.apply_args(hin, th)))
                si = K.apply_args(b.inputs, th)
                frozen = set(vars_of(si)) - generic
                for s, stag in i.candidates(b.key, si):
                    if lmax is not None and tag + stag + 1 > lmax:
                        continue
                    s = rename_apart(s) if vars_of(s) else s
                    mu = K.mgu_args(si, s.inputs, frozen)
                    if mu is None:
                        continue
                    th2 = _compose(th, mu)
                    if frozen & set(vars_of(K.apply_args(hin, th2))):
                        continue
                    outs = K.apply_args(s.outputs, mu)
                    for t, u in zip(b.outputs, outs):
                        th2[t] = u
                    nxt.append((th2, tag + stag))
            states = nxt
            if not states:
                break
        for th, tag in states:
            h = canonical_atom(apply(th, c.head))
            t = tag + 1
            if out.get(h, t + 1) > t:
                out[h] = t
    return out


def _compose(th: dict, mu: dict) -> dict:
    m = {}
    for v, t in th.items():
        t2 = K.apply_term(t, mu)
        if t2 != v:
            m[v] = t2
    for v, t in mu.items():
        if v not in th:
            m[v] = t
    return m


# ground enumeration


def signature(p: Program, constants=()) -> tuple:
    """(constants, functors with arity) occurring in the clauses, plus extras."""
    consts, funs = set(), set()

    def walk(t):
        if type(t) is Var:
            return
        if t[1]:
            funs.add((t[0], len(t[1])))
            for a in t[1]:
                walk(a)
        else:
            consts.add(t[0])

    for c in p.clauses:
        for a in (c.head,) + c.body:
            for t in a.args:
                walk(t)
    consts.update(str(x) for x in constants)
    return tuple(sorted(consts)), tuple(sorted(funs))


def pool_vars(k: int) -> list:
    return [Var("_P%d" % j) for j in range(k)]


def universe(sig, depth: int, pool: int) -> list:
    """levels[d] = all terms of depth <= d over ``sig`` and ``pool`` variables."""
    consts, funs = sig
    base = [Struct(c) for c in consts] + pool_vars(pool)
    levels = [base]
    for _ in range(depth):
        prev = levels[-1]
        cur = list(base)
        for f, n in funs:
            for args in itertools.product(prev, repeat=n):
                cur.append(Struct(f, args))
        levels.append(cur)
    return levels


def _depth_limits(terms, depth: int) -> dict:
    """Per-variable depth allowance so that ``terms`` stay within ``depth``."""
    lim: dict = {}

    def walk(t, k):
        if type(t) is Var:
            lim[t] = min(lim.get(t, depth), depth - k)
            return
        for a in t[1]:
            walk(a, k + 1)

    for t in terms:
        walk(t, 0)
    return lim


def _fits(a: ModedAtom, b: FixpointBounds) -> bool:
    if any(K.term_depth(t) > b.term_depth for t in a.args):
        return False
    return len(vars_of(a)) <= b.fresh_pool


def _sigma0(hin, levels, b: FixpointBounds) -> Iterator[dict]:
    lim = _depth_limits(hin, b.term_depth)
    vs = list(lim)
    if any(lim[v] < 0 for v in vs):
        return
    choices = [levels[lim[v]] for v in vs]
    for combo in itertools.product(*choices):
        yield dict(zip(vs, combo))


def _ground_lookup(i: Interpretation, b: ModedAtom, si) -> list:
    """Output bindings (tuple, tag) for inputs ``si`` from stored explicit atoms."""
    key = b.key
    if key in BUILTINS:
        try:
            x, y = (int(t[0]) for t in si if type(t) is Struct and not t[1] and t[0].isdigit())
        except ValueError:
            return []
        lo, hi = i.bounds.int_range
        if lo <= x <= hi and lo <= y <= hi and ((x <= y) if key[0] == "=<" else (x > y)):
            return [((), 1)]
        return []
    mapping: dict = {}
    cin = K.canonical_args(si, mapping)
    hits = i.by_input.get((key, cin))
    if not hits:
        return []
    inv = {c: v for v, c in mapping.items()}
    out = []
    for s, tag in hits.items():
        ren = dict(inv)
        for v in vars_of(s.outputs):
            if v not in ren:
                ren[v] = fresh_var()
        out.append((K.apply_args(s.outputs, ren), tag))
    return out


def _ground_step(p: Program, i: Interpretation, levels) -> dict:
    b = i.bounds
    out: dict = {}
    lmax = b.max_length
    for c in p.clauses:
        c = rename_apart(c)
        hin = c.head.inputs
        for s0 in _sigma0(hin, levels, b):
            states = [(dict(s0), 0)]
            for atom in c.body:
                nxt = []
                for th, tag in states:
                    si = K.apply_args(atom.inputs, th)
                    for outs, stag in _ground_lookup(i, atom, si):
                        if lmax is not None and tag + stag + 1 > lmax:
                            continue
                        th2 = dict(th)
                        for t, u in zip(atom.outputs, outs):
                            th2[t] = u
                        nxt.append((th2, tag + stag))
                states = nxt
                if not states:
                    break
            for th, tag in states:
                h = apply(th, c.head)
                if not _fits(h, b):
                    continue
                h = canonical_atom(h)
                if out.get(h, tag + 2) > tag + 1:
                    out[h] = tag + 1
    return out


def tsl_step(p: Program, i: Interpretation, b: Optional[FixpointBounds] = None, mode: Optional[str] = None) -> Interpretation:
    """T^SL(i): heads of clause instances whose body atoms are all in ``i``."""
    _require_sm(p)
    b = b or i.bounds
    mode = mode or i.kind
    src = i if i.bounds == b else _rebound(i, b)
    if mode == SYMBOLIC:
        new = _symbolic_step(p, src)
    else:
        new = _ground_step(p, src, _levels(p, b))
    return Interpretation(b, mode, False, new)


def _rebound(i: Interpretation, b: FixpointBounds) -> Interpretation:
    j = i.copy()
    j.bounds = b
    return j


def _levels(p: Program, b: FixpointBounds):
    return universe(signature(p, b.constants), b.term_depth, b.fresh_pool)


def sm_seed(p: Program, b: FixpointBounds, kind: str = SYMBOLIC) -> Interpretation:
    """The simply-moded atoms: one schematic atom per predicate, or all of them."""
    i = Interpretation(b, kind, True)
    for key in p.predicates():
        mode = p.modes.get(key)
        if mode is None:
            continue
        if kind == SYMBOLIC:
            i.add(ModedAtom(key[0], [fresh_var() for _ in range(key[1])], mode), 0)
            continue
        levels = _levels(p, b)
        for ins in itertools.product(levels[b.term_depth], repeat=len(mode.ins)):
            used = set(vars_of(ins))
            if len(used) + len(mode.outs) > b.fresh_pool:
                continue
            a = ModedAtom(key[0], [None] * key[1], mode).with_io(ins, [fresh_var() for _ in mode.outs])
            i.add(a, 0)
    return i


def _iterate(p: Program, start: Interpretation, b: FixpointBounds) -> Interpretation:
    _require_sm(p)
    cur = start
    levels = _levels(p, b) if start.kind == GROUND else None
    for k in range(1, b.max_iterations + 1):
        if start.kind == SYMBOLIC:
            new = _symbolic_step(p, cur)
        else:
            new = _ground_step(p, cur, levels)
        nxt = cur.copy()
        changed = False
        for a, t in new.items():
            changed |= nxt.add(a, t)
        nxt.iterations = k
        if not changed:
            cur.fixpoint = True
            cur.iterations = k
            return cur
        cur = nxt
    cur.fixpoint = False
    return cur


def compute_model(p: Program, b: FixpointBounds, mode: str = SYMBOLIC) -> Interpretation:
    """Bounded least simply-local model, iterated from the empty interpretation."""
    return _cached(p, b, mode, False, lambda: _iterate(p, Interpretation(b, mode, False), b))


def compute_partial_model(p: Program, b: FixpointBounds, mode: str = SYMBOLIC) -> Interpretation:
    """Bounded least simply-local model containing the simply-moded atoms."""
    return _cached(p, b, mode, True, lambda: _iterate(p, sm_seed(p, b, mode), b))


def _cached(p, b, mode, seeded, build):
    cache = p.__dict__.setdefault("_model_cache", {})
    key = (len(p.clauses), b, mode, seeded)
    hit = cache.get(key)
    if hit is None:
        hit = build()
        hit.seeded = seeded
        cache[key] = hit
    return hit


# -- witnesses ------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    theta: Substitution
    decomposition: object
    length: int  # sum of derivation-length tags of the atoms used


def _witnesses(q, m: Interpretation) -> Iterator[Witness]:
    q = tuple(q)
    if not check_simply_moded(q):
        raise ContractError("witness search needs a simply-moded query")
    lmax = m.bounds.max_length

    def go(k, th, tag):
        if k == len(q):
            yield dict(th), tag
            return
        a = q[k]
        si = K.apply_args(a.inputs, th)
        if m.kind == GROUND:
            for outs, stag in _ground_lookup(m, a, si):
                if lmax is not None and tag + stag > lmax:
                    continue
                th2 = dict(th)
                th2.update(zip(a.outputs, outs))
                yield from go(k + 1, th2, tag + stag)
            return
        for s, stag in sorted(m.candidates(a.key, si), key=lambda x: x[1]):
            if lmax is not None and tag + stag > lmax:
                continue
            outs = match_outputs(s, si)
            if outs is None:
                continue
            th2 = dict(th)
            th2.update(zip(a.outputs, outs))
            yield from go(k + 1, th2, tag + stag)

    for th, tag in go(0, {}, 0):
        theta = Substitution(th)
        yield Witness(theta, check_simply_local(theta, q), tag)


def success_witness(q, p: Program, b: FixpointBounds, model: Optional[Interpretation] = None) -> Optional[Witness]:
    """θ simply-local wrt ``q`` with every atom of qθ in the bounded model."""
    m = model or compute_model(p, b)
    return next(_witnesses(q, m), None)


def partial_witness(q, p: Program, b: FixpointBounds, model: Optional[Interpretation] = None) -> Iterator[Witness]:
    """All θ (one per variant of qθ) with qθ in the bounded partial model."""
    m = model or compute_partial_model(p, b)
    seen = set()
    from .terms import canonical_query

    for w in _witnesses(q, m):
        key = canonical_query(apply(w.theta, tuple(q)))
        if key not in seen:
            seen.add(key)
            yield w


def witness_instances(q, ws) -> set:
    """Canonical qθ for a stream of witnesses; comparable with engine answer sets."""
    from .terms import canonical_query

    return {canonical_query(apply(w.theta, tuple(q))) for w in ws}


# -- instance enumeration -------------------------------------------------


def instances(s: ModedAtom, levels, b: FixpointBounds) -> Iterator[ModedAtom]:
    """Canonical instances of schematic ``s`` inside the bounded universe."""
    generic = vars_of(s.inputs)
    lim = _depth_limits(s.args, b.term_depth)
    if any(lim[v] < 0 for v in lim):
        return
    rigid = [v for v in vars_of(s.outputs) if v not in set(generic)]
    choices = [levels[lim[v]] for v in generic]
    for combo in itertools.product(*choices):
        g = dict(zip(generic, combo))
        used = set(vars_of(combo))
        if len(used) + len(rigid) > b.fresh_pool:
            continue
        for v in rigid:
            g[v] = fresh_var()
        a = apply(g, s)
        if _fits(a, b):
            yield canonical_atom(a)


def instance_set(i: Interpretation, p: Program, b: Optional[FixpointBounds] = None) -> set:
    """All atoms of the bounded universe that ``i`` contains."""
    b = b or i.bounds
    levels = _levels(p, b)
    out = set()
    for s in i.atoms:
        if i.kind == GROUND:
            if _fits(s, b):
                out.add(s)
        else:
            out.update(instances(s, levels, b))
    return out


def universe_atoms(p: Program, b: FixpointBounds, key) -> Iterator[ModedAtom]:
    """Every canonical atom of predicate ``key`` inside the bounded universe."""
    mode = p.modes[key]
    levels = _levels(p, b)
    seen = set()
    for args in itertools.product(levels[b.term_depth], repeat=key[1]):
        a = ModedAtom(key[0], args, mode)
        if len(vars_of(a)) > b.fresh_pool:
            continue
        c = canonical_atom(a)
        if c not in seen:
            seen.add(c)
            yield c


def agreement(p: Program, symbolic: Interpretation, ground: Interpretation) -> tuple:
    """Universe atoms only one side contains: (symbolic-only, ground-only).

    Compares the symbolic instance set with the explicit atoms; ``instances``
    enumerates exactly the universe atoms that ``member`` accepts.
    """
    b = ground.bounds
    sym = instance_set(symbolic, p, b)
    gnd = {a for a in ground.atoms if _fits(a, b)}
    return sym - gnd, gnd - sym


# -- dump -----------------------------------------------------------------


def dump_model(i: Interpretation, name: str = "program") -> str:
    b = i.bounds
    head = "%% model %s kind=%s seeded=%s iterations=%d status=%s max_iterations=%d term_depth=%d fresh_pool=%d max_length=%s" % (
        name,
        i.kind,
        "yes" if i.seeded else "no",
        i.iterations,
        "fixpoint" if i.fixpoint else "truncated",
        b.max_iterations,
        b.term_depth,
        b.fresh_pool,
        "-" if b.max_length is None else b.max_length,
    )
    lines = sorted(format_atom(a) + "." for a in i.atoms)
    return "\n".join([head] + lines) + "\n"
