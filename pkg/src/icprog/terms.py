"""First-order terms, moded atoms, substitutions and simply-local machinery."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from . import kernels as K
from ._types import CONS, NIL, Struct, Var

IN = "in"
OUT = "out"

BUILTINS = {("=<", 2), (">", 2)}


class ContractError(ValueError):
    """An operation was called outside its documented precondition."""


_fresh = itertools.count(1)


def fresh_var() -> Var:
    return Var("_G%d" % next(_fresh))


def const(name) -> Struct:
    return Struct(str(name))


def mklist(items: Sequence, tail=NIL):
    out = tail
    for x in reversed(list(items)):
        out = Struct(CONS, (x, out))
    return out


def is_var(t) -> bool:
    return type(t) is Var


def is_integer_const(t) -> bool:
    return type(t) is Struct and not t[1] and t[0].isdigit()


def is_flat(t) -> bool:
    """f(x1,...,xn) with distinct variables; constants count as flat."""
    if type(t) is Var:
        return False
    args = t[1]
    return all(type(a) is Var for a in args) and len(set(args)) == len(args)


def is_linear(terms: Iterable) -> bool:
    seen: dict = {}
    for t in terms:
        for v in _var_list(t):
            if v in seen:
                return False
            seen[v] = None
    return True


def _var_list(t):
    """All variable occurrences, duplicates included."""
    out = []
    stack = [t]
    while stack:
        x = stack.pop()
        if type(x) is Var:
            out.append(x)
        else:
            stack.extend(reversed(x[1]))
    return out


@dataclass(frozen=True)
class Mode:
    predicate: str
    positions: tuple
    ins: tuple = field(init=False, repr=False, compare=False)
    outs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "ins", tuple(i for i, m in enumerate(self.positions) if m == IN))
        object.__setattr__(self, "outs", tuple(i for i, m in enumerate(self.positions) if m == OUT))

    @property
    def arity(self) -> int:
        return len(self.positions)

    @property
    def key(self):
        return (self.predicate, len(self.positions))

    def __str__(self):
        return "%s(%s)" % (self.predicate, ",".join(p.capitalize() for p in self.positions))


class ModedAtom:
    __slots__ = ("predicate", "args", "mode", "inputs", "outputs")

    def __init__(self, predicate: str, args, mode: Mode):
        args = tuple(args)
        if len(args) != mode.arity:
            raise ValueError("arity mismatch for %s/%d" % (predicate, len(args)))
        self.predicate = predicate
        self.args = args
        self.mode = mode
        self.inputs = tuple([args[i] for i in mode.ins])
        self.outputs = tuple([args[i] for i in mode.outs])

    @property
    def key(self):
        return (self.predicate, len(self.args))

    @property
    def is_builtin(self) -> bool:
        return self.key in BUILTINS

    def with_args(self, args) -> "ModedAtom":
        return ModedAtom(self.predicate, args, self.mode)

    def with_io(self, inputs, outputs) -> "ModedAtom":
        args = [None] * len(self.args)
        for i, t in zip(self.mode.ins, inputs):
            args[i] = t
        for i, t in zip(self.mode.outs, outputs):
            args[i] = t
        return ModedAtom(self.predicate, args, self.mode)

    def __eq__(self, other):
        return (
            type(other) is ModedAtom
            and self.predicate == other.predicate
            and self.args == other.args
        )

    def __hash__(self):
        return hash((self.predicate, self.args))

    def __repr__(self):
        from .pretty import format_atom

        return format_atom(self)


@dataclass(frozen=True)
class Clause:
    head: ModedAtom
    body: tuple = ()

    def __repr__(self):
        from .pretty import format_clause

        return format_clause(self)


Query = tuple  # a query is a tuple of ModedAtom; () is the empty query
Syntax = Union[Var, Struct, ModedAtom, Clause, tuple, list]


def vars_of(obj) -> list:
    """Variables of a term/atom/clause/query in first-occurrence order."""
    acc: dict = {}
    _collect(obj, acc)
    return list(acc)


def _collect(obj, acc):
    if type(obj) is Var or type(obj) is Struct:
        K.collect_vars((obj,), acc)
    elif type(obj) is ModedAtom:
        K.collect_vars(obj.args, acc)
    elif type(obj) is Clause:
        K.collect_vars(obj.head.args, acc)
        for b in obj.body:
            K.collect_vars(b.args, acc)
    else:
        for x in obj:
            _collect(x, acc)


class Substitution:
    """Finite map from variables to terms; identity bindings are never stored."""

    __slots__ = ("_map",)

    def __init__(self, bindings=None):
        m = {}
        if bindings:
            for v, t in dict(bindings).items():
                if t != v:
                    m[v] = t
        self._map = m

    @classmethod
    def _raw(cls, m):
        s = cls.__new__(cls)
        s._map = m
        return s

    @property
    def mapping(self) -> dict:
        return self._map

    def domain(self) -> set:
        return set(self._map)

    def range_vars(self) -> set:
        acc: dict = {}
        K.collect_vars(tuple(self._map.values()), acc)
        return set(acc)

    def vars(self) -> set:
        return self.domain() | self.range_vars()

    def __call__(self, obj):
        return apply(self, obj)

    def compose(self, other: "Substitution") -> "Substitution":
        """self then other: x(self.compose(other)) == (x self) other."""
        om = other._map
        m = {}
        for v, t in self._map.items():
            t2 = K.apply_term(t, om)
            if t2 != v:
                m[v] = t2
        for v, t in om.items():
            if v not in self._map:
                m[v] = t
        return Substitution._raw(m)

    def restrict(self, variables) -> "Substitution":
        vs = set(variables)
        return Substitution._raw({v: t for v, t in self._map.items() if v in vs})

    def is_renaming(self) -> bool:
        vals = list(self._map.values())
        return all(type(t) is Var for t in vals) and set(vals) == set(self._map)

    def items(self):
        return self._map.items()

    def __len__(self):
        return len(self._map)

    def __bool__(self):
        return bool(self._map)

    def __eq__(self, other):
        return isinstance(other, Substitution) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        from .pretty import format_substitution

        return format_substitution(self)


EMPTY = Substitution()


def apply(s, obj):
    """Simultaneous application of ``s`` to a term, atom, clause or query."""
    m = s._map if isinstance(s, Substitution) else s
    if type(obj) is Var or type(obj) is Struct:
        return K.apply_term(obj, m)
    if type(obj) is ModedAtom:
        return ModedAtom(obj.predicate, K.apply_args(obj.args, m), obj.mode)
    if type(obj) is Clause:
        return Clause(apply(m, obj.head), tuple(apply(m, b) for b in obj.body))
    return tuple(apply(m, x) for x in obj)


def unify_mgu(a, b) -> Optional[Substitution]:
    """Idempotent, relevant mgu with occur check; None if not unifiable."""
    if type(a) is ModedAtom or type(b) is ModedAtom:
        if type(a) is not ModedAtom or type(b) is not ModedAtom or a.key != b.key:
            return None
        m = K.mgu_args(a.args, b.args)
    elif isinstance(a, tuple) and type(a) is not Struct:
        if len(a) != len(b):
            return None
        m = K.mgu_args(_flatten_args(a), _flatten_args(b)) if _same_shape(a, b) else None
    else:
        m = K.mgu_args((a,), (b,))
    return None if m is None else Substitution._raw(m)


def _same_shape(qa, qb) -> bool:
    return all(x.key == y.key for x, y in zip(qa, qb))


def _flatten_args(q) -> tuple:
    out = []
    for a in q:
        out.extend(a.args)
    return tuple(out)


def match(pattern, target) -> Optional[Substitution]:
    """One-way matcher: pattern·γ == target, binding pattern variables only."""
    if type(pattern) is ModedAtom:
        if type(target) is not ModedAtom or pattern.key != target.key:
            return None
        m = K.match_args(pattern.args, target.args)
    else:
        m = K.match_args((pattern,), (target,))
    if m is None:
        return None
    return Substitution(m)


def rename_apart(c, avoid=()) -> Clause:
    """Variant of ``c`` using globally fresh variable names."""
    vs = vars_of(c)
    ren = {v: fresh_var() for v in vs}
    if avoid and set(ren.values()) & set(avoid):  # pragma: no cover - counter is monotone
        raise RuntimeError("fresh-name collision")
    return apply(ren, c)


def renaming_for(obj) -> dict:
    return {v: fresh_var() for v in vars_of(obj)}


# -- variance -----------------------------------------------------------


def canonical_atom(a: ModedAtom, mapping=None) -> ModedAtom:
    """Variant of ``a`` with variables numbered inputs-first, left to right."""
    mapping = {} if mapping is None else mapping
    ins = K.canonical_args(a.inputs, mapping)
    outs = K.canonical_args(a.outputs, mapping)
    return a.with_io(ins, outs)


def canonical_query(q, mapping=None) -> tuple:
    mapping = {} if mapping is None else mapping
    return tuple(ModedAtom(a.predicate, K.canonical_args(a.args, mapping), a.mode) for a in q)


def canonical(obj):
    """Hashable normal form; equal iff the arguments are variants."""
    if type(obj) is ModedAtom:
        return canonical_atom(obj)
    if type(obj) is Var or type(obj) is Struct:
        return K.canonical_args((obj,), {})[0]
    if type(obj) is Clause:
        m: dict = {}
        return (canonical_query((obj.head,), m), canonical_query(obj.body, m))
    return canonical_query(obj)


def is_variant(a, b) -> bool:
    if type(a) is ModedAtom and type(b) is ModedAtom:
        return canonical_query((a,)) == canonical_query((b,))
    return canonical(a) == canonical(b)


# -- simply-local substitutions ------------------------------------------


def simply_moded_violation(head_inputs: tuple, body: Sequence[ModedAtom]):
    """None if simply-moded, else (body index, condition code, message).

    Codes: ``not-variable``, ``repeated``, ``head-input``, ``earlier-input``.
    """
    head_vars = set(vars_of(head_inputs))
    seen_out: set = set()
    earlier_in: set = set()
    for i, b in enumerate(body, start=1):
        outs = b.outputs
        for t in outs:
            if type(t) is not Var:
                return (i, "not-variable", "output argument %r is not a variable" % (t,))
            if t in seen_out:
                return (i, "repeated", "output variable %s is repeated" % t)
            seen_out.add(t)
        ov = set(outs)
        if ov & head_vars:
            return (i, "head-input", "output variable %s occurs in the head inputs" % sorted(ov & head_vars)[0])
        earlier_in |= set(vars_of(b.inputs))
        if ov & earlier_in:
            return (
                i,
                "earlier-input",
                "output variable %s occurs in an input at or before this atom" % sorted(ov & earlier_in)[0],
            )
    return None


def _split_clause(c):
    if type(c) is Clause:
        return c.head.inputs, tuple(c.body)
    return (), tuple(c)


@dataclass(frozen=True)
class SimplyLocalDecomposition:
    sigmas: tuple
    fresh_sets: tuple

    def composed(self) -> Substitution:
        out = EMPTY
        for s in self.sigmas:
            out = out.compose(s)
        return out


def check_simply_local(theta: Substitution, c) -> Optional[SimplyLocalDecomposition]:
    """Decompose ``theta`` as sigma_0..sigma_n, or None if it is not simply-local."""
    head_inputs, body = _split_clause(c)
    if simply_moded_violation(head_inputs, body) is not None:
        raise ContractError("check_simply_local needs a simply-moded clause or query")
    m = theta.mapping
    cvars = set(vars_of(c))
    t0 = set(vars_of(head_inputs))
    tvars = [t0] + [set(b.outputs) for b in body]
    allowed = set().union(*tvars)
    if not set(m) <= allowed:
        return None
    sigmas = []
    fresh_sets = []
    used: set = set()
    acc: dict = {}
    for i, dom in enumerate(tvars):
        sig = {v: t for v, t in m.items() if v in dom}
        if i == 0:
            base: set = set()
        else:
            base = set(vars_of(K.apply_args(body[i - 1].inputs, acc)))
        ran: dict = {}
        K.collect_vars(tuple(sig.values()), ran)
        fresh = set(ran) - base
        if fresh & cvars or fresh & used:
            return None
        used |= fresh
        sigmas.append(Substitution._raw(sig))
        fresh_sets.append(frozenset(fresh))
        acc = Substitution._raw(acc).compose(Substitution._raw(sig)).mapping
    dec = SimplyLocalDecomposition(tuple(sigmas), tuple(fresh_sets))
    if dec.composed() != theta:
        return None
    return dec


def decompose_simply_local_mgu(a: ModedAtom, h: ModedAtom):
    """Split an input-consuming mgu of ``a`` and ``h`` into (sigma_H0, sigma_A1).

    Returns None when no mgu leaves In(a) unchanged.
    """
    if simply_moded_violation((), (a,)) is not None:
        raise ContractError("selected atom %r is not simply-moded" % (a,))
    if a.key != h.key:
        return None
    s0 = K.match_args(h.inputs, a.inputs)
    if s0 is None:
        return None
    s1 = {}
    for t, u in zip(a.outputs, h.outputs):
        s1[t] = K.apply_term(u, s0)
    return Substitution(s0), Substitution(s1)
