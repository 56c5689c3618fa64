"""Pure-Python term kernels.

``_ckernels.pyx`` implements exactly the same functions; ``kernels`` picks
one at import time.  Keep the two files in lockstep.
"""

from ._types import Struct, Var

IMPLEMENTATION = "python"


def apply_term(t, s):
    if type(t) is Var:
        r = s.get(t)
        return t if r is None else r
    args = t[1]
    if not args:
        return t
    return Struct(t[0], [apply_term(a, s) for a in args])


def apply_args(args, s):
    if not s:
        return args
    return tuple([apply_term(a, s) for a in args])


def _walk(t, s):
    while type(t) is Var:
        r = s.get(t)
        if r is None:
            return t
        t = r
    return t


def _occurs(v, t, s):
    t = _walk(t, s)
    if type(t) is Var:
        return t == v
    for a in t[1]:
        if _occurs(v, a, s):
            return True
    return False


def _resolve(t, s):
    t = _walk(t, s)
    if type(t) is Var:
        return t
    args = t[1]
    if not args:
        return t
    return Struct(t[0], [_resolve(a, s) for a in args])


def _unify(a, b, s, frozen):
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = _walk(x, s)
        y = _walk(y, s)
        if x is y or x == y:
            continue
        if type(x) is Var and (frozen is None or x not in frozen):
            if _occurs(x, y, s):
                return False
            s[x] = y
        elif type(y) is Var and (frozen is None or y not in frozen):
            if _occurs(y, x, s):
                return False
            s[y] = x
        elif type(x) is Var or type(y) is Var:
            return False
        else:
            xa = x[1]
            ya = y[1]
            if x[0] != y[0] or len(xa) != len(ya):
                return False
            for i in range(len(xa) - 1, -1, -1):
                stack.append((xa[i], ya[i]))
    return True


def mgu_args(xs, ys, frozen=None):
    """Idempotent mgu of two argument vectors, or None.

    Variables in ``frozen`` behave as constants.
    """
    if len(xs) != len(ys):
        return None
    s = {}
    for i in range(len(xs)):
        if not _unify(xs[i], ys[i], s, frozen):
            return None
    return {v: _resolve(t, s) for v, t in s.items()}


def _match(p, t, s):
    if type(p) is Var:
        r = s.get(p)
        if r is None:
            s[p] = t
            return True
        return r == t
    if type(t) is Var:
        return False
    pa = p[1]
    ta = t[1]
    if p[0] != t[0] or len(pa) != len(ta):
        return False
    for i in range(len(pa)):
        if not _match(pa[i], ta[i], s):
            return False
    return True


def match_args(patterns, targets, s=None):
    """One-way matcher binding pattern variables only, or None."""
    if len(patterns) != len(targets):
        return None
    s = {} if s is None else dict(s)
    for i in range(len(patterns)):
        if not _match(patterns[i], targets[i], s):
            return None
    return s


def _canon(t, mapping):
    if type(t) is Var:
        r = mapping.get(t)
        if r is None:
            r = Var("_C%d" % len(mapping))
            mapping[t] = r
        return r
    args = t[1]
    if not args:
        return t
    return Struct(t[0], [_canon(a, mapping) for a in args])


def canonical_args(args, mapping):
    return tuple([_canon(a, mapping) for a in args])


def _vars(t, acc):
    if type(t) is Var:
        acc[t] = None
        return
    for a in t[1]:
        _vars(a, acc)


def collect_vars(args, acc):
    for a in args:
        _vars(a, acc)
    return acc


def term_depth(t):
    if type(t) is Var or not t[1]:
        return 0
    m = 0
    for a in t[1]:
        d = term_depth(a)
        if d > m:
            m = d
    return m + 1
