# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernels; mirrors ``_pykernels`` function for function."""

from icprog._types import Struct, Var

IMPLEMENTATION = "cython"

cdef object _Var = Var
cdef object _Struct = Struct


cdef inline bint _isvar(object t):
    return type(t) is _Var


cpdef object apply_term(object t, dict s):
    cdef tuple args
    cdef object r
    if _isvar(t):
        r = s.get(t)
        return t if r is None else r
    args = <tuple>t[1]
    if not args:
        return t
    return _Struct(t[0], [apply_term(a, s) for a in args])


cpdef tuple apply_args(tuple args, dict s):
    if not s:
        return args
    return tuple([apply_term(a, s) for a in args])


cdef object _walk(object t, dict s):
    cdef object r
    while _isvar(t):
        r = s.get(t)
        if r is None:
            return t
        t = r
    return t


cdef bint _occurs(object v, object t, dict s):
    t = _walk(t, s)
    if _isvar(t):
        return t == v
    for a in <tuple>t[1]:
        if _occurs(v, a, s):
            return True
    return False


cdef object _resolve(object t, dict s):
    cdef tuple args
    t = _walk(t, s)
    if _isvar(t):
        return t
    args = <tuple>t[1]
    if not args:
        return t
    return _Struct(t[0], [_resolve(a, s) for a in args])


cdef bint _unify(object a, object b, dict s, object frozen):
    cdef list stack = [(a, b)]
    cdef tuple xa, ya
    cdef Py_ssize_t i
    cdef bint nofrozen = frozen is None
    while stack:
        x, y = stack.pop()
        x = _walk(x, s)
        y = _walk(y, s)
        if x is y or x == y:
            continue
        if _isvar(x) and (nofrozen or x not in frozen):
            if _occurs(x, y, s):
                return False
            s[x] = y
        elif _isvar(y) and (nofrozen or y not in frozen):
            if _occurs(y, x, s):
                return False
            s[y] = x
        elif _isvar(x) or _isvar(y):
            return False
        else:
            xa = <tuple>x[1]
            ya = <tuple>y[1]
            if x[0] != y[0] or len(xa) != len(ya):
                return False
            for i in range(len(xa) - 1, -1, -1):
                stack.append((xa[i], ya[i]))
    return True


def mgu_args(tuple xs, tuple ys, frozen=None):
    cdef dict s
    cdef Py_ssize_t i
    if len(xs) != len(ys):
        return None
    s = {}
    for i in range(len(xs)):
        if not _unify(xs[i], ys[i], s, frozen):
            return None
    return {v: _resolve(t, s) for v, t in s.items()}


cdef bint _match(object p, object t, dict s):
    cdef object r
    cdef tuple pa, ta
    cdef Py_ssize_t i
    if _isvar(p):
        r = s.get(p)
        if r is None:
            s[p] = t
            return True
        return r == t
    if _isvar(t):
        return False
    pa = <tuple>p[1]
    ta = <tuple>t[1]
    if p[0] != t[0] or len(pa) != len(ta):
        return False
    for i in range(len(pa)):
        if not _match(pa[i], ta[i], s):
            return False
    return True


def match_args(tuple patterns, tuple targets, s=None):
    cdef dict d
    cdef Py_ssize_t i
    if len(patterns) != len(targets):
        return None
    d = {} if s is None else dict(s)
    for i in range(len(patterns)):
        if not _match(patterns[i], targets[i], d):
            return None
    return d


cdef object _canon(object t, dict mapping):
    cdef object r
    cdef tuple args
    if _isvar(t):
        r = mapping.get(t)
        if r is None:
            r = _Var("_C%d" % len(mapping))
            mapping[t] = r
        return r
    args = <tuple>t[1]
    if not args:
        return t
    return _Struct(t[0], [_canon(a, mapping) for a in args])


cpdef tuple canonical_args(tuple args, dict mapping):
    return tuple([_canon(a, mapping) for a in args])


cdef void _vars(object t, dict acc):
    if _isvar(t):
        acc[t] = None
        return
    for a in <tuple>t[1]:
        _vars(a, acc)


cpdef dict collect_vars(tuple args, dict acc):
    for a in args:
        _vars(a, acc)
    return acc


cpdef int term_depth(object t):
    cdef int m = 0
    cdef int d
    if _isvar(t) or not t[1]:
        return 0
    for a in <tuple>t[1]:
        d = term_depth(a)
        if d > m:
            m = d
    return m + 1
