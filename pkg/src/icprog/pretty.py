"""Printing terms, atoms, clauses and substitutions in source syntax."""

from __future__ import annotations

import re

from ._types import CONS, Var

INFIX = {"=<", ">"}
_PLAIN = re.compile(r"^(?:[a-z][A-Za-z0-9_]*|\d+|\[\])$")


def format_functor(name: str) -> str:
    if _PLAIN.match(name):
        return name
    return "'%s'" % name.replace("'", "\\'") if not _symbolic(name) else name


def _symbolic(name: str) -> bool:
    return bool(name) and all(c in "+-*/\\^<>=~:.?@#&$" for c in name)


def format_term(t) -> str:
    if type(t) is Var:
        return str(t)
    f, args = t[0], t[1]
    if f == CONS and len(args) == 2:
        items = []
        while type(t) is not Var and t[0] == CONS and len(t[1]) == 2:
            items.append(format_term(t[1][0]))
            t = t[1][1]
        if type(t) is not Var and t[0] == "[]" and not t[1]:
            return "[" + ",".join(items) + "]"
        return "[" + ",".join(items) + "|" + format_term(t) + "]"
    if not args:
        return format_functor(f)
    if f in INFIX and len(args) == 2:
        return "%s %s %s" % (format_term(args[0]), f, format_term(args[1]))
    return "%s(%s)" % (format_functor(f), ",".join(format_term(a) for a in args))


def format_atom(a) -> str:
    if a.predicate in INFIX and len(a.args) == 2:
        return "%s %s %s" % (format_term(a.args[0]), a.predicate, format_term(a.args[1]))
    if not a.args:
        return format_functor(a.predicate)
    return "%s(%s)" % (format_functor(a.predicate), ",".join(format_term(x) for x in a.args))


def format_query(q) -> str:
    return ", ".join(format_atom(a) for a in q) if q else "true"


def format_clause(c) -> str:
    if not c.body:
        return format_atom(c.head) + "."
    return "%s :- %s." % (format_atom(c.head), format_query(c.body))


def format_substitution(s) -> str:
    items = sorted(s.mapping.items(), key=lambda kv: str(kv[0]))
    return "{" + ", ".join("%s/%s" % (v, format_term(t)) for v, t in items) + "}"
