"""Reader for ``.icp`` program files and queries."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ._types import CONS, NIL, Struct, Var
from .pretty import format_atom, format_term
from .terms import BUILTINS, IN, OUT, Clause, Mode, ModedAtom, apply, vars_of

NONVAR = "nonvar"
GROUND = "ground"
NORMS = ("len", "size")

_RESERVED_VAR = re.compile(r"^_[A-Z]\d+$")


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0, source: str = "<input>"):
        self.message = message
        self.line = line
        self.col = col
        self.source = source
        super().__init__("%s:%d:%d: %s" % (source, line, col, message))


@dataclass(frozen=True)
class DelayDecl:
    """Guard on a predicate: conjunction of (position, kind) tests."""

    predicate: tuple
    conditions: tuple = ()

    def positions(self, kind: Optional[str] = None) -> tuple:
        return tuple(p for p, k in self.conditions if kind is None or k == kind)

    def allows(self, atom: ModedAtom) -> bool:
        for pos, kind in self.conditions:
            t = atom.args[pos]
            if kind == NONVAR:
                if type(t) is Var:
                    return False
            elif vars_of(t):
                return False
        return True


@dataclass(frozen=True)
class LevelDecl:
    """c + sum(k * norm(arg_i)) over input positions."""

    predicate: tuple
    constant: int = 0
    terms: tuple = ()  # (coefficient, norm, position)


@dataclass
class Program:
    clauses: list = field(default_factory=list)
    modes: dict = field(default_factory=dict)
    delays: dict = field(default_factory=dict)
    levels: dict = field(default_factory=dict)
    spans: list = field(default_factory=list)
    name: str = "program"

    def clauses_for(self, key) -> list:
        return [c for c in self.clauses if c.head.key == key]

    def defined(self) -> set:
        return {c.head.key for c in self.clauses}

    def predicates(self) -> list:
        keys = dict.fromkeys(self.modes)
        for c in self.clauses:
            keys[c.head.key] = None
            for b in c.body:
                keys[b.key] = None
        return list(keys)

    def with_delays(self, delays: dict) -> "Program":
        return Program(list(self.clauses), dict(self.modes), dict(delays), dict(self.levels), list(self.spans), self.name)

    def atom(self, predicate: str, args) -> ModedAtom:
        key = (predicate, len(args))
        return ModedAtom(predicate, args, self.modes[key])


# -- lexer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|%[^\n]*)
  | (?P<neck>:-)
  | (?P<op>=<|>=|>|<|\+|\*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<num>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*)
  | (?P<quoted>'(?:[^'\\]|\\.)*')
  | (?P<punct>[()\[\],|.])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _lex(text: str, source: str) -> list:
    toks = []
    pos = 0
    line, lstart = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unexpected character %r" % text[pos], line, pos - lstart + 1, source)
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            if kind == "quoted":
                s = re.sub(r"\\(.)", r"\1", s[1:-1])
                kind = "name"
            toks.append(_Tok(kind, s, line, m.start() - lstart + 1))
        nl = m.group().count("\n")
        if nl:
            line += nl
            lstart = m.start() + m.group().rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - lstart + 1))
    return toks


# -- parser ---------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, source: str):
        self.toks = _lex(text, source)
        self.i = 0
        self.source = source
        self.anon = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, self.source)

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def take(self, kind, text=None) -> _Tok:
        if not self.at(kind, text):
            want = text or kind
            self.error("expected %s, found %r" % (want, self.tok.text or "end of input"))
        t = self.tok
        self.i += 1
        return t

    def accept(self, kind, text=None) -> bool:
        if self.at(kind, text):
            self.i += 1
            return True
        return False

    # terms
    def term(self):
        t = self.tok
        if t.kind == "var":
            self.i += 1
            if t.text == "_":
                self.anon += 1
                return Var("_N%d" % self.anon)
            if _RESERVED_VAR.match(t.text):
                self.error("variable name %s is reserved" % t.text, t)
            return Var(t.text)
        if t.kind == "num":
            self.i += 1
            return Struct(str(int(t.text)))
        if t.kind == "name" or (t.kind == "op" and self.toks[self.i + 1].text == "("):
            self.i += 1
            if self.accept("punct", "("):
                args = self.arglist()
                return Struct(t.text, args)
            return Struct(t.text)
        if self.accept("punct", "["):
            if self.accept("punct", "]"):
                return NIL
            items = [self.term()]
            while self.accept("punct", ","):
                items.append(self.term())
            tail = NIL
            if self.accept("punct", "|"):
                tail = self.term()
            self.take("punct", "]")
            for x in reversed(items):
                tail = Struct(CONS, (x, tail))
            return tail
        self.error("expected a term, found %r" % (t.text or "end of input"))

    def arglist(self) -> list:
        args = [self.term()]
        while self.accept("punct", ","):
            args.append(self.term())
        self.take("punct", ")")
        return args

    def raw_atom(self):
        """(name, args, token) for an atom, including infix comparisons."""
        t = self.tok
        if t.kind == "name" or (t.kind == "op" and self.toks[self.i + 1].text == "("):
            start = self.i
            lhs = self.term()
            if self.at("op") and self.tok.text in ("=<", ">"):
                op = self.take("op").text
                return (op, [lhs, self.term()], t)
            self.i = start
            self.i += 1
            if self.accept("punct", "("):
                return (t.text, self.arglist(), t)
            return (t.text, [], t)
        lhs = self.term()
        if self.at("op") and self.tok.text in ("=<", ">"):
            op = self.take("op").text
            return (op, [lhs, self.term()], t)
        self.error("expected an atom", t)

    def body(self) -> list:
        atoms = [self.raw_atom()]
        while self.accept("punct", ","):
            atoms.append(self.raw_atom())
        return atoms


def _resolve_atom(raw, modes, source) -> ModedAtom:
    name, args, tok = raw
    key = (name, len(args))
    mode = modes.get(key)
    if mode is None:
        if key in BUILTINS:
            mode = Mode(name, (IN, IN))
        else:
            arities = sorted(a for (n, a) in modes if n == name)
            if arities:
                raise ParseError(
                    "arity mismatch: %s used with %d arguments, declared %s"
                    % (name, len(args), "/".join(map(str, arities))),
                    tok.line, tok.col, source,
                )
            raise ParseError("no mode declared for %s/%d" % key, tok.line, tok.col, source)
    return ModedAtom(name, args, mode)


def _keyword(p: _Parser) -> _Tok:
    """Directive keywords are case-insensitive, so ``MODE`` lexes as a variable."""
    if p.at("var"):
        return p.take("var")
    return p.take("name")


def _directive(p: _Parser, raw_modes, raw_delays, raw_levels):
    kw = _keyword(p)
    word = kw.text.lower()
    if word == "mode":
        name, args, tok = p.raw_atom()
        pos = []
        for a in args:
            s = a[0].lower() if type(a) is Struct and not a[1] else None
            if type(a) is Var and a.lower() in (IN, OUT):
                s = a.lower()
            if s not in (IN, OUT):
                p.error("mode argument must be in or out", tok)
            pos.append(s)
        raw_modes.append((name, tuple(pos), tok))
    elif word == "delay":
        name, args, tok = p.raw_atom()
        p.take("name", "until")
        conds = [_delay_cond(p)]
        while p.accept("punct", ",") or p.accept("name", "and"):
            conds.append(_delay_cond(p))
        raw_delays.append((name, args, conds, tok))
    elif word == "level":
        name, args, tok = p.raw_atom()
        p.take("name", "is")
        raw_levels.append((name, args, _level_expr(p), tok))
    else:
        p.error("unknown directive %r" % kw.text, kw)
    p.take("punct", ".")


def _delay_cond(p: _Parser):
    kind = p.take("name")
    if kind.text not in (NONVAR, GROUND):
        p.error("delay condition must be nonvar(..) or ground(..)", kind)
    p.take("punct", "(")
    v = p.term()
    p.take("punct", ")")
    if type(v) is not Var:
        p.error("delay condition must test a head variable", kind)
    return (kind.text, v, kind)


def _level_expr(p: _Parser):
    """Sum of integer constants, norm(V) and k*norm(V)."""
    const = 0
    terms = []
    while True:
        t = p.tok
        coef = 1
        if t.kind == "num":
            p.i += 1
            if p.accept("op", "*"):
                coef = int(t.text)
            else:
                const += int(t.text)
                if not p.accept("op", "+"):
                    break
                continue
        norm = p.take("name")
        if norm.text not in NORMS:
            p.error("unknown norm %r" % norm.text, norm)
        p.take("punct", "(")
        v = p.term()
        p.take("punct", ")")
        if type(v) is not Var:
            p.error("norms apply to head variables", norm)
        terms.append((coef, norm.text, v, norm))
        if not p.accept("op", "+"):
            break
    return const, terms


def parse_program(text: str, name: str = "program", source: Optional[str] = None) -> Program:
    """Parse program text; raises ParseError with a line/column on failure."""
    source = source or name
    p = _Parser(text, source)
    raw_modes, raw_delays, raw_levels, raw_clauses = [], [], [], []
    while not p.at("eof"):
        if p.accept("neck"):
            _directive(p, raw_modes, raw_delays, raw_levels)
            continue
        start = p.tok
        head = p.raw_atom()
        if head[0] in ("=<", ">"):
            p.error("cannot define a builtin", start)
        body = p.body() if p.accept("neck") else []
        p.take("punct", ".")
        raw_clauses.append((head, body, start))

    modes = {}
    for name_, pos, tok in raw_modes:
        key = (name_, len(pos))
        if key in modes:
            raise ParseError("duplicate mode declaration for %s/%d" % key, tok.line, tok.col, source)
        modes[key] = Mode(name_, pos)

    clauses, spans = [], []
    for head, body, tok in raw_clauses:
        h = _resolve_atom(head, modes, source)
        b = tuple(_resolve_atom(x, modes, source) for x in body)
        clauses.append(Clause(h, b))
        spans.append((tok.line, tok.col))
        for a in b:
            if a.key in BUILTINS:
                modes.setdefault(a.key, a.mode)

    delays = {}
    for name_, args, conds, tok in raw_delays:
        key = (name_, len(args))
        if key not in modes and key not in BUILTINS:
            raise ParseError("delay for undeclared predicate %s/%d" % key, tok.line, tok.col, source)
        index = {}
        for i, a in enumerate(args):
            if type(a) is not Var:
                raise ParseError("delay heads take distinct variables or _", tok.line, tok.col, source)
            if a in index:
                raise ParseError("repeated variable %s in delay head" % a, tok.line, tok.col, source)
            index[a] = i
        seen, out = set(), []
        for kind, v, ktok in conds:
            if v not in index or v.startswith("_N"):
                raise ParseError("delay condition on unknown variable %s" % v, ktok.line, ktok.col, source)
            pos = index[v]
            if pos in seen:
                raise ParseError("two conditions on one position", ktok.line, ktok.col, source)
            seen.add(pos)
            out.append((pos, kind))
        if key in delays:
            raise ParseError("duplicate delay declaration for %s/%d" % key, tok.line, tok.col, source)
        delays[key] = DelayDecl(key, tuple(out))

    levels = {}
    for name_, args, (const, terms), tok in raw_levels:
        key = (name_, len(args))
        mode = modes.get(key)
        if mode is None:
            raise ParseError("level for undeclared predicate %s/%d" % key, tok.line, tok.col, source)
        index = {a: i for i, a in enumerate(args) if type(a) is Var}
        out = []
        for coef, norm, v, ntok in terms:
            if v not in index:
                raise ParseError("level refers to unknown variable %s" % v, ntok.line, ntok.col, source)
            if mode.positions[index[v]] != IN:
                raise ParseError("level mappings may only use input positions", ntok.line, ntok.col, source)
            out.append((coef, norm, index[v]))
        levels[key] = LevelDecl(key, const, tuple(out))

    return Program(clauses, modes, delays, levels, spans, name)


def load_program(path) -> Program:
    path = Path(path)
    return parse_program(path.read_text(encoding="utf-8"), name=path.stem, source=str(path))


def parse_query(text: str, program: Program):
    """A tuple of moded atoms; blank text or ``true`` is the empty query."""
    p = _Parser(text, "<query>")
    p.anon = 10_000
    if p.at("eof") or (p.at("name", "true") and p.toks[p.i + 1].kind in ("eof", "punct")):
        if p.accept("name", "true"):
            p.accept("punct", ".")
        p.take("eof")
        return ()
    raws = p.body()
    p.accept("punct", ".")
    p.take("eof")
    return tuple(_resolve_atom(r, program.modes, "<query>") for r in raws)


# -- printing -------------------------------------------------------------


def _var_text(v: Var) -> str:
    return "_" if v.startswith("_N") else str(v)


def _print_clause(c: Clause) -> str:
    ren = {v: Var(_var_text(v)) for v in vars_of(c)}
    c = apply(ren, c)
    if not c.body:
        return format_atom(c.head) + "."
    return "%s :-\n    %s." % (format_atom(c.head), ",\n    ".join(format_atom(b) for b in c.body))


def format_program(p: Program) -> str:
    lines = []
    for key, mode in p.modes.items():
        lines.append(":- mode %s(%s)." % (_fn(key[0]), ",".join(mode.positions)))
    for key, d in p.delays.items():
        names = ["X%d" % (i + 1) for i in range(key[1])]
        used = {pos for pos, _ in d.conditions}
        head = ",".join(n if i in used else "_" for i, n in enumerate(names))
        conds = ", ".join("%s(%s)" % (k, names[pos]) for pos, k in d.conditions)
        lines.append(":- delay %s(%s) until %s." % (_fn(key[0]), head, conds))
    for key, lv in p.levels.items():
        names = ["X%d" % (i + 1) for i in range(key[1])]
        used = {pos for _, _, pos in lv.terms}
        head = ",".join(n if i in used else "_" for i, n in enumerate(names))
        parts = [("%d*%s(%s)" % (k, nm, names[pos]) if k != 1 else "%s(%s)" % (nm, names[pos])) for k, nm, pos in lv.terms]
        if lv.constant or not parts:
            parts.append(str(lv.constant))
        lines.append(":- level %s(%s) is %s." % (_fn(key[0]), head, " + ".join(parts)))
    if lines:
        lines.append("")
    lines.extend(_print_clause(c) for c in p.clauses)
    return "\n".join(lines) + "\n"


def _fn(name: str) -> str:
    return format_term(Struct(name))
