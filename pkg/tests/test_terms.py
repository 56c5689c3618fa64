import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icprog import kernels as K
from icprog._types import Struct, Var
from icprog.terms import (
    EMPTY,
    Clause,
    ContractError,
    Mode,
    ModedAtom,
    Substitution,
    apply,
    canonical,
    check_simply_local,
    decompose_simply_local_mgu,
    is_flat,
    is_linear,
    is_variant,
    match,
    mklist,
    simply_moded_violation,
    unify_mgu,
    vars_of,
)

from strategies import atoms, bindings, ground_terms, terms

X, Y, Z, U, W = (Var(n) for n in "XYZUW")
a, b = Struct("a"), Struct("b")


def f(*xs):
    return Struct("f", xs)


def g(*xs):
    return Struct("g", xs)


def atom(pred, args, modes):
    return ModedAtom(pred, args, Mode(pred, tuple(modes)))


# -- basic term predicates --------------------------------------------------


def test_flat_and_linear():
    assert is_flat(a)
    assert is_flat(g(X, Y))
    assert not is_flat(g(X, X))
    assert not is_flat(f(a))
    assert not is_flat(X)
    assert is_linear([X, g(Y, Z)])
    assert not is_linear([X, f(X)])


def test_mklist_and_vars_order():
    t = mklist([X, a], Y)
    assert vars_of(t) == [X, Y]
    assert vars_of((g(Z, X), f(Z))) == [Z, X]


# -- unification ----------------------------------------------------------


def test_unify_occur_check():
    assert unify_mgu(X, f(X)) is None
    assert unify_mgu(g(X, Y), g(f(Y), a)) == Substitution({X: f(a), Y: a})


def test_match_is_one_way():
    assert match(g(X, Y), g(a, f(Z))) == Substitution({X: a, Y: f(Z)})
    assert match(g(X, X), g(a, b)) is None
    assert match(g(a, Y), g(X, b)) is None


@given(terms(), terms())
def test_mgu_unifies_and_is_idempotent_and_relevant(s, t):
    th = unify_mgu(s, t)
    if th is None:
        return
    assert apply(th, s) == apply(th, t)
    assert th.compose(th) == th
    assert th.vars() <= set(vars_of((s, t)))
    assert not (th.domain() & th.range_vars())


@given(terms(), terms(), bindings())
def test_mgu_is_most_general(s, t, extra):
    # Any unifier obtained by instantiating a unifier factors through the mgu.
    th = unify_mgu(s, t)
    if th is None:
        return
    other = th.compose(Substitution(extra))
    assert apply(other, s) == apply(other, t)
    assert apply(th.compose(other), s) == apply(other, s)


@given(bindings(), bindings(), terms())
def test_composition_law(s1, s2, t):
    a1, a2 = Substitution(s1), Substitution(s2)
    assert apply(a1.compose(a2), t) == apply(a2, apply(a1, t))


@given(bindings())
def test_no_identity_bindings(m):
    s = Substitution(m)
    assert all(v != t for v, t in s.items())


# -- variance -------------------------------------------------------------


@given(atoms(), st.permutations(["X", "Y", "Z", "U", "W"]))
def test_variant_under_renaming(at, perm):
    ren = {Var(x): Var(y + "1") for x, y in zip(["X", "Y", "Z", "U", "W"], perm)}
    assert is_variant(at, apply(ren, at))
    assert canonical(at) == canonical(apply(ren, at))


def test_non_variants():
    assert not is_variant(g(X, Y), g(X, X))
    assert not is_variant(g(X, a), g(X, Y))


# -- simply-moded ---------------------------------------------------------


def test_simply_moded_codes():
    q = atom("q", [X, Y], ["in", "out"])
    assert simply_moded_violation((), (q,)) is None
    assert simply_moded_violation((), (atom("q", [X, a], ["in", "out"]),))[1] == "not-variable"
    assert simply_moded_violation((), (q, atom("q", [Z, Y], ["in", "out"])))[1] == "repeated"
    assert simply_moded_violation((X,), (atom("q", [Z, X], ["in", "out"]),))[1] == "head-input"
    assert simply_moded_violation((), (atom("q", [Y, Y], ["in", "out"]),))[1] == "earlier-input"


# -- simply-local substitutions ------------------------------------------

# c: p(X, Y) <- q(X, Z) with p, q of mode (In, Out).
CLAUSE = Clause(atom("p", [X, Y], ["in", "out"]), (atom("q", [X, Z], ["in", "out"]),))
POOL = [U, W]


def _small_terms(vs):
    out = [a]
    out += list(vs)
    out += [f(v) for v in vs]
    out += [g(p, q) for p in vs for q in vs]
    return out


def _brute_force_simply_local():
    """All compositions sigma0 sigma1 allowed by the definition over a tiny universe."""
    found = set()
    for t0 in [X] + _small_terms(POOL):
        s0 = Substitution({X: t0})
        v0 = set() if t0 == X else set(vars_of(t0))
        base = set(vars_of(apply(s0, X)))
        v1_pool = [p for p in POOL if p not in v0]
        for t1 in [Z] + _small_terms(sorted(base | set(v1_pool))):
            fresh1 = set() if t1 == Z else set(vars_of(t1)) - base
            if fresh1 & {X, Y, Z} or fresh1 & v0:
                continue
            found.add(s0.compose(Substitution({Z: t1})))
    return found


BRUTE = _brute_force_simply_local()
CANDIDATES = sorted(
    {
        Substitution({X: t0, Z: t1})
        for t0 in [X] + _small_terms([U, W, Z])
        for t1 in [Z] + _small_terms([U, W, X])
    },
    key=repr,
)


@given(st.sampled_from(CANDIDATES))
def test_simply_local_matches_brute_force(th):
    dec = check_simply_local(th, CLAUSE)
    assert (dec is not None) == (th in BRUTE)
    if dec is not None:
        assert dec.composed() == th


def test_simply_local_positive_and_negative():
    assert check_simply_local(Substitution({X: f(U), Z: g(U, W)}), CLAUSE) is not None
    assert check_simply_local(EMPTY, CLAUSE) is not None
    # Y is the head output: never in the domain.
    assert check_simply_local(Substitution({Y: a}), CLAUSE) is None
    # Z may not pick up a variable that is fresh for sigma0 but absent from X sigma0.
    assert check_simply_local(Substitution({X: a, Z: U}), CLAUSE) is not None
    assert check_simply_local(Substitution({X: f(U), Z: f(X)}), CLAUSE) is None


def test_simply_local_needs_simply_moded_clause():
    bad = Clause(atom("p", [X, Y], ["in", "out"]), (atom("q", [X, X], ["in", "out"]),))
    with pytest.raises(ContractError):
        check_simply_local(EMPTY, bad)


@given(ground_terms())
def test_decompose_mgu_is_input_consuming(t):
    # a = p(t, V) selected against head p(f(X1), g(X1, Y1)).
    v = Var("V")
    sel = atom("p", [t, v], ["in", "out"])
    x1, y1 = Var("X1"), Var("Y1")
    head = atom("p", [f(x1), g(x1, y1)], ["in", "out"])
    res = decompose_simply_local_mgu(sel, head)
    th = unify_mgu(sel, head)
    if res is None:
        assert th is None or apply(th, sel).inputs != sel.inputs
        return
    s0, s1 = res
    full = s0.compose(s1)
    assert apply(full, sel) == apply(full, head)
    assert apply(full, sel).inputs == sel.inputs
    assert is_variant(apply(full, sel), apply(th, sel))


def test_decompose_rejects_non_simply_moded_atom():
    with pytest.raises(ContractError):
        decompose_simply_local_mgu(atom("p", [X, X], ["in", "out"]), atom("p", [Y, Z], ["in", "out"]))


# -- compiled and pure kernels agree -------------------------------------


@given(terms(), terms())
def test_kernels_agree(s, t):
    from icprog import _pykernels as P

    assert K.mgu_args((s,), (t,)) == P.mgu_args((s,), (t,))
    assert K.match_args((s,), (t,)) == P.match_args((s,), (t,))
    assert K.canonical_args((s, t), {}) == P.canonical_args((s, t), {})
    assert K.term_depth(s) == P.term_depth(s)
    m = {X: t}
    assert K.apply_term(s, m) == P.apply_term(s, m)
    acc1, acc2 = {}, {}
    K.collect_vars((s, t), acc1)
    P.collect_vars((s, t), acc2)
    assert list(acc1) == list(acc2)


def test_brute_force_space_is_nontrivial():
    assert len(BRUTE) > 20
    assert sum(1 for c in CANDIDATES if c not in BRUTE) > 20
    assert list(itertools.islice(CANDIDATES, 1))
