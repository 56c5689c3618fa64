import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from icprog._types import Struct
from icprog.frontend import parse_program, parse_query
from icprog.semantics import (
    GROUND,
    FixpointBounds,
    Interpretation,
    agreement,
    compute_model,
    compute_partial_model,
    dump_model,
    instance_set,
    partial_witness,
    success_witness,
    tsl_step,
    universe,
    witness_instances,
)
from icprog.terms import ContractError, ModedAtom, canonical_atom, vars_of

from conftest import APPEND_TEXT

NIL = Struct("[]")


def cons(h, t):
    return Struct(".", (h, t))


def depth(t):
    if not isinstance(t, Struct) or not t[1]:
        return 0
    return 1 + max(depth(a) for a in t[1])


def closed_form(p, levels, d, pool):
    """append([t1..tn], s, [t1..tn|s]) for every n fitting in depth ``d``."""
    mode = p.modes[("append", 3)]
    out = set()
    for n in range(d + 1):
        for ts in itertools.product(*[levels[d - i] for i in range(1, n + 1)]):
            for s in levels[d - n]:
                l, r = NIL, s
                for x in reversed(ts):
                    l, r = cons(x, l), cons(x, r)
                a = ModedAtom("append", (l, s, r), mode)
                if len(set(vars_of(a))) <= pool:
                    out.add(canonical_atom(a))
    return out


@pytest.mark.parametrize("pool", [0, 1])
def test_append_model_closed_form(append_program, pool):
    b = FixpointBounds(max_iterations=4, term_depth=2, fresh_pool=pool, constants=("a",))
    m = compute_model(append_program, b)
    levels = universe(((("[]", "a")), (((".", 2),))), 2, pool)
    assert instance_set(m, append_program, b) == closed_form(append_program, levels, 2, pool)


def test_success_witness_is_simply_local(append_program):
    b = FixpointBounds(max_iterations=6, term_depth=2, fresh_pool=1, constants=("a",))
    q = parse_query("append([a],[b],X), append(X,[c],Y)", append_program)
    w = success_witness(q, append_program, b)
    assert w is not None and w.decomposition is not None
    assert repr(w.theta.restrict(vars_of(q))) == "{X/[a,b], Y/[a,b,c]}"
    assert success_witness(parse_query("append(Z,[a],Y)", append_program), append_program, b) is None


def test_partial_witnesses_of_open_list(append_program):
    b = FixpointBounds(max_iterations=6, term_depth=2, fresh_pool=2, constants=("a", "b"))
    q = parse_query("append([a,b|X],Y,Z)", append_program)
    got = {repr(x) for x in witness_instances(q, partial_witness(q, append_program, b))}
    assert any(s.startswith("(append([a,b|") and ",[a|" in s for s in got)
    assert any(",[a,b|" in s for s in got)


def test_witness_search_requires_simply_moded_query(append_program):
    b = FixpointBounds(max_iterations=2, term_depth=1, fresh_pool=1)
    with pytest.raises(ContractError):
        next(partial_witness(parse_query("append(X,[a],X)", append_program), append_program, b))


def test_non_simply_moded_program_is_refused():
    p = parse_program(":- mode r(out,in).\nr(X,Y) :- r([X],Y).\n", "r")
    with pytest.raises(ContractError):
        compute_model(p, FixpointBounds())


def test_partial_model_contains_model(programs):
    b = FixpointBounds(max_iterations=4, term_depth=1, fresh_pool=1, constants=("a",), int_range=(0, 1))
    for name in ("append_iio", "member_io", "subset_oi", "lte_ii"):
        p = programs[name]
        m, pm = compute_model(p, b), compute_partial_model(p, b)
        assert instance_set(m, p) <= instance_set(pm, p), name


# -- symbolic interpretations agree with explicit enumeration --------------

DEPTH_MONOTONE = ["append_iio", "append_ooi", "list_i", "lte_ii", "lte_io", "member_ii", "member_oi", "select_oio"]


@pytest.mark.parametrize("name", DEPTH_MONOTONE)
@pytest.mark.parametrize("seeded", [False, True])
def test_symbolic_equals_ground(programs, name, seeded):
    p = programs[name]
    b = FixpointBounds(max_iterations=6, term_depth=2, fresh_pool=1, constants=("a",))
    build = compute_partial_model if seeded else compute_model
    assert agreement(p, build(p, b), build(p, b, GROUND)) == (set(), set())


@pytest.mark.parametrize("name", ["ack_iix", "append3_iiio"])
def test_ground_is_an_underapproximation(programs, name):
    # Intermediate terms may leave the bounded universe, so the explicit
    # model can only miss atoms, never add them.
    p = programs[name]
    b = FixpointBounds(max_iterations=6, term_depth=2, fresh_pool=1)
    sym_only, gnd_only = agreement(p, compute_partial_model(p, b), compute_partial_model(p, b, GROUND))
    assert gnd_only == set()


# -- the operator is monotone ----------------------------------------------

_B = FixpointBounds(max_iterations=4, term_depth=2, fresh_pool=0, constants=("a",))
_P = parse_program(APPEND_TEXT, "append")
_ATOMS = sorted(compute_partial_model(_P, _B, GROUND).atoms, key=repr)


def _interp(atoms):
    i = Interpretation(_B, GROUND)
    for a in atoms:
        i.add(a, 0)
    return i


@given(st.sets(st.sampled_from(_ATOMS), max_size=30), st.sets(st.sampled_from(_ATOMS), max_size=30))
def test_tsl_step_is_monotone(small, extra):
    lo, hi = tsl_step(_P, _interp(small)), tsl_step(_P, _interp(small | extra))
    assert set(lo.atoms) <= set(hi.atoms)


def test_iteration_reaches_fixpoint_and_dumps(append_program):
    b = FixpointBounds(max_iterations=8, term_depth=1, fresh_pool=1, max_length=3)
    m = compute_model(append_program, b)
    assert m.fixpoint and len(m) == 3
    text = dump_model(m, "append")
    assert text.splitlines()[0].startswith("% model append kind=symbolic seeded=no")
    assert "status=fixpoint" in text.splitlines()[0]
