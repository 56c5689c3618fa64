"""Acceptance checks; each test prints a PASS or FAIL line in the terminal summary."""

import io
import itertools
import json
import random
import time
from contextlib import redirect_stdout

import pytest

from icprog import engine as E
from icprog._types import Struct
from icprog.analysis import check_lemma1_conditions, check_simply_moded
from icprog.bench import MATCH, MISMATCH, run_benchmarks, summary
from icprog.cli import main
from icprog.frontend import parse_program, parse_query
from icprog.semantics import (
    FixpointBounds,
    _witnesses,
    compute_model,
    compute_partial_model,
    instance_set,
    partial_witness,
    signature,
    success_witness,
    universe,
    witness_instances,
)
from icprog.terms import ModedAtom, apply, canonical_atom, canonical_query, is_variant, vars_of
from icprog.termination import (
    LevelMapping,
    LevelUndefined,
    canonical_level_mapping,
    check_simply_acceptable,
    probe_queries,
    probe_termination,
)

from conftest import APPEND_DELAY_TEXT, APPEND_TEXT, CORPUS, corpus_programs
from querygen import cas_full, left_switch, random_query, uses_builtins

LOOP = ":- mode p(in).\n:- level p(X) is len(X).\np(X) :- p(X).\n"


def q_of(p, text):
    return parse_query(text, p)


def battery_bounds(p, pool):
    """Depth-2 universe over the program's symbols, with one extra constant if it has none."""
    consts = (0, 1) if uses_builtins(p) else (() if signature(p)[0] else ("a",))
    return FixpointBounds(max_iterations=8, term_depth=2, fresh_pool=pool, max_length=6, constants=consts, int_range=(0, 1))


# -- 1 ------------------------------------------------------------------------


@pytest.mark.criterion(1, "append([a,b],X,Y) under ic: one answer {Y/[a,b|X]}, depth <= 5, < 1 s")
def test_c01_append_success(tmp_path):
    f = tmp_path / "append.icp"
    f.write_text(APPEND_TEXT)
    t0 = time.perf_counter()
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(["--json", "run", str(f), "--query", "append([a,b],X,Y)", "--rule", "ic", "--depth", "5"])
    elapsed = time.perf_counter() - t0
    doc = json.loads(buf.getvalue())
    assert code == 0 and elapsed < 1.0
    assert len(doc["success"]) == 1
    p = parse_program(APPEND_TEXT, "append")
    q = q_of(p, "append([a,b],X,Y)")
    ans = E.answers(q, p, E.IC, 5)
    expected = q_of(p, "append([a,b],X,[a,b|X])")
    assert len(ans.success) == 1 and is_variant(next(iter(ans.success)), expected)
    (sub,) = ans.success_substitutions()
    assert is_variant(apply(sub, q), expected)


# -- 2 ------------------------------------------------------------------------


@pytest.mark.criterion(2, "append(X,[a,b],Y) and append(X,Y,Z) deadlock with no answers under every IC rule")
def test_c02_deadlock():
    plain = parse_program(APPEND_TEXT, "append")
    delayed = parse_program(APPEND_DELAY_TEXT, "append")
    cases = [(plain, r) for r in E.IC_RULES] + [(delayed, r) for r in E.IC_RULES + (E.DELAY, E.DELAY_ANY)]
    for text in ("append(X,[a,b],Y)", "append(X,Y,Z)"):
        for p, rule in cases:
            q = q_of(p, text)
            assert E.node_steps(q, p, rule) == ([], E.DEADLOCK), (text, rule)
            ans = E.answers(q, p, rule, 6)
            assert ans.success == frozenset()
            (d,) = list(E.enumerate_derivations(q, p, rule, 6))
            assert d.status == E.DEADLOCK and len(d) == 0


# -- 3 ------------------------------------------------------------------------


def _append_closed_form(p, levels, d, pool):
    mode = p.modes[("append", 3)]
    nil, out = Struct("[]"), set()
    for n in range(4):
        if n > d:
            break
        for ts in itertools.product(*[levels[d - i] for i in range(1, n + 1)]):
            for s in levels[d - n]:
                lst, res = nil, s
                for x in reversed(ts):
                    lst, res = Struct(".", (x, lst)), Struct(".", (x, res))
                a = ModedAtom("append", (lst, s, res), mode)
                if len(set(vars_of(a))) <= pool:
                    out.add(canonical_atom(a))
    return out


@pytest.mark.criterion(3, "bounded APPEND model equals the closed form over the depth-3 universe, < 30 s")
def test_c03_closed_form_model():
    p = parse_program(APPEND_TEXT, "append")
    t0 = time.perf_counter()
    b = FixpointBounds(max_iterations=5, term_depth=3, fresh_pool=1, constants=("a",))
    got = instance_set(compute_model(p, b), p, b)
    levels = universe(signature(p, b.constants), 3, 1)
    want = _append_closed_form(p, levels, 3, 1)
    elapsed = time.perf_counter() - t0
    assert got == want
    assert len(want) > 10_000 and elapsed < 30


# -- 4 ------------------------------------------------------------------------


@pytest.mark.criterion(4, "partial witnesses of append([a,b|X],Y,Z) include {Z/[a|Z']} and {Z/[a,b|Z']}")
def test_c04_partial_witness():
    p = parse_program(APPEND_TEXT, "append")
    q = q_of(p, "append([a,b|X],Y,Z)")
    b = FixpointBounds(max_iterations=6, term_depth=2, fresh_pool=1)
    got = witness_instances(q, partial_witness(q, p, b))
    for text in ("append([a,b|X],Y,[a|W])", "append([a,b|X],Y,[a,b|W])"):
        assert canonical_query(q_of(p, text)) in got, text


# -- 5 and 6 --------------------------------------------------------------------

# Programs whose depth-2 query space is large are checked with ground inputs.
HEAVY = {"append3_iiio", "color_map_oi", "mergesort_io", "qsort_io", "quicksort"}


@pytest.fixture(scope="module")
def equivalence_battery():
    t0 = time.perf_counter()
    stats = {"programs": 0, "queries": 0, "success": [], "partial": [], "presence": []}
    for p in corpus_programs():
        if not check_simply_moded(p):
            continue
        stats["programs"] += 1
        b = battery_bounds(p, 0 if p.name in HEAVY else 1)
        m, pm = compute_model(p, b), compute_partial_model(p, b)
        for q in probe_queries(p, b):
            stats["queries"] += 1
            ans = E.answers(q, p, E.IC, 6, int_range=b.int_range)
            if (success_witness(q, p, b, m) is not None) != bool(ans.success):
                stats["presence"].append((p.name, q))
            if witness_instances(q, _witnesses(q, m)) != set(ans.success):
                stats["success"].append((p.name, q))
            if witness_instances(q, partial_witness(q, p, b, pm)) != set(ans.partial):
                stats["partial"].append((p.name, q))
    stats["seconds"] = time.perf_counter() - t0
    return stats


@pytest.mark.criterion(5, "success witness exists iff the engine succeeds within depth 6; instances are variants; < 5 min")
def test_c05_success_equivalence(equivalence_battery):
    s = equivalence_battery
    print("programs=%d queries=%d seconds=%.1f" % (s["programs"], s["queries"], s["seconds"]))
    assert s["programs"] >= 25 and s["queries"] > 10_000
    assert s["presence"] == [] and s["success"] == []
    assert s["seconds"] < 300


@pytest.mark.criterion(6, "engine partial answers equal the partial witnesses on the same battery")
def test_c06_partial_equivalence(equivalence_battery):
    assert equivalence_battery["partial"] == []


# -- 7 ------------------------------------------------------------------------

SAMPLED_QUERIES = 600


def _delay_equivalent_programs():
    out = [parse_program(APPEND_DELAY_TEXT, "append_delay")]
    for p in corpus_programs():
        v = check_lemma1_conditions(p)
        if v.first and v.second:
            out.append(p)
    return out


@pytest.mark.criterion(7, "delay steps and IC steps coincide at every node to depth 6 where both sides of the lemma hold")
def test_c07_delay_equals_ic():
    progs = _delay_equivalent_programs()
    assert len(progs) >= 10
    bad = []
    for p in progs:
        rng = random.Random(p.name)
        b = battery_bounds(p, 1)
        qs = list(probe_queries(p, b))
        if len(qs) > SAMPLED_QUERIES:
            qs = rng.sample(qs, SAMPLED_QUERIES)
        qs += [random_query(p, rng) for _ in range(100)]
        for q in qs:
            if E.compare_step_sets(q, p, 6, b.int_range):
                bad.append((p.name, q))
    assert bad == []


# -- 8 ------------------------------------------------------------------------

DERIVATIONS = 500


@pytest.mark.criterion(8, "left-switching and input stability hold on 500 sampled derivations")
def test_c08_switching_and_stability():
    progs = [p for p in corpus_programs() if check_simply_moded(p)]
    rng = random.Random(2024)
    switched = stable = 0
    names = set()
    while switched < DERIVATIONS:
        p = rng.choice(progs)
        q = random_query(p, rng, max_atoms=3)
        if len(q) < 2:
            continue
        d = E.sample_derivation(q, p, E.IC, 12, rng, int_range=(0, 3))
        th = cas_full(d)
        outs = set(vars_of(tuple(t for a in q for t in a.outputs)))
        for x in vars_of(q):
            if x not in outs:
                assert apply(th, x) == x, (p.name, q, x)
        stable += 1
        split = rng.randint(1, len(q) - 1)
        final, qth = left_switch(p, q, d, split)
        assert canonical_query(qth + final) == canonical_query(apply(th, q) + d.final), (p.name, q, split)
        switched += 1
        names.add(p.name)
    assert stable >= DERIVATIONS and len(names) >= 10


# -- 9 ------------------------------------------------------------------------


@pytest.mark.criterion(9, "quicksort accepted and probed clean; APPEND canonical mapping accepted; loop rejected and flagged")
def test_c09_termination():
    qs = parse_program((CORPUS / "quicksort.icp").read_text(), "quicksort")
    b = FixpointBounds(max_iterations=4, term_depth=2, fresh_pool=0, constants=(0, 1), int_range=(0, 1))
    rep = check_simply_acceptable(qs, LevelMapping.declared(qs), b=b)
    assert rep.accepted and rep.instances >= 100
    probe = probe_termination(qs, 2, 64, b, int_range=(0, 1))
    assert probe.terminating and probe.queries > 0

    app = parse_program(APPEND_TEXT, "append")
    rep = check_simply_acceptable(app, canonical_level_mapping(app), b=FixpointBounds(max_iterations=5, term_depth=2, fresh_pool=1))
    assert rep.accepted and rep.instances >= 100

    loop = parse_program(LOOP, "loop")
    lb = FixpointBounds(max_iterations=3, term_depth=2, fresh_pool=1)
    size = LevelMapping.declared(loop, {("p", 1): _size_level(loop)})
    for lm in (LevelMapping.declared(loop), size, canonical_level_mapping(loop, 32)):
        assert check_simply_acceptable(loop, lm, b=lb).status == "rejected", lm.describe()
    with pytest.raises(LevelUndefined):
        canonical_level_mapping(loop, 32, probe=lb)
    assert not probe_termination(loop, 2, 64, lb).terminating


def _size_level(loop):
    alt = parse_program(":- mode p(in).\n:- level p(X) is 2*size(X) + 1.\np(X) :- p(X).\n", "loop")
    return alt.levels[("p", 1)]


# -- 10 -----------------------------------------------------------------------


@pytest.mark.criterion(10, "bench reproduces the SM/IC/L columns of the bundled table, >= 25 rows, no mismatch")
def test_c10_table():
    rows, status = run_benchmarks(CORPUS, CORPUS / "expected.csv")
    counts = summary(rows)
    assert status == 0 and counts[MISMATCH] == 0 and counts[MATCH] >= 25
