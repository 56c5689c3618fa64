"""Random simply-moded queries and helpers for replaying derivations."""

import random

from icprog import engine as E
from icprog._types import Struct, Var
from icprog.semantics import signature
from icprog.terms import BUILTINS, EMPTY, ModedAtom, apply


def uses_builtins(p) -> bool:
    return any(a.key in BUILTINS for c in p.clauses for a in c.body)


def query_constants(p) -> tuple:
    return (0, 1) if uses_builtins(p) else ("a",)


def _term(rng, consts, funs, leaves, depth):
    if depth == 0 or not funs or rng.random() < 0.4:
        pool = list(consts) + list(leaves)
        return rng.choice(pool)
    f, n = rng.choice(funs)
    return Struct(f, [_term(rng, consts, funs, leaves, depth - 1) for _ in range(n)])


def random_query(p, rng: random.Random, max_atoms: int = 3, depth: int = 2):
    """A simply-moded query; later inputs may use earlier outputs."""
    consts, funs = signature(p, query_constants(p))
    consts = [Struct(c) for c in consts]
    keys = [k for k in p.predicates() if k in p.modes and k not in BUILTINS]
    outs_so_far = []
    q = []
    n_in = 0
    for k in range(rng.randint(1, max_atoms)):
        key = rng.choice(keys)
        mode = p.modes[key]
        ins = []
        for _ in mode.ins:
            leaves = [Var("I%d" % n_in)] + outs_so_far
            n_in += 1
            ins.append(_term(rng, consts, funs, leaves, depth))
        outs = [Var("O%d_%d" % (k, j)) for j in range(len(mode.outs))]
        outs_so_far.extend(outs)
        q.append(ModedAtom(key[0], [None] * key[1], mode).with_io(ins, outs))
    return tuple(q)


def cas_full(d):
    th = EMPTY
    for s in d.steps:
        th = th.compose(s.mgu)
    return th


def left_switch(p, q, d, split, int_range=(0, 3)):
    """Replay ``d`` doing the steps on descendants of q[:split] first.

    Every atom gets an identity when created, so a step is replayed on the
    same atom with the same clause. Returns (final query, q theta).
    """
    origin = ["A"] * split + ["B"] * (len(q) - split)
    ids = list(range(len(q)))
    fresh = len(q)
    plan = []
    for s in d.steps:
        i = s.index
        new = list(range(fresh, fresh + s.width))
        fresh += s.width
        plan.append((origin[i], ids[i], s.clause_id, new))
        ids = ids[:i] + new + ids[i + 1:]
        origin = origin[:i] + [origin[i]] * s.width + origin[i + 1:]
    plan = [x for x in plan if x[0] == "A"] + [x for x in plan if x[0] == "B"]
    th, cur, ids = EMPTY, tuple(q), list(range(len(q)))
    for _, aid, cid, new in plan:
        i = ids.index(aid)
        cand = [t for t in E.node_steps(cur, p, E.IC, int_range)[0] if t.index == i and t.clause_id == cid]
        assert len(cand) == 1, "replayed step is not available"
        th = th.compose(cand[0].mgu)
        ids = ids[:i] + new + ids[i + 1:]
        cur = cand[0].resolvent
    return cur, apply(th, tuple(q))
