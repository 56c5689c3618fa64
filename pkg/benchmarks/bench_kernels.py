"""Compiled kernels against the pure-Python fallback.

Runs each term kernel on the same inputs with both implementations, then
times an end-to-end workload (IC and LIC answers, bounded model instances) in two
subprocesses, one with ``ICPROG_PURE_PYTHON=1``.

    python benchmarks/bench_kernels.py [--repeat N] [--json]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

from icprog import _pykernels
from icprog._types import Struct, Var

try:
    from icprog import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def nested_list(items, tail):
    for x in reversed(items):
        tail = Struct(".", (x, tail))
    return tail


def workload():
    """Inputs shared by every kernel: lists of length 30 with partly shared variables."""
    xs = [Var("X%d" % i) for i in range(30)]
    ys = [Struct("f", (Var("Y%d" % i), Struct("a"))) for i in range(30)]
    left = (nested_list(xs, Var("T")), Struct("g", tuple(xs[:5])))
    right = (nested_list(ys, Struct("[]")), Struct("g", tuple(ys[:5])))
    subst = {x: y for x, y in zip(xs, ys)}
    return left, right, subst


def kernel_cases(k):
    left, right, subst = workload()
    return {
        "mgu_args": lambda: k.mgu_args(left, right),
        "match_args": lambda: k.match_args(left, right),
        "apply_args": lambda: k.apply_args(left, subst),
        "canonical_args": lambda: k.canonical_args(right, {}),
        "collect_vars": lambda: k.collect_vars(right, {}),
        "term_depth": lambda: k.term_depth(right[0]),
    }


def time_kernels(repeat: int) -> list:
    rows = []
    py = kernel_cases(_pykernels)
    cy = kernel_cases(_ckernels) if _ckernels else {}
    for name, fn in py.items():
        n = max(1, repeat)
        t_py = min(timeit.repeat(fn, number=n, repeat=3)) / n
        t_cy = min(timeit.repeat(cy[name], number=n, repeat=3)) / n if cy else None
        rows.append({"kernel": name, "python_us": t_py * 1e6, "compiled_us": t_cy * 1e6 if t_cy else None})
    return rows


END_TO_END = r"""
import time
from importlib import resources
from icprog import IMPLEMENTATION
from icprog.frontend import load_program, parse_query
from icprog.engine import answers, IC, LIC
from icprog.semantics import FixpointBounds, compute_model, instance_set
corpus = resources.files("icprog") / "corpus"
t0 = time.perf_counter()
p = load_program(str(corpus / "qsort_io.icp"))
answers(parse_query("qs([1,0,1],Ys)", p), p, IC, 30, int_range=(0, 1))
answers(parse_query("qs([1,0,1,0,1],Ys)", p), p, LIC, 60, int_range=(0, 1))
p = load_program(str(corpus / "append_iio.icp"))
b = FixpointBounds(max_iterations=5, term_depth=3, fresh_pool=1, constants=("a",))
instance_set(compute_model(p, b), p, b)
print(IMPLEMENTATION, time.perf_counter() - t0)
"""


def time_end_to_end() -> dict:
    out = {}
    for label, extra in (("compiled", {}), ("python", {"ICPROG_PURE_PYTHON": "1"})):
        env = dict(os.environ, **extra)
        res = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True, text=True, check=True)
        impl, secs = res.stdout.split()
        out[label] = {"implementation": impl, "seconds": float(secs)}
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000, help="calls per timing run")
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    kernels = time_kernels(args.repeat)
    e2e = time_end_to_end()
    if args.json:
        json.dump({"kernels": kernels, "end_to_end": e2e}, sys.stdout, indent=2)
        print()
        return 0
    print("%-16s %12s %12s %8s" % ("kernel", "python us", "compiled us", "speedup"))
    for r in kernels:
        cy = r["compiled_us"]
        print("%-16s %12.2f %12s %8s" % (
            r["kernel"], r["python_us"], "%.2f" % cy if cy else "n/a", "%.1fx" % (r["python_us"] / cy) if cy else "n/a"))
    for label, r in e2e.items():
        print("end-to-end %-9s (%s): %.2f s" % (label, r["implementation"], r["seconds"]))
    if e2e["python"]["seconds"] and e2e["compiled"]["implementation"] != "python":
        print("end-to-end speedup: %.2fx" % (e2e["python"]["seconds"] / e2e["compiled"]["seconds"]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
