"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``ICPROG_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

if os.environ.get("ICPROG_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

IMPLEMENTATION = _impl.IMPLEMENTATION
apply_term = _impl.apply_term
apply_args = _impl.apply_args
mgu_args = _impl.mgu_args
match_args = _impl.match_args
canonical_args = _impl.canonical_args
collect_vars = _impl.collect_vars
term_depth = _impl.term_depth

__all__ = [
    "IMPLEMENTATION",
    "apply_term",
    "apply_args",
    "mgu_args",
    "match_args",
    "canonical_args",
    "collect_vars",
    "term_depth",
]
