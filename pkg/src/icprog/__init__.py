"""Input-consuming resolution toolkit for moded logic programs."""

from .analysis import (
    analyze,
    build_dependency_graph,
    check_input_consistent,
    check_lemma1_conditions,
    check_simple_delays,
    check_simply_moded,
    derive_delays,
)
from .bench import BenchRow, run_benchmarks
from .engine import (
    IC,
    LIC,
    DELAY,
    DELAY_ANY,
    LEFTMOST,
    answers,
    build_tree,
    compare_step_sets,
    enumerate_derivations,
    ic_resolvents,
    lnodes,
)
from .frontend import ParseError, Program, format_program, load_program, parse_program, parse_query
from .kernels import IMPLEMENTATION
from .semantics import (
    FixpointBounds,
    Interpretation,
    compute_model,
    compute_partial_model,
    partial_witness,
    success_witness,
    tsl_step,
)
from .terms import (
    Clause,
    ContractError,
    Mode,
    ModedAtom,
    Substitution,
    check_simply_local,
    decompose_simply_local_mgu,
    is_variant,
    unify_mgu,
)
from .termination import (
    LevelMapping,
    canonical_level_mapping,
    check_simply_acceptable,
    probe_termination,
)

__version__ = "0.1.0"
