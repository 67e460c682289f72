"""Conflict preorder checking for automata with silent and termination events."""

from .automata import (
    OMEGA_EVENT,
    TAU,
    Automaton,
    ParseError,
    RawAutomaton,
    ValidationError,
    Verdict,
    empty_automaton,
    extended_reach,
    format_aut,
    is_nonblocking,
    load_aut,
    marked_coreachable,
    marked_membership,
    parse_aut,
    read_aut,
    sync_compose,
    validate,
)
from .conflict import (
    build_counterexample,
    certain_conflict_marking,
    conf_membership,
    crucial_pairs,
    decide_equivalence,
    decide_preorder,
    verify_counterexample,
)
from .determinization import OMEGA, PairNode, build_pair_graph, det_initial, det_step
from .dot import dot_export
from .lc import INF, lc_fixpoint, lc_iterate, mc_closure
from .oracle import TestBudget, enumerate_small_tests, falsify_preorder, mc_trace_oracle, random_test

__version__ = "0.1.0"
