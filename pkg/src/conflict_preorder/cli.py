"""``conflict`` command-line tool.

Exit status: 0 when the property holds or the command succeeded, 1 when it
fails (blocking, preorder fails, not equivalent, certain conflict), 2 on
usage, parse or I/O errors.  The first line of standard output is always a
single machine-readable record.
"""

from __future__ import annotations

import argparse
import sys

from . import kernels
from .automata import ParseError, ValidationError, blocking_states, format_aut, is_nonblocking, read_aut, sync_compose
from .conflict import (
    analyse_preorder,
    build_counterexample,
    certain_conflict_marking,
    conf_membership,
    decide_preorder,
    verify_counterexample,
)
from .determinization import format_det, format_pair
from .dot import dot_export
from .oracle import TestBudget, falsify_preorder


class UsageError(Exception):
    pass


def format_trace(trace) -> str:
    return ",".join(trace)


def preorder_record(verdict) -> str:
    if verdict.holds:
        return "PREORDER holds"
    return f"PREORDER fails pair={format_pair(verdict.failing_pair)} trace={format_trace(verdict.witness_trace)}"


def _write(path, text):
    try:
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _dot(path, graph, levels, full):
    try:
        dot_export(graph, levels, path, full)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def cmd_parse(args, out):
    aut = read_aut(args.file)
    out(f"PARSE ok name={aut.name} states={len(aut.states)} transitions={len(aut.transitions)}")
    out(format_aut(aut), end="")
    return 0


def cmd_nonblocking(args, out):
    aut = read_aut(args.file)
    if is_nonblocking(aut):
        out("nonblocking")
        return 0
    out("blocking")
    out("blocking states: " + " ".join(sorted(blocking_states(aut))))
    return 1


def cmd_compose(args, out):
    composed = sync_compose(read_aut(args.first), read_aut(args.second))
    text = format_aut(composed)
    status = "nonblocking" if is_nonblocking(composed) else "blocking"
    if args.output:
        _write(args.output, text)
        out(f"COMPOSE {status} states={len(composed.states)} transitions={len(composed.transitions)}")
    else:
        out(text, end="")
    return 0


def cmd_certain(args, out):
    b = read_aut(args.file)
    marking = certain_conflict_marking(b)
    if args.trace is not None:
        trace = args.trace.split()
        hit = conf_membership(b, marking, trace)
        out(f"CONF {'yes' if hit else 'no'} trace={format_trace(trace)}")
        return 1 if hit else 0
    marked = sorted(marking.marked, key=lambda x: sorted(x))
    out(f"CERTAIN {'nonempty' if marked else 'empty'} marked={len(marked)}")
    for x in marked:
        out(f"marked {format_det(x)}")
    return 1 if marked else 0


def cmd_lc(args, out):
    analysis = analyse_preorder(read_aut(args.first), read_aut(args.second), args.backend)
    graph, levels = analysis.graph, analysis.levels
    out(f"LC nodes={len(graph)} finite={len(levels.finite())} rounds={levels.rounds}")
    for node in graph.nodes:
        level = levels[node]
        out(f"{format_pair(node)} {'inf' if level == float('inf') else level}")
    if args.dot:
        _dot(args.dot, graph, levels, args.full)
    return 0


def cmd_preorder(args, out):
    a, b = read_aut(args.first), read_aut(args.second)
    analysis = analyse_preorder(a, b, args.backend)
    verdict = analysis.verdict
    out(preorder_record(verdict))
    if args.dot:
        _dot(args.dot, analysis.graph, analysis.levels, args.full)
    if verdict.holds:
        return 0
    if args.counterexample:
        t = build_counterexample(a, b, verdict)
        ok = verify_counterexample(a, b, t)
        _write(args.counterexample, format_aut(t))
        out(f"counterexample written to {args.counterexample} ({'verified' if ok else 'NOT verified'})")
    return 1


def cmd_equiv(args, out):
    a, b = read_aut(args.first), read_aut(args.second)
    forward = decide_preorder(a, b, args.backend)
    backward = decide_preorder(b, a, args.backend)
    same = forward.holds and backward.holds
    out(f"EQUIV {'yes' if same else 'no'}")
    out(preorder_record(forward))
    out(preorder_record(backward))
    return 0 if same else 1


def cmd_falsify(args, out):
    a, b = read_aut(args.first), read_aut(args.second)
    probes = [read_aut(p) for p in args.probe]
    budget = TestBudget(max_states=args.max_states, samples=args.budget, seed=args.seed)
    witness = falsify_preorder(a, b, budget, probes)
    if witness is None:
        out(f"FALSIFY none samples={budget.samples} seed={budget.seed}")
        return 0
    out(f"FALSIFY found states={len(witness.states)}")
    if args.counterexample:
        _write(args.counterexample, format_aut(witness))
    else:
        out(format_aut(witness), end="")
    return 1


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conflict", description="Conflict preorder checker for automata.")
    parser.add_argument("--backend", choices=sorted(kernels.BACKENDS), default=None,
                        help="LC kernel implementation (default: %s)" % kernels.DEFAULT)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="validate an .aut file and print it canonically")
    p.add_argument("file")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("nonblocking", help="check whether an automaton is nonblocking")
    p.add_argument("file")
    p.set_defaults(func=cmd_nonblocking)

    p = sub.add_parser("compose", help="synchronous composition of two automata")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("certain", help="certain conflicts of an automaton")
    p.add_argument("file")
    p.add_argument("--trace", help='whitespace-separated events, optionally ending in omega')
    p.set_defaults(func=cmd_certain)

    for name, func, help_text in (
        ("lc", cmd_lc, "less conflicting pair levels"),
        ("preorder", cmd_preorder, "decide whether FIRST is less conflicting than SECOND"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("first")
        p.add_argument("second")
        p.add_argument("--dot", help="write the pair graph in DOT format")
        p.add_argument("--full", action="store_true", help="show the empty sink pair in DOT output")
        if name == "preorder":
            p.add_argument("--counterexample", help="write a verified test automaton on failure")
        p.set_defaults(func=func)

    p = sub.add_parser("equiv", help="decide conflict equivalence")
    p.add_argument("first")
    p.add_argument("second")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("falsify", help="search for a refuting test by brute force")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--budget", type=_positive, default=1000, help="number of random tests")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-states", type=_positive, default=4)
    p.add_argument("--probe", action="append", default=[], help="extra test automaton to try first")
    p.add_argument("--counterexample", help="write the witness test here")
    p.set_defaults(func=cmd_falsify)
    return parser


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def out(text="", end="\n"):
        stdout.write(text + end)

    try:
        return args.func(args, out)
    except (ParseError, ValidationError) as exc:
        for err in exc.errors:
            stderr.write(f"error: {err}\n")
        return 2
    except (UsageError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        stderr.write(f"error: {exc.filename}: {exc.strerror}\n")
        return 2


def main():
    sys.exit(run())
