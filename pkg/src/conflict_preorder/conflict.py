"""Certain conflicts, the conflict preorder, and counterexample tests."""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .automata import (
    OMEGA_EVENT,
    TAU,
    Automaton,
    Trace,
    Verdict,
    bits,
    check_trace,
    empty_automaton,
    is_nonblocking,
    sync_compose,
)
from .determinization import (
    EMPTY,
    PairGraph,
    PairNode,
    build_pair_graph,
    code_key,
    decode,
    encode,
    pair_key,
    step_code,
)
from .lc import LcLevelMap, lc_fixpoint


class CcMarking(Mapping):
    """Certain-conflict marking of the reachable deterministic states of B.

    Maps each reachable deterministic state to ``True`` when every trace
    reaching it is a certain conflict.  Unreachable states are unmarked.
    """

    def __init__(self, b: Automaton, alphabet, codes: dict[int, bool], initial: int):
        self.b = b
        self.alphabet = frozenset(alphabet)
        self._codes = codes
        self.initial_code = initial

    def __getitem__(self, x):
        code = encode(self.b.index, x)
        if code not in self._codes:
            raise KeyError(x)
        return self._codes[code]

    def __iter__(self):
        idx = self.b.index
        return (decode(idx, c) for c in sorted(self._codes, key=code_key))

    def __len__(self):
        return len(self._codes)

    def is_marked(self, x) -> bool:
        return self._codes.get(encode(self.b.index, x), False)

    def code_marked(self, code: int) -> bool:
        return self._codes.get(code, False)

    @property
    def marked(self) -> frozenset:
        idx = self.b.index
        return frozenset(decode(idx, c) for c, m in self._codes.items() if m)


def _alphabet(*auts: Automaton) -> frozenset[str]:
    out = frozenset()
    for a in auts:
        out |= a.alphabet
    return out


def certain_conflict_marking(b: Automaton, alphabet=None) -> CcMarking:
    """Mark deterministic states of B whose pair with the empty automaton is less conflicting."""
    alphabet = b.alphabet if alphabet is None else frozenset(alphabet) | b.alphabet
    o = empty_automaton(alphabet)
    idx = b.index
    init = idx.close(idx.initial_mask)
    graph = build_pair_graph(o, b, [PairNode(EMPTY, decode(idx, init))], alphabet)
    lc = lc_fixpoint(graph, b)
    codes = {}
    for i, (_, cb) in enumerate(graph.codes):
        codes[cb] = lc.levels[i] >= 0
    codes.setdefault(0, False)
    return CcMarking(b, alphabet, codes, init)


def conf_membership(b: Automaton, marking: CcMarking, s: Sequence[str]) -> bool:
    """True iff ``s`` is a certain conflict of B, i.e. some prefix reaches a marked state.

    A trailing ``omega`` is accepted; termination never adds a certain
    conflict, so ``s omega`` is a certain conflict exactly when ``s`` is.
    """
    s = check_trace(s)
    idx = b.index
    code = marking.initial_code
    if marking.code_marked(code):
        return True
    for event in s:
        code = step_code(idx, code, event)
        if marking.code_marked(code):
            return True
    return False


class CrucialPairSet(Mapping):
    """Crucial pairs ``({x_A}, X_B)`` in canonical order, each with a shortest witness trace."""

    def __init__(self, witnesses: dict[PairNode, Trace]):
        self._w = {p: witnesses[p] for p in sorted(witnesses, key=pair_key)}

    def __getitem__(self, p):
        return self._w[p]

    def __iter__(self):
        return iter(self._w)

    def __len__(self):
        return len(self._w)


def crucial_pairs(a: Automaton, b: Automaton, marking: CcMarking | None = None, alphabet=None) -> CrucialPairSet:
    """States of A paired with B's deterministic state along traces outside CONF(B)."""
    alphabet = _alphabet(a, b) if alphabet is None else frozenset(alphabet)
    if marking is None:
        marking = certain_conflict_marking(b, alphabet)
    ia, ib = a.index, b.index
    events = sorted(alphabet)
    start_b = marking.initial_code
    found: dict[tuple[int, int], Trace] = {}
    queue = deque()
    if not marking.code_marked(start_b):
        for xa in bits(ia.close(ia.initial_mask)):
            found[(xa, start_b)] = ()
            queue.append((xa, start_b))
    # FIFO order with sorted events yields the lexicographically least shortest witness
    while queue:
        xa, cb = queue.popleft()
        trace = found[(xa, cb)]
        for event in events:
            ya_mask = ia.step(1 << xa, event)
            if not ya_mask:
                continue
            yb = step_code(ib, cb, event)
            if marking.code_marked(yb):
                continue
            for ya in bits(ya_mask):
                key = (ya, yb)
                if key not in found:
                    found[key] = trace + (event,)
                    queue.append(key)
    return CrucialPairSet(
        {PairNode(frozenset({ia.order[xa]}), decode(ib, cb)): t for (xa, cb), t in found.items()}
    )


@dataclass(frozen=True)
class PreorderAnalysis:
    """Everything computed while deciding ``A`` less conflicting than ``B``."""

    marking: CcMarking
    crucial: CrucialPairSet
    graph: PairGraph
    levels: LcLevelMap
    verdict: Verdict


def analyse_preorder(a: Automaton, b: Automaton, backend=None) -> PreorderAnalysis:
    alphabet = _alphabet(a, b)
    marking = certain_conflict_marking(b, alphabet)
    crucial = crucial_pairs(a, b, marking, alphabet)
    graph = build_pair_graph(a, b, crucial, alphabet)
    levels = lc_fixpoint(graph, b, backend)
    verdict = Verdict("holds")
    for pair, trace in crucial.items():
        if not levels.is_finite(pair):
            verdict = Verdict("fails", pair, trace)
            break
    return PreorderAnalysis(marking, crucial, graph, levels, verdict)


def decide_preorder(a: Automaton, b: Automaton, backend=None) -> Verdict:
    """Decide whether A is less conflicting than B."""
    return analyse_preorder(a, b, backend).verdict


class Equivalence(NamedTuple):
    forward: Verdict
    backward: Verdict

    @property
    def equivalent(self) -> bool:
        return self.forward.holds and self.backward.holds


def decide_equivalence(a: Automaton, b: Automaton, backend=None) -> Equivalence:
    return Equivalence(decide_preorder(a, b, backend), decide_preorder(b, a, backend))


# ---------------------------------------------------------------------------
# Counterexamples


def nconf_recogniser(b: Automaton, marking: CcMarking, alphabet) -> tuple[Automaton, dict[int, str]]:
    """Deterministic automaton over the unmarked deterministic states of B.

    Termination is offered from every state whose termination successor is
    unmarked, which makes its composition with B nonblocking.
    Returns the automaton and the map from deterministic-state codes to names.
    """
    idx = b.index
    events = sorted(alphabet)
    init = marking.initial_code
    if marking.code_marked(init):
        raise ValueError("every trace of B is a certain conflict")
    names = {init: "n0"}
    queue = deque([init])
    transitions = set()
    while queue:
        code = queue.popleft()
        src = names[code]
        for event in events:
            nxt = step_code(idx, code, event)
            if marking.code_marked(nxt):
                continue
            if nxt not in names:
                names[nxt] = f"n{len(names)}"
                queue.append(nxt)
            transitions.add((src, event, names[nxt]))
        if not marking.code_marked(step_code(idx, code, OMEGA_EVENT)):
            transitions.add((src, OMEGA_EVENT, "n_omega"))
    return Automaton.build(alphabet, transitions, ["n0"], names.values(), name=f"N_{b.name}"), names


def pair_test(a: Automaton, b: Automaton, pair: PairNode, alphabet) -> Automaton:
    """Deterministic test whose traces keep the pair graph outside the LC set."""
    graph = build_pair_graph(a, b, [pair], alphabet)
    lc = lc_fixpoint(graph, b)
    if lc.is_finite(pair):
        raise ValueError(f"{pair} is a less conflicting pair")
    omega_k = graph.labels.index(OMEGA_EVENT)
    sink = -1
    start = graph.index_of(pair)
    names = {start: "t0"}
    queue = deque([start])
    transitions = set()
    while queue:
        i = queue.popleft()
        src = names[i]
        if i == sink:
            row = [sink] * len(graph.labels)
        else:
            row = graph.succ[i]
        for k, j in enumerate(row):
            if j >= 0 and lc.levels[j] >= 0:
                continue
            if k == omega_k:
                transitions.add((src, OMEGA_EVENT, "t_omega"))
                continue
            if j not in names:
                names[j] = f"t{len(names)}"
                queue.append(j)
            transitions.add((src, graph.labels[k], names[j]))
    return Automaton.build(alphabet, transitions, ["t0"], names.values(), name="T_X")


def build_counterexample(a: Automaton, b: Automaton, verdict: Verdict) -> Automaton:
    """Test automaton nonconflicting with B but conflicting with A.

    It follows the certain-conflict-free behaviour of B and, after the witness
    trace of the failing pair, may silently switch to a test built from the
    pairs outside the LC set.
    """
    if verdict.holds:
        raise ValueError("no counterexample exists for a verdict that holds")
    alphabet = _alphabet(a, b)
    marking = certain_conflict_marking(b, alphabet)
    nb, names = nconf_recogniser(b, marking, alphabet)
    code = marking.initial_code
    for event in verdict.witness_trace:
        code = step_code(b.index, code, event)
    if code not in names:
        raise ValueError("witness trace is a certain conflict of B")
    tx = pair_test(a, b, verdict.failing_pair, alphabet)
    transitions = set(nb.transitions) | set(tx.transitions) | {(names[code], TAU, "t0")}
    return Automaton.build(
        alphabet, transitions, ["n0"], nb.states | tx.states, name=f"T_{a.name}_{b.name}"
    )


def verify_counterexample(a: Automaton, b: Automaton, t: Automaton) -> bool:
    """True iff ``B || T`` is nonblocking while ``A || T`` is blocking.

    All three automata are read over their common alphabet, so an event
    missing from an automaton's alphabet is never enabled there.
    """
    sigma = _alphabet(a, b, t)
    a, b, t = (x.with_alphabet(sigma) for x in (a, b, t))
    return is_nonblocking(sync_compose(b, t)) and not is_nonblocking(sync_compose(a, t))
