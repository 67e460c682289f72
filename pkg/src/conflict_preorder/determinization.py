"""Subset construction with a termination mark, and the pair graph over two automata."""

from __future__ import annotations

import enum
from collections import deque
from typing import Iterable, NamedTuple, Union

from .automata import OMEGA_EVENT, Automaton, AutomatonIndex, bits


class Omega(enum.Enum):
    """The deterministic state entered only after termination."""

    MARK = "omega"

    def __repr__(self):
        return "OMEGA"


OMEGA = Omega.MARK
DetState = Union[frozenset, Omega]

# Integer encoding used internally: a bitmask over the automaton's state order,
# or OMEGA_CODE for the termination mark.
OMEGA_CODE = -1


class PairNode(NamedTuple):
    xa: DetState
    xb: DetState

    def __str__(self):
        return format_pair(self)


EMPTY = frozenset()
SINK = PairNode(EMPTY, EMPTY)
TERMINATED = PairNode(EMPTY, OMEGA)  # (∅, ω)


def format_det(x: DetState) -> str:
    if x is OMEGA:
        return "omega"
    return "{" + ",".join(sorted(x)) + "}"


def format_pair(p: PairNode) -> str:
    return f"({format_det(p.xa)},{format_det(p.xb)})"


def det_key(x: DetState):
    if x is OMEGA:
        return (1, ())
    return (0, tuple(sorted(x)))


def pair_key(p: PairNode):
    return (det_key(p.xa), det_key(p.xb))


def encode(idx: AutomatonIndex, x: DetState) -> int:
    if x is OMEGA:
        return OMEGA_CODE
    try:
        return idx.mask(x)
    except KeyError as exc:
        raise ValueError(f"unknown state {exc.args[0]!r} in deterministic state") from None


def decode(idx: AutomatonIndex, code: int) -> DetState:
    if code == OMEGA_CODE:
        return OMEGA
    return idx.names(code)


def code_key(code: int):
    if code == OMEGA_CODE:
        return (1, ())
    return (0, tuple(bits(code)))


def step_code(idx: AutomatonIndex, code: int, label: str) -> int:
    if code == OMEGA_CODE:
        return 0
    if label == OMEGA_EVENT:
        return OMEGA_CODE if code & idx.omega_enabled else 0
    return idx.step(code, label)


def det_initial(aut: Automaton) -> frozenset:
    """The deterministic initial state: all states silently reachable initially."""
    idx = aut.index
    return idx.names(idx.close(idx.initial_mask))


def det_step(aut: Automaton, x: DetState, label: str) -> DetState:
    """Deterministic successor of ``x`` under an event or ``omega``."""
    idx = aut.index
    return decode(idx, step_code(idx, encode(idx, x), label))


def det_run(aut: Automaton, x: DetState, trace: Iterable[str]) -> DetState:
    idx = aut.index
    code = encode(idx, x)
    for label in trace:
        code = step_code(idx, code, label)
    return decode(idx, code)


def pair_step(a: Automaton, b: Automaton, p: PairNode, label: str) -> PairNode:
    return PairNode(det_step(a, p.xa, label), det_step(b, p.xb, label))


def event_labels(alphabet: Iterable[str]) -> tuple[str, ...]:
    """Labels of pair-graph arrows: sorted events followed by ``omega``."""
    return tuple(sorted(alphabet)) + (OMEGA_EVENT,)


class PairGraph:
    """Forward closure of seed pairs under the deterministic transition function.

    The sink ``(∅,∅)`` is implicit: arrows into it are not stored and it is not
    listed among the nodes.  Nodes are kept in canonical order.

    Internally each node ``i`` is ``codes[i] = (code_a, code_b)`` and
    ``succ[i][k]`` is the index of the successor under ``labels[k]`` or ``-1``
    for the sink.
    """

    def __init__(self, a: Automaton, b: Automaton, labels, codes, succ, seed_ids):
        self.a = a
        self.b = b
        self.labels = labels
        self.codes = codes
        self.succ = succ
        self.seed_ids = seed_ids
        ia, ib = a.index, b.index
        self.nodes = tuple(PairNode(decode(ia, ca), decode(ib, cb)) for ca, cb in codes)
        self._pos = {node: i for i, node in enumerate(self.nodes)}

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node):
        return node in self._pos

    def index_of(self, node: PairNode) -> int:
        return self._pos[node]

    @property
    def seeds(self) -> frozenset:
        return frozenset(self.nodes[i] for i in self.seed_ids)

    @property
    def arrows(self) -> dict:
        """Map ``(node, label) -> node`` for every non-sink arrow."""
        out = {}
        for i, row in enumerate(self.succ):
            for k, j in enumerate(row):
                if j >= 0:
                    out[(self.nodes[i], self.labels[k])] = self.nodes[j]
        return out

    def successor(self, node: PairNode, label: str) -> PairNode:
        j = self.succ[self._pos[node]][self.labels.index(label)]
        return SINK if j < 0 else self.nodes[j]

    def arrow_count(self) -> int:
        return sum(1 for row in self.succ for j in row if j >= 0)


def build_pair_graph(
    a: Automaton,
    b: Automaton,
    seeds: Iterable[PairNode],
    alphabet: Iterable[str] | None = None,
) -> PairGraph:
    """Build the pair graph reachable from ``seeds``.

    ``alphabet`` defaults to the union of both automata's alphabets.
    """
    ia, ib = a.index, b.index
    labels = event_labels(a.alphabet | b.alphabet if alphabet is None else alphabet)
    seed_codes = sorted({(encode(ia, p.xa), encode(ib, p.xb)) for p in seeds}, key=_code_pair_key)
    seed_codes = [c for c in seed_codes if c != (0, 0)]

    ids: dict[tuple[int, int], int] = {}
    codes: list[tuple[int, int]] = []
    raw_succ: list[list[int]] = []
    queue = deque()
    for c in seed_codes:
        ids[c] = len(codes)
        codes.append(c)
        queue.append(c)
    step_a = _stepper(ia)
    step_b = _stepper(ib)
    while queue:
        ca, cb = queue.popleft()
        row = []
        for label in labels:
            t = (step_a(ca, label), step_b(cb, label))
            if t == (0, 0):
                row.append(-1)
                continue
            j = ids.get(t)
            if j is None:
                j = ids[t] = len(codes)
                codes.append(t)
                queue.append(t)
            row.append(j)
        raw_succ.append(row)

    order = sorted(range(len(codes)), key=lambda i: _code_pair_key(codes[i]))
    renum = [0] * len(codes)
    for new, old in enumerate(order):
        renum[old] = new
    new_codes = [codes[old] for old in order]
    new_succ = [[renum[j] if j >= 0 else -1 for j in raw_succ[old]] for old in order]
    seed_ids = tuple(sorted(renum[ids[c]] for c in seed_codes))
    return PairGraph(a, b, labels, new_codes, new_succ, seed_ids)


def _code_pair_key(c):
    return (code_key(c[0]), code_key(c[1]))


def _stepper(idx: AutomatonIndex):
    cache: dict[tuple[int, str], int] = {}

    def step(code, label):
        key = (code, label)
        r = cache.get(key)
        if r is None:
            r = cache[key] = step_code(idx, code, label)
        return r

    return step
