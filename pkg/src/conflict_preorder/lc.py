"""Less-conflicting-pair levels over a pair graph.

The outer loop grows the set of less conflicting pairs one level at a time;
each level is obtained from a backward closure of more conflicting triples
``(pair, x_B)`` that start at the terminated pair ``(∅, ω)``.  Arrows labelled
``omega`` take part in the closure, otherwise no triple could ever reach the
base pair.
"""

from __future__ import annotations

import math
from array import array
from collections.abc import Mapping
from typing import NamedTuple

from . import kernels
from .automata import Automaton, _coreachable_mask, bits
from .determinization import OMEGA_CODE, SINK, TERMINATED, PairGraph, PairNode

INF = math.inf


class McTriple(NamedTuple):
    pair: PairNode
    xb: str


class LcLevelMap(Mapping):
    """Immutable map ``PairNode -> level`` where ``math.inf`` means "not less conflicting".

    Every graph node is a key; the implicit sink also answers ``inf``.
    ``witness`` records, for promoted nodes, the smallest B-state that
    justified the promotion.
    """

    def __init__(self, graph: PairGraph, levels, witness=None, rounds: int = 0):
        self.graph = graph
        self.levels = array("i", levels)
        self._witness = array("i", witness if witness is not None else [-1] * len(levels))
        self.rounds = rounds

    def __getitem__(self, node):
        if node == SINK:
            return INF
        lvl = self.levels[self.graph.index_of(node)]
        return INF if lvl < 0 else lvl

    def __iter__(self):
        return iter(self.graph.nodes)

    def __len__(self):
        return len(self.graph.nodes)

    def is_finite(self, node) -> bool:
        return self[node] != INF

    def finite(self) -> dict[PairNode, int]:
        return {self.graph.nodes[i]: lvl for i, lvl in enumerate(self.levels) if lvl >= 0}

    def witness(self, node) -> str | None:
        x = self._witness[self.graph.index_of(node)]
        return None if x < 0 else self.graph.b.index.order[x]

    def promoted(self, nodes, level: int, witness: dict | None = None) -> "LcLevelMap":
        """Return a new map with ``nodes`` assigned ``level``."""
        levels = array("i", self.levels)
        wit = array("i", self._witness)
        pos = self.graph.b.index.pos
        for node in nodes:
            i = self.graph.index_of(node)
            if levels[i] >= 0:
                raise ValueError(f"{node} already has level {levels[i]}")
            levels[i] = level
            if witness and node in witness:
                wit[i] = pos[witness[node]]
        return LcLevelMap(self.graph, levels, wit, max(self.rounds, level))


class LcProblem:
    """Flat arrays describing the triple graph for the kernels."""

    def __init__(self, graph: PairGraph, b: Automaton):
        if graph.b is not b and graph.b != b:
            raise ValueError("graph was built for a different B automaton")
        idx = b.index
        n, nb = len(graph), idx.size
        labels = graph.labels
        self.n, self.nb = n, nb

        preds: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for p, row in enumerate(graph.succ):
            for k, q in enumerate(row):
                if q >= 0:
                    preds[q].append((p, k))
        self.pred_ptr = array("i", [0])
        self.pred_src = array("i")
        self.pred_lab = array("i")
        for q in range(n):
            for p, k in preds[q]:
                self.pred_src.append(p)
                self.pred_lab.append(k)
            self.pred_ptr.append(len(self.pred_src))

        # reverse weak transitions of B: rb[k * nb + y] = {x | x =labels[k]=> y}
        rev = [[] for _ in range(len(labels) * nb)]
        for k, label in enumerate(labels):
            row = idx.weak.get(label)
            if row is None:
                continue
            for x in range(nb):
                for y in bits(row[x]):
                    rev[k * nb + y].append(x)
        self.rb_ptr = array("i", [0])
        self.rb_src = array("i")
        for lst in rev:
            self.rb_src.extend(lst)
            self.rb_ptr.append(len(self.rb_src))

        self.member = bytearray(n * nb)
        self.b_subset = bytearray(n)
        for p, (_, cb) in enumerate(graph.codes):
            if cb == OMEGA_CODE:
                continue
            self.b_subset[p] = 1
            for x in bits(cb):
                self.member[p * nb + x] = 1
        self.base = graph.index_of(TERMINATED) if TERMINATED in graph else -1

    def closure(self, levels, backend=None):
        k = kernels.get(backend)
        return k.mc_closure(self.n, self.nb, self.pred_ptr, self.pred_src, self.pred_lab,
                            self.rb_ptr, self.rb_src, self.member, levels, self.base)


def lc_seed(graph: PairGraph, b: Automaton) -> LcLevelMap:
    """Level 0: terminated A-side, or a B-side containing a state that can never terminate."""
    blocking = ~_coreachable_mask(b)
    levels = []
    for ca, cb in graph.codes:
        if ca == OMEGA_CODE or (cb != OMEGA_CODE and cb & blocking):
            levels.append(0)
        else:
            levels.append(-1)
    return LcLevelMap(graph, levels)


def mc_closure(graph: PairGraph, lc: LcLevelMap, b: Automaton, backend=None) -> frozenset[McTriple]:
    """More conflicting triples relative to the current LC set ``lc``."""
    problem = LcProblem(graph, b)
    mc = problem.closure(lc.levels, backend)
    order = b.index.order
    out = {McTriple(TERMINATED, x) for x in order}
    nb = problem.nb
    for u in range(len(mc)):
        if mc[u]:
            p, x = divmod(u, nb)
            out.add(McTriple(graph.nodes[p], order[x]))
    return frozenset(out)


def lc_iterate(graph: PairGraph, lc: LcLevelMap, mc, n: int) -> set[PairNode]:
    """Nodes that enter the LC set at level ``n + 1`` given the closure ``mc``."""
    promoted = set()
    for node in graph.nodes:
        if lc.is_finite(node) or not isinstance(node.xb, frozenset):
            continue
        if any(McTriple(node, x) not in mc for x in node.xb):
            promoted.add(node)
    return promoted


def promotion_witnesses(lc: LcLevelMap, mc, nodes) -> dict[PairNode, str]:
    return {node: min(x for x in node.xb if McTriple(node, x) not in mc) for node in nodes}


def lc_fixpoint(graph: PairGraph, b: Automaton, backend=None) -> LcLevelMap:
    """Iterate closure and promotion to the least fixpoint."""
    seed = lc_seed(graph, b)
    problem = LcProblem(graph, b)
    levels = array("i", seed.levels)
    witness = array("i", [-1] * len(graph))
    k = kernels.get(backend)
    rounds = k.lc_fixpoint(problem.n, problem.nb, problem.pred_ptr, problem.pred_src,
                           problem.pred_lab, problem.rb_ptr, problem.rb_src, problem.member,
                           problem.b_subset, levels, witness, problem.base)
    return LcLevelMap(graph, levels, witness, rounds)


def lc_replay(graph: PairGraph, b: Automaton, backend=None):
    """Run the fixpoint one round at a time through the public steps.

    Returns a list of ``(lc_n, mc_n, promoted)`` tuples, one per outer round,
    ending with the round that promotes nothing.
    """
    lc = lc_seed(graph, b)
    history = []
    n = 0
    while True:
        mc = mc_closure(graph, lc, b, backend)
        promoted = lc_iterate(graph, lc, mc, n)
        history.append((lc, mc, promoted))
        if not promoted:
            return history
        lc = lc.promoted(promoted, n + 1, promotion_witnesses(lc, mc, promoted))
        n += 1
