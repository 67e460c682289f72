"""Independent checks: a trace search for more conflicting triples and brute-force tests.

Nothing here uses the worklist closure or the LC decision procedure; these
functions only replay definitions directly, so they can cross-check them.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .automata import OMEGA_EVENT, TAU, Automaton, extended_reach
from .determinization import TERMINATED, PairGraph, pair_step
from .lc import LcLevelMap, McTriple

ENUMERATION_LIMIT = 50_000


@dataclass(frozen=True)
class TestBudget:
    """Limits for brute-force test generation.  Identical seeds give identical tests."""

    __test__ = False  # not a pytest class

    max_states: int = 4
    max_trace_len: int = 4
    samples: int = 1000
    seed: int = 0

    def __post_init__(self):
        for name in ("max_states", "max_trace_len", "samples"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def mc_trace_depth(graph: PairGraph, lc: LcLevelMap, triple: McTriple, bound: int) -> int | None:
    """Length of the shortest trace taking ``triple`` to ``(∅, ω)`` outside the LC set.

    The trace is either empty or ends with ``omega``; the B-state of the triple
    must be able to execute it, and no prefix may land on a pair with a finite
    level in ``lc``.  The length is the inner layer at which the triple first
    appears in the backward closure.  ``None`` when no such trace exists.
    """
    b = graph.b
    need = len(graph) * (b.index.size + 1)
    if bound < need:
        raise ValueError(f"bound {bound} is below {need}")
    a = graph.a
    pair, xb = triple
    if lc[pair] != float("inf"):
        return None
    if pair == TERMINATED:
        return 0
    seen = {(pair, xb)}
    frontier = [(pair, xb)]
    for depth in range(1, bound + 1):
        nxt = []
        for p, y in frontier:
            if y not in p.xb:
                continue
            for label in graph.labels:
                q = pair_step(a, b, p, label)
                if lc[q] != float("inf"):
                    continue
                for z in sorted(extended_reach(b, [y], [label])):
                    if q == TERMINATED and label == OMEGA_EVENT:
                        return depth
                    if label == OMEGA_EVENT or (q, z) in seen:
                        continue
                    seen.add((q, z))
                    nxt.append((q, z))
        if not nxt:
            break
        frontier = nxt
    return None


def mc_trace_oracle(graph: PairGraph, lc: LcLevelMap, triple: McTriple, bound: int) -> bool:
    """Whether some trace witnesses ``triple`` as more conflicting against ``lc``."""
    return mc_trace_depth(graph, lc, triple, bound) is not None


# ---------------------------------------------------------------------------
# Deterministic tests


def _test_automaton(events, k, table, omegas, name) -> Automaton:
    transitions = []
    for i in range(k):
        for e, event in enumerate(events):
            target = table[i * len(events) + e]
            if target:
                transitions.append((f"q{i}", event, f"q{target - 1}"))
        if omegas[i]:
            transitions.append((f"q{i}", OMEGA_EVENT, "qw"))
    return Automaton.build(events, transitions, ["q0"], [f"q{i}" for i in range(k)], name=name)


def _canonical(k, n_events, table, omegas):
    """Renumber states in breadth-first order from q0; ``None`` if some state is unreachable."""
    order = [0]
    pos = {0: 0}
    i = 0
    while i < len(order):
        s = order[i]
        for e in range(n_events):
            t = table[s * n_events + e]
            if t and (t - 1) not in pos:
                pos[t - 1] = len(order)
                order.append(t - 1)
        i += 1
    if len(order) != k:
        return None
    new_table = []
    for s in order:
        for e in range(n_events):
            t = table[s * n_events + e]
            new_table.append(pos[t - 1] + 1 if t else 0)
    return tuple(new_table), tuple(omegas[s] for s in order)


def enumeration_size(n_events: int, k: int) -> int:
    return (k + 1) ** (k * n_events) * 2**k


def enumerate_small_tests(alphabet: Iterable[str], max_states: int) -> Iterator[Automaton]:
    """Every deterministic test with at most ``max_states`` states before termination.

    Tests are connected from their single initial state and pairwise
    non-isomorphic.  A terminal state ``qw`` is added when termination is used.
    """
    events = sorted(alphabet)
    n = len(events)
    seen = set()
    count = 0
    for k in range(1, max_states + 1):
        for table in itertools.product(range(k + 1), repeat=k * n):
            for omegas in itertools.product((False, True), repeat=k):
                canon = _canonical(k, n, table, omegas)
                if canon is None or canon in seen:
                    continue
                seen.add(canon)
                yield _test_automaton(events, k, canon[0], canon[1], f"E{count}")
                count += 1


def random_test(alphabet: Iterable[str], budget: TestBudget, rng: random.Random | None = None) -> Automaton:
    """A pseudorandom deterministic test: a trace-shaped prefix leading into a small random core."""
    rng = random.Random(budget.seed) if rng is None else rng
    events = sorted(alphabet)
    prefix = rng.randint(0, budget.max_trace_len) if events else 0
    core = rng.randint(1, budget.max_states)
    transitions = []
    names = [f"p{i}" for i in range(prefix)] + [f"c{i}" for i in range(core)]
    for i in range(prefix):
        transitions.append((names[i], rng.choice(events), names[i + 1]))
        if rng.random() < 0.3:
            transitions.append((names[i], OMEGA_EVENT, "tw"))
    for i in range(core):
        src = f"c{i}"
        for event in events:
            if rng.random() < 0.6:
                transitions.append((src, event, f"c{rng.randrange(core)}"))
        if rng.random() < 0.5:
            transitions.append((src, OMEGA_EVENT, "tw"))
    # the prefix chain already uses one event per state, keep it deterministic
    det = {}
    for src, label, dst in transitions:
        det.setdefault((src, label), dst)
    return Automaton.build(events, [(s, l, d) for (s, l), d in det.items()], [names[0]], names, name="R")


def random_tests(alphabet: Iterable[str], budget: TestBudget) -> Iterator[Automaton]:
    rng = random.Random(budget.seed)
    for _ in range(budget.samples):
        yield random_test(alphabet, budget, rng)


def random_automaton(
    rng: random.Random,
    max_states: int,
    alphabet: Sequence[str],
    tau: float = 0.15,
    omega: float = 0.35,
    name: str = "X",
    n_states: int | None = None,
) -> Automaton:
    """A random nondeterministic automaton with at most ``max_states`` states.

    One state ``sw`` is reserved as the termination target whenever
    ``omega`` is used; it counts towards ``max_states``.  Passing ``n_states``
    fixes the number of ordinary states instead (``sw`` comes on top).
    """
    n = n_states if n_states is not None else rng.randint(1, max(1, max_states - 1))
    states = [f"s{i}" for i in range(n)]
    transitions = []
    for src in states:
        for event in alphabet:
            for _ in range(rng.choice((0, 1, 1, 2))):
                transitions.append((src, event, rng.choice(states)))
        if rng.random() < tau:
            transitions.append((src, TAU, rng.choice(states)))
        if (n_states is not None or max_states > 1) and rng.random() < omega:
            transitions.append((src, OMEGA_EVENT, "sw"))
    initials = ["s0"]
    if n > 1 and rng.random() < 0.2:
        initials.append("s1")
    return Automaton.build(alphabet, transitions, initials, states, name=name)


class _Moves:
    """Per-state move lists of an automaton, split into silent, private and shared labels."""

    def __init__(self, aut: Automaton, shared: frozenset):
        idx = aut.index
        self.size = idx.size
        self.initials = [idx.pos[x] for x in sorted(aut.initials)]
        self.tau = [[] for _ in range(idx.size)]
        self.private = [[] for _ in range(idx.size)]
        self.sync: list[dict[str, list[int]]] = [{} for _ in range(idx.size)]
        for src, label, dst in aut.transitions:
            i, j = idx.pos[src], idx.pos[dst]
            if label == TAU:
                self.tau[i].append(j)
            elif label == OMEGA_EVENT or label in shared:
                self.sync[i].setdefault(label, []).append(j)
            else:
                self.private[i].append(j)


def composition_nonblocking(a: Automaton, t: Automaton, _moves=None) -> bool:
    """Nonblocking check of ``a || t`` straight from the product definition.

    Equivalent to ``is_nonblocking(sync_compose(a, t))`` without building the
    product automaton; used on the hot path of brute-force falsification.
    """
    shared = a.alphabet & t.alphabet
    ma = _moves if _moves is not None else _Moves(a, shared)
    mt = _Moves(t, shared)
    start = [(x, y) for x in ma.initials for y in mt.initials]
    seen = set(start)
    stack = list(start)
    preds: dict[tuple[int, int], list[tuple[int, int]]] = {}
    done = set()
    while stack:
        u = stack.pop()
        x, y = u
        succ = [(x2, y) for x2 in ma.tau[x]] + [(x2, y) for x2 in ma.private[x]]
        succ += [(x, y2) for y2 in mt.tau[y]] + [(x, y2) for y2 in mt.private[y]]
        sx, sy = ma.sync[x], mt.sync[y]
        for label, targets in sx.items():
            if label == OMEGA_EVENT:
                if OMEGA_EVENT in sy:
                    done.add(u)
                continue
            for y2 in sy.get(label, ()):
                succ.extend((x2, y2) for x2 in targets)
        for v in succ:
            preds.setdefault(v, []).append(u)
            if v not in seen:
                seen.add(v)
                stack.append(v)
    # backwards from the states that can terminate together
    good = set(done)
    stack = list(done)
    while stack:
        v = stack.pop()
        for u in preds.get(v, ()):
            if u not in good:
                good.add(u)
                stack.append(u)
    return len(good) == len(seen)


def _refutes(a: Automaton, b: Automaton, t: Automaton, moves=None) -> bool:
    if moves is None:
        return not composition_nonblocking(a, t) and composition_nonblocking(b, t)
    ma, mb = moves
    return not composition_nonblocking(a, t, ma) and composition_nonblocking(b, t, mb)


def candidate_tests(alphabet, budget: TestBudget, probes: Iterable[Automaton] = ()) -> Iterator[Automaton]:
    """Probes first, then exhaustive small tests within the limit, then random samples."""
    yield from probes
    n = len(alphabet)
    k = 0
    while k < budget.max_states and enumeration_size(n, k + 1) <= ENUMERATION_LIMIT:
        k += 1
    yield from enumerate_small_tests(alphabet, k)
    yield from random_tests(alphabet, budget)


def falsify_preorder(
    a: Automaton, b: Automaton, budget: TestBudget, probes: Iterable[Automaton] = ()
) -> Automaton | None:
    """Look for a test nonconflicting with B but conflicting with A.

    Finding none proves nothing; a returned test is a genuine refutation.
    """
    sigma = a.alphabet | b.alphabet
    for p in probes:
        sigma |= p.alphabet
    a, b = a.with_alphabet(sigma), b.with_alphabet(sigma)
    moves = (_Moves(a, sigma), _Moves(b, sigma))
    for t in candidate_tests(sorted(sigma), budget, probes):
        if _refutes(a, b, t.with_alphabet(sigma), moves):
            return t
    return None
