"""Nondeterministic automata with silent (``tau``) and termination (``omega``) events.

Automata are immutable values.  State and event names are plain strings and
every set printout uses their lexicographic order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:
    from .determinization import PairNode

TAU = "tau"
OMEGA_EVENT = "omega"
RESERVED = frozenset({TAU, OMEGA_EVENT})

Trace = tuple[str, ...]
Transition = tuple[str, str, str]


class ValidationError(ValueError):
    """Raised when an automaton description violates a structural rule.

    ``errors`` holds every problem found, not only the first one.
    """

    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass
class RawAutomaton:
    """Unchecked automaton description, as produced by the ``.aut`` parser."""

    name: str = "automaton"
    alphabet: list[str] = field(default_factory=list)
    initials: list[str] = field(default_factory=list)
    transitions: list[Transition] = field(default_factory=list)
    # None means states are implied by transitions and initial states.
    states: list[str] | None = None


def _check(name, alphabet, states, transitions, initials) -> list[str]:
    errors = []
    for event in sorted(alphabet & RESERVED):
        errors.append(f"reserved event {event!r} declared in alphabet")
    for state in sorted(initials - states):
        errors.append(f"undeclared state {state!r} in initial states")
    targets_of_omega = set()
    sources = set()
    for src, label, dst in sorted(transitions):
        for s in (src, dst):
            if s not in states:
                errors.append(f"undeclared state {s!r} in transition {src} {label} {dst}")
        if label not in alphabet and label not in RESERVED:
            errors.append(f"undeclared event {label!r} in transition {src} {label} {dst}")
        if label == OMEGA_EVENT:
            targets_of_omega.add(dst)
        sources.add(src)
    for state in sorted(targets_of_omega & sources):
        errors.append(f"omega-successor has outgoing transition: {state!r}")
    return errors


@dataclass(frozen=True)
class Automaton:
    """A finite automaton ``<alphabet, states, transitions, initials>``.

    Construction validates the description and raises :class:`ValidationError`
    on failure, so every instance satisfies the structural invariants.
    """

    alphabet: frozenset[str]
    states: frozenset[str]
    transitions: frozenset[Transition]
    initials: frozenset[str]
    name: str = field(default="automaton", compare=False)

    def __post_init__(self):
        for attr in ("alphabet", "states", "transitions", "initials"):
            object.__setattr__(self, attr, frozenset(getattr(self, attr)))
        errors = _check(self.name, self.alphabet, self.states, self.transitions, self.initials)
        if errors:
            raise ValidationError(errors)

    @classmethod
    def build(
        cls,
        alphabet: Iterable[str],
        transitions: Iterable[Transition],
        initials: Iterable[str],
        states: Iterable[str] = (),
        name: str = "automaton",
    ) -> "Automaton":
        """Convenience constructor that infers states from transitions and initials."""
        transitions = frozenset(tuple(t) for t in transitions)
        initials = frozenset(initials)
        all_states = set(states) | set(initials)
        for src, _, dst in transitions:
            all_states.update((src, dst))
        return cls(frozenset(alphabet), frozenset(all_states), transitions, initials, name)

    @cached_property
    def index(self) -> "AutomatonIndex":
        return AutomatonIndex(self)

    def with_alphabet(self, alphabet: Iterable[str]) -> "Automaton":
        """Return a copy whose alphabet is extended by ``alphabet``."""
        extra = frozenset(alphabet) - self.alphabet
        if not extra:
            return self
        return Automaton(self.alphabet | extra, self.states, self.transitions, self.initials, self.name)

    def is_deterministic(self) -> bool:
        if len(self.initials) > 1:
            return False
        seen = set()
        for src, label, _ in self.transitions:
            if label == TAU or (src, label) in seen:
                return False
            seen.add((src, label))
        return True

    def __repr__(self):
        return f"<Automaton {self.name}: {len(self.states)} states, {len(self.transitions)} transitions>"


def empty_automaton(alphabet: Iterable[str] = (), name: str = "O") -> Automaton:
    return Automaton(frozenset(alphabet), frozenset(), frozenset(), frozenset(), name)


class AutomatonIndex:
    """Integer view of an automaton used by the algorithms.

    States are numbered in lexicographic order and state sets are int
    bitmasks.  ``weak[label][i]`` is the mask of states reachable from state
    ``i`` by ``tau* label tau*`` (``tau* omega`` for termination).
    """

    def __init__(self, aut: Automaton):
        self.order = tuple(sorted(aut.states))
        self.pos = {s: i for i, s in enumerate(self.order)}
        n = len(self.order)
        self.size = n
        strong: dict[str, list[int]] = {}
        tau = [0] * n
        for src, label, dst in aut.transitions:
            i, j = self.pos[src], self.pos[dst]
            if label == TAU:
                tau[i] |= 1 << j
            else:
                strong.setdefault(label, [0] * n)[i] |= 1 << j
        self.tau_closure = _closures(tau)
        self.weak: dict[str, list[int]] = {}
        for label, succ in strong.items():
            row = [_union(succ, self.tau_closure[i]) for i in range(n)]
            if label != OMEGA_EVENT:
                # targets of omega have no outgoing transitions, so no trailing tau
                row = [self.close(m) for m in row]
            self.weak[label] = row
        self.initial_mask = self.mask(aut.initials)
        omega_row = self.weak.get(OMEGA_EVENT, [0] * n)
        self.omega_enabled = sum(1 << i for i in range(n) if omega_row[i])

    def close(self, mask: int) -> int:
        return _union(self.tau_closure, mask)

    def mask(self, states: Iterable[str]) -> int:
        m = 0
        for s in states:
            m |= 1 << self.pos[s]
        return m

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(self.order[i] for i in bits(mask))

    def step(self, mask: int, label: str) -> int:
        """Weak successors of every state in ``mask`` under ``label``."""
        row = self.weak.get(label)
        if row is None:
            return 0
        return _union(row, mask)


def bits(mask: int):
    """Yield the indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _union(rows: Sequence[int], mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= rows[low.bit_length() - 1]
        mask ^= low
    return out


def _closures(tau: list[int]) -> list[int]:
    n = len(tau)
    result = []
    for i in range(n):
        reached = 1 << i
        frontier = reached
        while frontier:
            nxt = _union(tau, frontier) & ~reached
            reached |= nxt
            frontier = nxt
        result.append(reached)
    return result


# ---------------------------------------------------------------------------
# Validation and the .aut text format


def validate(raw: RawAutomaton) -> Automaton:
    """Check a raw description and return the corresponding :class:`Automaton`.

    All problems are reported together in one :class:`ValidationError`.
    """
    alphabet = frozenset(raw.alphabet)
    transitions = frozenset(tuple(t) for t in raw.transitions)
    initials = frozenset(raw.initials)
    if raw.states is None:
        states = set(initials)
        for src, _, dst in transitions:
            states.update((src, dst))
    else:
        states = set(raw.states)
    errors = _check(raw.name, alphabet, frozenset(states), transitions, initials)
    if errors:
        raise ValidationError(errors)
    return Automaton(alphabet, frozenset(states), transitions, initials, raw.name)


class ParseError(ValueError):
    def __init__(self, errors: Sequence[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


def parse_aut(text: str) -> RawAutomaton:
    raw = RawAutomaton()
    errors = []
    declared_states: list[str] = []
    saw_state_line = False
    for lineno, line in enumerate(text.splitlines(), 1):
        tokens = line.split("#", 1)[0].split()
        if not tokens:
            continue
        keyword, args = tokens[0], tokens[1:]
        if keyword == "automaton":
            if len(args) != 1:
                errors.append(f"line {lineno}: 'automaton' takes exactly one name")
            else:
                raw.name = args[0]
        elif keyword == "alphabet":
            raw.alphabet.extend(args)
        elif keyword == "initial":
            if not args:
                errors.append(f"line {lineno}: 'initial' needs at least one state")
            raw.initials.extend(args)
        elif keyword == "state":
            saw_state_line = True
            declared_states.extend(args)
        elif keyword == "trans":
            if len(args) != 3:
                errors.append(f"line {lineno}: 'trans' takes SRC LABEL DST")
            else:
                raw.transitions.append((args[0], args[1], args[2]))
        else:
            errors.append(f"line {lineno}: unknown keyword {keyword!r}")
    if errors:
        raise ParseError(errors)
    if saw_state_line:
        raw.states = declared_states
    return raw


def load_aut(text: str) -> Automaton:
    return validate(parse_aut(text))


def read_aut(path) -> Automaton:
    with open(path, encoding="utf-8") as f:
        return load_aut(f.read())


def format_aut(aut: Automaton) -> str:
    """Render ``aut`` in the ``.aut`` format with canonical line order."""
    lines = [f"automaton {aut.name}"]
    if aut.alphabet:
        lines.append("alphabet " + " ".join(sorted(aut.alphabet)))
    if aut.initials:
        lines.append("initial " + " ".join(sorted(aut.initials)))
    mentioned = set(aut.initials)
    for src, label, dst in sorted(aut.transitions):
        lines.append(f"trans {src} {label} {dst}")
        mentioned.update((src, dst))
    isolated = sorted(aut.states - mentioned)
    if isolated:
        # a state line switches the parser to declared-states mode
        lines.insert(1, "state " + " ".join(sorted(aut.states)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Semantics


def check_trace(s: Sequence[str]) -> Trace:
    s = tuple(s)
    for i, event in enumerate(s):
        if event == TAU:
            raise ValueError("traces never contain tau")
        if event == OMEGA_EVENT and i != len(s) - 1:
            raise ValueError("omega may only end a trace")
    return s


def extended_reach(aut: Automaton, sources: Iterable[str], s: Sequence[str]) -> frozenset[str]:
    """States ``y`` with ``x =s=> y`` for some ``x`` in ``sources``."""
    idx = aut.index
    mask = idx.close(idx.mask(sources))
    for event in check_trace(s):
        mask = idx.step(mask, event)
    return idx.names(mask)


def reachable_states(aut: Automaton, through_omega: bool = False) -> frozenset[str]:
    """States reachable from the initial states.

    By default termination transitions are not followed: a state entered by
    ``omega`` has terminated and carries no nonblocking requirement.
    """
    return aut.index.names(_reachable_mask(aut, through_omega))


def _reachable_mask(aut: Automaton, through_omega: bool = False) -> int:
    succ = [0] * aut.index.size
    pos = aut.index.pos
    for src, label, dst in aut.transitions:
        if label != OMEGA_EVENT or through_omega:
            succ[pos[src]] |= 1 << pos[dst]
    reached = frontier = aut.index.initial_mask
    while frontier:
        nxt = _union(succ, frontier) & ~reached
        reached |= nxt
        frontier = nxt
    return reached


def _coreachable_mask(aut: Automaton) -> int:
    idx = aut.index
    pred = [0] * idx.size
    for src, _, dst in aut.transitions:
        pred[idx.pos[dst]] |= 1 << idx.pos[src]
    reached = frontier = sum(1 << idx.pos[src] for src, label, _ in aut.transitions if label == OMEGA_EVENT)
    while frontier:
        nxt = _union(pred, frontier) & ~reached
        reached |= nxt
        frontier = nxt
    return reached


def marked_coreachable(aut: Automaton) -> frozenset[str]:
    """States with a nonempty marked language."""
    return aut.index.names(_coreachable_mask(aut))


def is_nonblocking(aut: Automaton) -> bool:
    """True iff every state reachable before termination can still terminate."""
    reach = _reachable_mask(aut)
    return reach & ~_coreachable_mask(aut) == 0


def blocking_states(aut: Automaton) -> frozenset[str]:
    """Reachable states from which termination is impossible."""
    return aut.index.names(_reachable_mask(aut) & ~_coreachable_mask(aut))


def marked_membership(aut: Automaton, x: str, s: Sequence[str]) -> bool:
    s = check_trace(s)
    if not s or s[-1] != OMEGA_EVENT:
        raise ValueError("marked traces end with omega")
    return bool(extended_reach(aut, [x], s))


def sync_compose(a: Automaton, b: Automaton, name: str | None = None) -> Automaton:
    """Synchronous product restricted to state pairs reachable from the initial pairs.

    Product states are named ``"xa|xb"``.
    """
    shared = a.alphabet & b.alphabet
    out_a: dict[str, list[tuple[str, str]]] = {}
    out_b: dict[str, list[tuple[str, str]]] = {}
    for src, label, dst in a.transitions:
        out_a.setdefault(src, []).append((label, dst))
    for src, label, dst in b.transitions:
        out_b.setdefault(src, []).append((label, dst))

    def sync(label):
        return label == OMEGA_EVENT or label in shared

    start = [(x, y) for x in sorted(a.initials) for y in sorted(b.initials)]
    seen = set(start)
    queue = deque(start)
    transitions = set()
    while queue:
        x, y = queue.popleft()
        src = f"{x}|{y}"
        moves = []
        ea = out_a.get(x, ())
        eb = out_b.get(y, ())
        for la, xa in ea:
            if sync(la):
                moves.extend((la, (xa, yb)) for lb, yb in eb if lb == la)
            else:
                moves.append((la, (xa, y)))
        for lb, yb in eb:
            if not sync(lb):
                moves.append((lb, (x, yb)))
        for label, target in moves:
            transitions.add((src, label, f"{target[0]}|{target[1]}"))
            if target not in seen:
                seen.add(target)
                queue.append(target)
    states = frozenset(f"{x}|{y}" for x, y in seen)
    return Automaton(
        a.alphabet | b.alphabet,
        states,
        frozenset(transitions),
        frozenset(f"{x}|{y}" for x, y in start),
        name or f"{a.name}||{b.name}",
    )


def language_upto(aut: Automaton, max_len: int, sources: Iterable[str] | None = None) -> set[Trace]:
    """All traces of length at most ``max_len`` executable from ``sources``.

    Used for bounded language checks; ``omega`` counts as one event.
    """
    idx = aut.index
    start = idx.close(idx.initial_mask if sources is None else idx.mask(sources))
    result: set[Trace] = set()
    frontier = [((), start)] if start else []
    events = sorted(aut.alphabet) + [OMEGA_EVENT]
    for _ in range(max_len + 1):
        nxt = []
        for trace, mask in frontier:
            result.add(trace)
            if trace and trace[-1] == OMEGA_EVENT:
                continue
            for e in events:
                m = idx.step(mask, e)
                if m:
                    nxt.append((trace + (e,), m))
        frontier = nxt
    return result


@dataclass(frozen=True)
class Verdict:
    """Outcome of a preorder check.

    A failing verdict always carries the failing pair and its witness trace.
    """

    outcome: str
    failing_pair: "PairNode | None" = None
    witness_trace: Trace | None = None
    counterexample: Automaton | None = None

    def __post_init__(self):
        if self.outcome not in ("holds", "fails"):
            raise ValueError(f"unknown outcome {self.outcome!r}")
        if self.outcome == "fails" and (self.failing_pair is None or self.witness_trace is None):
            raise ValueError("a failing verdict needs a failing pair and a witness trace")

    @property
    def holds(self) -> bool:
        return self.outcome == "holds"
