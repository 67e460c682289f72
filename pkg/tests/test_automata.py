import itertools
import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conflict_preorder.automata import (
    Automaton,
    ParseError,
    RawAutomaton,
    ValidationError,
    blocking_states,
    extended_reach,
    format_aut,
    is_nonblocking,
    language_upto,
    load_aut,
    marked_coreachable,
    marked_membership,
    parse_aut,
    reachable_states,
    sync_compose,
    validate,
)

from conftest import spell


def marked_upto(aut, state, n):
    return {s for s in language_upto(aut, n, [state]) if s and s[-1] == "omega"}


def test_validate_accepts_fixture_shape():
    raw = RawAutomaton("A", {"alpha"}, {"a0"}, {("a0", "alpha", "a1"), ("a1", "omega", "aw")})
    aut = validate(raw)
    assert aut.states == frozenset({"a0", "a1", "aw"})
    assert aut.initials == frozenset({"a0"})


@pytest.mark.parametrize(
    "raw, fragment",
    [
        (RawAutomaton("X", {"tau"}, {"x"}, set()), "reserved"),
        (RawAutomaton("X", {"a"}, {"x"}, {("x", "b", "x")}), "undeclared event"),
        (RawAutomaton("X", {"a"}, {"x"}, {("x", "omega", "y"), ("y", "a", "x")}), "omega-successor"),
        (RawAutomaton("X", {"a"}, {"z"}, {("x", "a", "x")}, states={"x"}), "undeclared state"),
    ],
)
def test_validate_rejects(raw, fragment):
    with pytest.raises(ValidationError) as info:
        validate(raw)
    assert any(fragment in e for e in info.value.errors)


def test_errors_are_collected_not_first_only():
    raw = RawAutomaton("X", {"omega"}, {"x"}, {("x", "b", "x"), ("x", "omega", "y"), ("y", "b", "x")})
    with pytest.raises(ValidationError) as info:
        validate(raw)
    assert len(info.value.errors) >= 3


def test_parse_format_roundtrip(fx):
    for aut in fx.values():
        text = format_aut(aut)
        again = load_aut(text)
        assert again == aut
        assert format_aut(again) == text


def test_parse_comments_and_isolated_states():
    text = """
    # a comment
    automaton X
    alphabet a b
    initial x0
    state x0 x1 lonely
    trans x0 a x1   # trailing comment
    trans x1 omega xw
    state xw
    """
    aut = load_aut(text)
    assert "lonely" in aut.states
    assert "lonely" in format_aut(aut)


@pytest.mark.parametrize("text", ["alphabet a\ninitial x\ntrans x a", "bogus line", "trans x a y\n"])
def test_parse_errors(text):
    with pytest.raises((ParseError, ValidationError)):
        load_aut(text)


def test_parse_reports_line_numbers():
    with pytest.raises(ParseError) as info:
        parse_aut("automaton X\nalphabet a\nfrobnicate\n")
    assert "3" in str(info.value)


def test_automaton_is_immutable(fx):
    with pytest.raises(Exception):
        fx["A0"].initials = frozenset()


def test_extended_reach_examples(fx):
    b0 = fx["B0"]
    assert extended_reach(b0, ["b0"], ["alpha"]) == {"b1", "b2"}
    assert extended_reach(b0, ["b0"], ["alpha", "beta"]) == {"b3", "b4"}
    assert extended_reach(b0, ["b0"], ["gamma"]) == frozenset()
    # tau closure on both sides of an event
    b2 = fx["B2"]
    assert extended_reach(b2, ["b0"], []) == {"b0", "b1"}
    assert extended_reach(b2, ["b0"], ["alpha"]) == {"b0", "b1"}
    assert extended_reach(b2, ["b0"], ["omega"]) == {"bw"}
    assert extended_reach(b2, ["b1"], ["omega"]) == frozenset()


def test_extended_reach_rejects_bad_traces(fx):
    with pytest.raises(ValueError):
        extended_reach(fx["B0"], ["b0"], ["omega", "alpha"])
    with pytest.raises(ValueError):
        extended_reach(fx["B0"], ["b0"], ["tau"])


def test_marked_coreachable_b0(fx):
    assert marked_coreachable(fx["B0"]) == {"b0", "b1", "b2", "b4"}
    assert blocking_states(fx["B0"]) == {"b3"}


def test_nonblocking_fixtures(fx):
    assert is_nonblocking(fx["A0"])
    assert not is_nonblocking(fx["B0"])
    assert is_nonblocking(fx["A2"]) and is_nonblocking(fx["B2"])


def test_terminal_state_is_not_blocking():
    aut = Automaton.build({"a"}, [("x", "omega", "xw")], ["x"])
    assert is_nonblocking(aut)
    assert "xw" not in reachable_states(aut)
    assert "xw" in reachable_states(aut, through_omega=True)


def test_marked_membership(fx):
    assert marked_membership(fx["B0"], "b2", ["beta", "omega"])
    assert not marked_membership(fx["B0"], "b1", ["beta", "omega"])
    with pytest.raises(ValueError):
        marked_membership(fx["B0"], "b2", ["beta"])


def test_b0_marked_traces_from_b2_and_b0(fx):
    assert marked_upto(fx["B0"], "b2", 4) == {("beta", "omega")}
    assert {spell(s) for s in marked_upto(fx["B0"], "b0", 4)} == {"w", "abw", "aabw"}


def test_a1_language_matches_regex(fx):
    pattern = re.compile(r"((aa)*bw)|((aa)*acw)")
    got = {spell(s) for s in marked_upto(fx["A1"], "a1", 6)}
    want = set()
    for n in range(6):
        for t in itertools.product("abc", repeat=n):
            w = "".join(t) + "w"
            if pattern.fullmatch(w):
                want.add(w)
    assert got == want


def test_compose_fixture_names(fx):
    p = sync_compose(fx["A1"], fx["T1"])
    assert p.initials == {"a0|q0"}
    assert all("|" in x for x in p.states)
    assert not is_nonblocking(p)
    assert is_nonblocking(sync_compose(fx["B1"], fx["T1"]))


def test_compose_interleaves_private_events():
    a = Automaton.build({"a"}, [("x", "a", "y"), ("y", "omega", "w")], ["x"], name="A")
    b = Automaton.build({"b"}, [("u", "b", "v"), ("v", "omega", "w2")], ["u"], name="B")
    p = sync_compose(a, b)
    assert p.alphabet == {"a", "b"}
    assert ("a", "b", "omega") in language_upto(p, 3)
    assert ("b", "a", "omega") in language_upto(p, 3)


def test_compose_tau_interleaves():
    a = Automaton.build({"a"}, [("x", "tau", "y"), ("y", "a", "z"), ("z", "omega", "w")], ["x"])
    b = Automaton.build({"a"}, [("u", "a", "v"), ("v", "omega", "w2")], ["u"])
    assert ("a", "omega") in language_upto(sync_compose(a, b), 2)


events = st.sampled_from(["alpha", "beta"])


@st.composite
def automata(draw, prefix="s"):
    n = draw(st.integers(1, 4))
    states = [f"{prefix}{i}" for i in range(n)]
    transitions = draw(
        st.lists(st.tuples(st.sampled_from(states), st.sampled_from(["alpha", "beta", "tau"]), st.sampled_from(states)),
                 max_size=8)
    )
    omegas = draw(st.lists(st.sampled_from(states), max_size=2))
    transitions += [(s, "omega", f"{prefix}w") for s in omegas]
    return Automaton.build({"alpha", "beta"}, transitions, [states[0]], states)


@settings(max_examples=60, deadline=None)
@given(automata("x"), automata("y"))
def test_composition_language_is_intersection(a, b):
    # over a shared alphabet the composed language is the intersection
    p = sync_compose(a, b)
    assert language_upto(p, 5) == language_upto(a, 5) & language_upto(b, 5)


@settings(max_examples=60, deadline=None)
@given(automata())
def test_format_roundtrip_property(a):
    assert load_aut(format_aut(a)) == a
