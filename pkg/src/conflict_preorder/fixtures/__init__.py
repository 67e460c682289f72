"""Small example automata shipped with the package."""

from importlib import resources

from ..automata import Automaton, load_aut

NAMES = ("A0", "B0", "B0norm", "A1", "B1", "T1", "A2", "B2")


def path(name: str):
    return resources.files(__name__) / f"{name}.aut"


def load(name: str) -> Automaton:
    return load_aut(path(name).read_text(encoding="utf-8"))


def load_all() -> dict[str, Automaton]:
    return {name: load(name) for name in NAMES}
