import io
import subprocess
import sys

import pytest

from conflict_preorder import fixtures
from conflict_preorder.automata import read_aut
from conflict_preorder.cli import run
from conflict_preorder.conflict import verify_counterexample


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("aut")
    out = {}
    for name in fixtures.NAMES:
        p = d / f"{name}.aut"
        p.write_text(fixtures.path(name).read_text(encoding="utf-8"), encoding="utf-8")
        out[name] = str(p)
    return out


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_preorder_holds(files):
    code, out, _ = call("preorder", files["A0"], files["B0"])
    assert code == 0
    assert out.splitlines()[0] == "PREORDER holds"


def test_preorder_fails_with_counterexample(files, tmp_path, fx):
    t = tmp_path / "out.aut"
    code, out, _ = call("preorder", files["A1"], files["B1"], "--counterexample", t)
    assert code == 1
    assert out.splitlines()[0] == "PREORDER fails pair=({a1},{b1,b2}) trace=alpha"
    assert verify_counterexample(fx["A1"], fx["B1"], read_aut(t))


def test_nonblocking(files):
    assert call("nonblocking", files["B0"])[:2] == (1, "blocking\nblocking states: b3\n")
    assert call("nonblocking", files["A0"])[:2] == (0, "nonblocking\n")


def test_equiv(files):
    code, out, _ = call("equiv", files["A2"], files["B2"])
    assert code == 0 and out.splitlines()[0] == "EQUIV yes"
    code, out, _ = call("equiv", files["A1"], files["B1"])
    assert code == 1
    assert out.splitlines() == [
        "EQUIV no",
        "PREORDER fails pair=({a1},{b1,b2}) trace=alpha",
        "PREORDER fails pair=({b1},{a1,a2}) trace=alpha",
    ]


def test_certain(files):
    code, out, _ = call("certain", files["B0"])
    assert code == 1
    assert out.splitlines() == ["CERTAIN nonempty marked=2", "marked {b1,b2}", "marked {b3,b4}"]
    assert call("certain", files["B1"])[:2] == (0, "CERTAIN empty marked=0\n")
    assert call("certain", files["B0"], "--trace", "alpha beta")[:2] == (1, "CONF yes trace=alpha,beta\n")
    assert call("certain", files["B0"], "--trace", "")[:2] == (0, "CONF no trace=\n")
    assert call("certain", files["B0"], "--trace", "omega alpha")[0] == 2


def test_lc_listing(files):
    code, out, _ = call("lc", files["A2"], files["B2"])
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "LC nodes=6 finite=5 rounds=2"
    assert "({a0},{b0,b1}) 2" in lines
    assert "({},omega) inf" in lines


def test_parse_and_compose(files, tmp_path, fx):
    code, out, _ = call("parse", files["B0"])
    assert code == 0 and out.startswith("PARSE ok name=B0 states=6 transitions=7\n")
    target = tmp_path / "p.aut"
    code, out, _ = call("compose", files["A1"], files["T1"], "-o", target)
    assert code == 0 and out.startswith("COMPOSE blocking")
    assert read_aut(target).initials == {"a0|q0"}


def test_falsify(files):
    code, out, _ = call("falsify", files["A1"], files["B1"], "--probe", files["T1"], "--budget", "5")
    assert code == 1 and out.startswith("FALSIFY found")
    code, out, _ = call("falsify", files["A2"], files["B2"], "--budget", "50", "--seed", "3", "--max-states", "2")
    assert (code, out) == (0, "FALSIFY none samples=50 seed=3\n")


def test_usage_errors(files, tmp_path):
    assert call("preorder", files["A0"])[0] == 2
    assert call("preorder", files["A0"], files["B0"], "--bogus")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call()[0] == 2
    assert call("falsify", files["A0"], files["B0"], "--budget", "0")[0] == 2


def test_parse_and_io_errors(files, tmp_path):
    bad = tmp_path / "bad.aut"
    bad.write_text("automaton X\nalphabet a\ninitial x\ntrans x omega y\ntrans y a x\n")
    code, _, err = call("parse", bad)
    assert code == 2 and "omega-successor" in err
    code, _, err = call("nonblocking", tmp_path / "missing.aut")
    assert code == 2 and "error" in err
    code, _, err = call("preorder", files["A0"], files["B0"], "--dot", tmp_path / "no" / "such" / "dir.dot")
    assert code == 2


def test_dot_is_byte_identical(files, tmp_path):
    first, second = tmp_path / "1.dot", tmp_path / "2.dot"
    call("preorder", files["A2"], files["B2"], "--dot", first)
    call("preorder", files["A2"], files["B2"], "--dot", second)
    assert first.read_bytes() == second.read_bytes()
    text = first.read_text()
    for label in ["({a0},{b0,b1}) : LC^2", "({a1},{b0,b1}) : LC^1", "({a1,a2},{b0,b1}) : LC^1",
                  "({a2},{b0,b1}) : LC^1", "(omega,omega) : LC^0", "({},omega) : LC^inf"]:
        assert f'"{label}"' in text
    assert "sink" not in text
    call("preorder", files["A2"], files["B2"], "--dot", second, "--full")
    assert '"({},{}) : LC^inf"' in second.read_text()


def test_dot_for_empty_graph(tmp_path, fx):
    from conflict_preorder.determinization import build_pair_graph
    from conflict_preorder.dot import dot_export
    from conflict_preorder.lc import lc_fixpoint

    g = build_pair_graph(fx["A1"], fx["B1"], [])
    p = tmp_path / "e.dot"
    dot_export(g, lc_fixpoint(g, fx["B1"]), p)
    text = p.read_text()
    assert text.startswith("digraph pairs {") and text.rstrip().endswith("}")
    assert "label=" not in text


def test_output_is_stable(files):
    assert call("preorder", files["B1"], files["A1"]) == call("preorder", files["B1"], files["A1"])


def test_backend_flag(files):
    assert call("--backend", "python", "preorder", files["A1"], files["B1"])[:2] == call(
        "preorder", files["A1"], files["B1"]
    )[:2]


@pytest.mark.parametrize("a, b, code", [
    ("A0", "B0", 0), ("A1", "B1", 1), ("B1", "A1", 1), ("A2", "B2", 0), ("B2", "A2", 0),
    ("B0", "B0norm", 0), ("B0norm", "B0", 0), ("A1", "T1", 1),
])
def test_exit_codes_over_fixtures(files, a, b, code):
    assert call("preorder", files[a], files[b])[0] == code


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "conflict_preorder", "nonblocking", files["B0"]],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert proc.stdout.splitlines()[0] == "blocking"
