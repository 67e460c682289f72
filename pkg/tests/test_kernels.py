import importlib
import random
import sys
from array import array

import pytest

from conflict_preorder import kernels
from conflict_preorder.conflict import crucial_pairs
from conflict_preorder.determinization import build_pair_graph
from conflict_preorder.lc import LcProblem, lc_seed
from conflict_preorder.oracle import random_automaton


def test_fallback_when_extension_missing(monkeypatch):
    import conflict_preorder

    monkeypatch.setitem(sys.modules, "conflict_preorder._ckernels", None)
    monkeypatch.delattr(conflict_preorder, "_ckernels", raising=False)
    try:
        mod = importlib.reload(kernels)
        assert mod.DEFAULT == "python"
        assert set(mod.BACKENDS) == {"python"}
        with pytest.raises(ValueError):
            mod.get("cython")
    finally:
        monkeypatch.undo()
        importlib.reload(kernels)


def test_compiled_extension_built():
    # the build ships the extension; a missing compiler would only warn
    assert "cython" in kernels.BACKENDS, "compiled kernels missing, run pip install -e ."


def run_kernel(mod, problem, seed_levels):
    levels = array("i", seed_levels)
    witness = array("i", [-1] * problem.n)
    rounds = mod.lc_fixpoint(problem.n, problem.nb, problem.pred_ptr, problem.pred_src, problem.pred_lab,
                             problem.rb_ptr, problem.rb_src, problem.member, problem.b_subset,
                             levels, witness, problem.base)
    return rounds, list(levels), list(witness)


def test_raw_kernels_agree():
    if "cython" not in kernels.BACKENDS:
        pytest.skip("compiled kernels not built")
    rng = random.Random(5)
    for _ in range(40):
        a = random_automaton(rng, 7, ["alpha", "beta", "gamma"], name="A")
        b = random_automaton(rng, 7, ["alpha", "beta", "gamma"], name="B")
        g = build_pair_graph(a, b, crucial_pairs(a, b))
        problem = LcProblem(g, b)
        seed = lc_seed(g, b).levels
        assert run_kernel(kernels.get("python"), problem, seed) == run_kernel(kernels.get("cython"), problem, seed)
        assert bytes(problem.closure(seed, "python")) == bytes(problem.closure(seed, "cython"))


@pytest.mark.parametrize("name", ["python", "cython"])
def test_empty_problem(name, fx):
    if name not in kernels.BACKENDS:
        pytest.skip("compiled kernels not built")
    g = build_pair_graph(fx["A1"], fx["B1"], [])
    problem = LcProblem(g, fx["B1"])
    assert run_kernel(kernels.get(name), problem, []) == (0, [], [])
