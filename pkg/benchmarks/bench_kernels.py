"""Compare the compiled and pure-Python LC kernels on random automaton pairs.

    python benchmarks/bench_kernels.py --pairs 20 --states 8

Pair graphs are built once per pair; only the fixpoint kernel is timed.
"""

import argparse
import random
import statistics
import timeit
from array import array

from conflict_preorder import kernels
from conflict_preorder.conflict import crucial_pairs
from conflict_preorder.determinization import build_pair_graph
from conflict_preorder.lc import LcProblem, lc_seed
from conflict_preorder.oracle import random_automaton


def make_problem(rng, states, events):
    alphabet = ["alpha", "beta", "gamma", "delta"][:events]
    a = random_automaton(rng, 0, alphabet, tau=0.3, name="A", n_states=states)
    b = random_automaton(rng, 0, alphabet, tau=0.3, name="B", n_states=states)
    graph = build_pair_graph(a, b, crucial_pairs(a, b))
    return LcProblem(graph, b), lc_seed(graph, b).levels


def time_kernel(mod, problem, seed, repeat):
    def once():
        levels = array("i", seed)
        witness = array("i", [-1] * problem.n)
        mod.lc_fixpoint(problem.n, problem.nb, problem.pred_ptr, problem.pred_src, problem.pred_lab,
                        problem.rb_ptr, problem.rb_src, problem.member, problem.b_subset,
                        levels, witness, problem.base)

    number = 5
    return min(timeit.repeat(once, number=number, repeat=repeat)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--pairs", type=int, default=20)
    parser.add_argument("--states", type=int, default=8)
    parser.add_argument("--events", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = sorted(kernels.BACKENDS)
    if "cython" not in backends:
        print("compiled kernels not built; timing the pure-Python kernel only")
    rng = random.Random(args.seed)
    problems = [make_problem(rng, args.states, args.events) for _ in range(args.pairs)]
    problems.sort(key=lambda p: p[0].n)

    print(f"{'nodes':>7} " + " ".join(f"{b + ' ms':>11}" for b in backends) + ("    speedup" if len(backends) > 1 else ""))
    ratios = []
    totals = dict.fromkeys(backends, 0.0)
    for problem, seed in problems:
        row = {b: time_kernel(kernels.get(b), problem, seed, args.repeat) for b in backends}
        for b in backends:
            totals[b] += row[b]
        line = f"{problem.n:>7} " + " ".join(f"{row[b] * 1e3:>11.3f}" for b in backends)
        if len(backends) > 1 and row["cython"] > 0:
            ratios.append(row["python"] / row["cython"])
            line += f" {ratios[-1]:>10.1f}x"
        print(line)
    print("total   " + " ".join(f"{totals[b] * 1e3:>11.3f}" for b in backends))
    if ratios:
        print(f"median speedup {statistics.median(ratios):.1f}x over {len(ratios)} pairs")


if __name__ == "__main__":
    main()
