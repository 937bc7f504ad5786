"""Time the routing backends on a full evaluation and on whole evolutions.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from evotree import kernels
from evotree.data import generate_multiplexor, generate_parity
from evotree.evolve import EvolutionConfig, evolve
from evotree.operators import random_predicate
from evotree.tree import DecisionTree, EvalCounters, evaluate_full


def random_tree(dataset, leaves, rng):
    """Grow a tree by splitting random leaves until it has ``leaves`` leaves."""
    t = DecisionTree.stump(random_predicate(dataset.attributes, rng), 0, 1)
    while len(t.leaves()) < leaves:
        target = t.leaves()[int(rng.integers(len(t.leaves())))]
        sub = DecisionTree.stump(random_predicate(dataset.attributes, rng),
                                 int(rng.integers(2)), int(rng.integers(2)))
        t.graft(target, sub, sub.root)
    return t.compact()


def time_call(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best * 1e3


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.Generator(np.random.PCG64(1))
    backends = sorted(kernels.BACKENDS)
    print(f"backends: {backends} (default {kernels.backend})")

    print("\nfull evaluation, best of", args.repeat, "(ms)")
    print(f"{'dataset':<14}{'leaves':>7}" + "".join(f"{b:>12}" for b in backends))
    for ds in (generate_multiplexor(3), generate_parity(12)):
        for leaves in (8, 64):
            tree = random_tree(ds, leaves, rng)
            cells = []
            for b in backends:
                kernels.use_backend(b)
                cells.append(time_call(lambda: evaluate_full(tree, ds, EvalCounters()), args.repeat))
            print(f"{ds.name:<14}{leaves:>7}" + "".join(f"{c:>12.3f}" for c in cells))

    print("\nevolution, pop=gens=50, incremental engine (ms)")
    print(f"{'dataset':<14}" + "".join(f"{b:>12}" for b in backends if b != "python"))
    for ds in (generate_multiplexor(2), generate_multiplexor(3)):
        cells = []
        for b in backends:
            if b == "python":
                continue
            kernels.use_backend(b)
            cfg = EvolutionConfig(population_size=50, generations=50, seed=0)
            cells.append(time_call(lambda: evolve(cfg, ds), 1))
        print(f"{ds.name:<14}" + "".join(f"{c:>12.1f}" for c in cells))


if __name__ == "__main__":
    main()
