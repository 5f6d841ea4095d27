"""Sweep counts of both update modes on random complete graphs.

Weights are drawn uniformly in (0, c_max(n)]. Prints one row per (n, mode)
with median / quartiles of the sweeps needed and the failure count.
"""
import argparse
import statistics

import numpy as np

from entangled_graphs.ansatz import pairs
from entangled_graphs.errors import EntangledGraphError
from entangled_graphs.graph_model import EntangledGraph, c_max
from entangled_graphs.solver import MODES, SolveConfig, solve


def random_graph(n, rng):
    top = c_max(n)
    return EntangledGraph(n, {e: top * (1.0 - rng.random()) for e in pairs(n)})


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=list(range(3, 11)))
    ap.add_argument("--per-n", type=int, default=50)
    ap.add_argument("--tolerance", type=float, default=1e-6)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>3} {'mode':>12} {'evaluator':>9} {'median':>7} {'q1':>5} {'q3':>5} {'max':>5} {'<=20':>6} {'failed':>6}")
    for n in args.n:
        for mode in MODES:
            rng = np.random.default_rng([args.seed, n])
            steps, failed, evaluator = [], 0, "-"
            for _ in range(args.per_n):
                try:
                    _, trace = solve(random_graph(n, rng), SolveConfig(tolerance=args.tolerance, mode=mode))
                except EntangledGraphError:
                    failed += 1
                    continue
                evaluator = trace.evaluator
                steps.append(trace.sweeps)
            if steps:
                q1, med, q3 = np.percentile(steps, [25, 50, 75])
                within = sum(s <= 20 for s in steps) / args.per_n
                print(f"{n:>3} {mode:>12} {evaluator:>9} {med:>7.1f} {q1:>5.0f} {q3:>5.0f} {max(steps):>5} "
                      f"{within:>6.0%} {failed:>6}")
            else:
                print(f"{n:>3} {mode:>12} {evaluator:>9} {'-':>7} {'-':>5} {'-':>5} {'-':>5} {'0%':>6} {failed:>6}")


if __name__ == "__main__":
    main()
