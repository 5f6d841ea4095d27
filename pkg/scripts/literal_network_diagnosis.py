"""Run the transcribed preparation network and report where it departs.

For each n the target is the solver output for a random complete graph (or the
symmetric state with --symmetric). Prints gate counts, stage fidelities and the
first basis component that misses its intended amplitude, next to the
corrected two-level-rotation circuit for comparison.
"""
import argparse

import numpy as np

from entangled_graphs.ansatz import build_state, pairs, symmetric_params
from entangled_graphs.circuit import build_corrected, build_literal
from entangled_graphs.errors import EntangledGraphError
from entangled_graphs.graph_model import EntangledGraph, c_max
from entangled_graphs.simulator import diagnose_literal, run
from entangled_graphs.solver import solve


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[3, 5, 7])
    ap.add_argument("--symmetric", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for n in args.n:
        if args.symmetric:
            p = symmetric_params(n)
        else:
            rng = np.random.default_rng([args.seed, n])
            g = EntangledGraph(n, {e: c_max(n) * (1 - rng.random()) for e in pairs(n)})
            try:
                p, _ = solve(g)
            except EntangledGraphError as exc:
                print(f"n={n}: solver failed ({exc}); using the symmetric state")
                p = symmetric_params(n)
        lit = build_literal(p)
        cor = build_corrected(p)
        target = build_state(p)
        print(f"== n={n}")
        print(f"literal ops {len(lit.ops)} {dict(lit.stage_sizes())}")
        for line in diagnose_literal(lit, p).lines():
            print(f"  {line}")
        res = run(cor, target=target)
        print(f"corrected ops {len(cor.ops)}, fidelity {res.fidelity_vs_target:.12g}, "
              f"ancilla error {res.ancilla_product_error:.3g}")


if __name__ == "__main__":
    main()
