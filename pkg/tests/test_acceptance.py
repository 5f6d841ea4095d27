"""Acceptance criteria, one test each.

Every test prints a single ``CRITERION k: PASS|FAIL ...`` line; the lines are
repeated in the pytest terminal summary and by ``python3 tests/test_acceptance.py``.
"""
from __future__ import annotations

import math
import statistics
import time
from collections import defaultdict

import numpy as np
import pytest

from entangled_graphs import ansatz as az
from entangled_graphs import circuit as cc
from entangled_graphs import simulator as sim
from entangled_graphs import solver as sv
from entangled_graphs.errors import EntangledGraphError, NonConvergenceError
from entangled_graphs.graph_model import EntangledGraph, c_max
from entangled_graphs.quantum_core import (
    StateVector,
    ckw_audit,
    concurrence_matrix,
    pair_concurrence,
    symmetric_state,
    web_state,
)

RESULTS: dict[int, str] = {}
AUDITED: list[StateVector] = []  # every state produced here, checked by criterion 9

SUITE_SEED = 1234
SUITE_PER_N = 100
SUITE_NS = range(3, 9)


def report(k: int, ok: bool, detail: str) -> bool:
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    RESULTS[k] = line
    print(line)
    return ok


def suite_graph(n: int, idx: int) -> EntangledGraph:
    """Complete graph with weights uniform in (0, c_max(n)], reproducible per (n, idx)."""
    rng = np.random.default_rng([SUITE_SEED, n, idx])
    top = c_max(n)
    return EntangledGraph(n, {e: top * (1.0 - rng.random()) for e in az.pairs(n)})


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    worst = 0.0
    for n in range(3, 9):
        psi = symmetric_state(n, 1)
        AUDITED.append(psi)
        cm = concurrence_matrix(psi)
        worst = max(worst, float(np.max(np.abs(cm[~np.eye(n, dtype=bool)] - 2.0 / n))))
    dt = time.perf_counter() - t0
    return report(1, worst <= 1e-10 and dt < 1.0,
                  f"W-state pair concurrence = 2/n for n=3..8, max error {worst:.2e}, {dt:.3f} s")


def criterion_2():
    worst = 0.0
    for n in range(3, 7):
        for c in (0.05, 0.1, 2.0 / n):
            x = math.sqrt(c * n / 2.0)
            amps = math.sqrt(1.0 - x * x) * symmetric_state(n, 0).amps + x * symmetric_state(n, 1).amps
            psi = StateVector.from_amplitudes(amps)
            assert np.allclose(psi.amps, web_state(n, c).amps)
            AUDITED.append(psi)
            cm = concurrence_matrix(psi)
            worst = max(worst, float(np.max(np.abs(cm[~np.eye(n, dtype=bool)] - c))))
    return report(2, worst <= 1e-10, f"web states n=3..6, C in {{0.05, 0.1, 2/n}}, max error {worst:.2e}")


def criterion_3():
    rng = np.random.default_rng(SUITE_SEED)
    t0 = time.perf_counter()
    per_n = defaultdict(lambda: [0, 0, 0.0])  # instances, agreeing, worst error
    for k in range(500):
        n = 3 + k % 5
        p = az.random_params(n, rng, density=0.3 + 0.7 * rng.random())
        psi = az.build_state(p)
        AUDITED.append(psi)
        err = max(abs(az.analytic_concurrence(p, i, j) - pair_concurrence(psi, i, j)) for i, j in az.pairs(n))
        row = per_n[n]
        row[0] += 1
        row[1] += err <= 1e-9
        row[2] = max(row[2], err)
    dt = time.perf_counter() - t0
    ok = all(r[0] == r[1] for r in per_n.values()) and dt < 30.0
    detail = ", ".join(f"n={n}: {r[1]}/{r[0]} (worst {r[2]:.1e})" for n, r in sorted(per_n.items()))
    return report(3, ok, f"closed form vs oracle on 500 random states; {detail}; {dt:.1f} s")


def criterion_4():
    t0 = time.perf_counter()
    cfg = sv.SolveConfig(tolerance=1e-6, max_sweeps=200, mode="per-edge")
    rows = {}
    for n in SUITE_NS:
        good = nonconv = violated = 0
        for idx in range(SUITE_PER_N):
            g = suite_graph(n, idx)
            try:
                p, trace = sv.solve(g, cfg)
            except NonConvergenceError as exc:
                nonconv += 1
                trace = exc.trace
                if trace is not None and (trace.monotonicity_violations or trace.validity_violations):
                    violated += 1
                continue
            except EntangledGraphError:
                # strict mode raises on the first invariant violation
                violated += 1
                nonconv += 1
                continue
            AUDITED.append(az.build_state(p))
            clean = not trace.monotonicity_violations and not trace.validity_violations
            violated += not clean
            good += clean and trace.verified_residual <= 1e-6
        rows[n] = (good, nonconv, violated)
    dt = time.perf_counter() - t0
    ok = all(r[0] == SUITE_PER_N for r in rows.values()) and dt < 120.0
    detail = "; ".join(f"n={n}: {g}/{SUITE_PER_N} ok, {c} non-converged, {v} with invariant violations"
                       for n, (g, c, v) in rows.items())
    return report(4, ok, f"per-edge suite, {detail}; {dt:.1f} s")


def criterion_5():
    cfg = sv.SolveConfig(tolerance=1e-6, max_sweeps=200, mode="all-at-once")
    steps = []
    per_n = {}
    for n in SUITE_NS:
        local = []
        for idx in range(SUITE_PER_N):
            try:
                _, trace = sv.solve(suite_graph(n, idx), cfg)
                local.append(trace.sweeps)
            except EntangledGraphError:
                local.append(math.inf)
        per_n[n] = local
        steps += local
    med = statistics.median(steps)
    frac = sum(s <= 20 for s in steps) / len(steps)
    finite = [s for s in steps if s != math.inf]
    hist = np.histogram(finite, bins=[0, 5, 10, 15, 20, 50, 201])[0].tolist() if finite else []
    per = ", ".join(
        f"n={n}: median {statistics.median(v)}, <=20 in {sum(s <= 20 for s in v)}%" for n, v in per_n.items()
    )
    soft = "met" if frac >= 0.9 else "missed"
    ok = med <= 50
    return report(5, ok, f"all-at-once median {med} steps (hard bound 50); <=20 steps in {frac:.0%} "
                         f"(soft 90% target {soft}); histogram [0,5,10,15,20,50,201] {hist}; "
                         f"{len(steps) - len(finite)} non-converged; {per}")


def criterion_6():
    worst_lambda = max(abs(az.symmetric_lambda(n) - c_max(n)) for n in range(3, 65))
    worst_formula = 0.0
    for n in range(3, 65):
        p = az.symmetric_params(n)
        worst_formula = max(worst_formula, abs(az.analytic_concurrence(p, 0, n - 1) - c_max(n)))
    state_err = {}
    for n in range(3, 11):
        psi = az.build_state(az.symmetric_params(n))
        AUDITED.append(psi)
        cm = concurrence_matrix(psi)
        state_err[n] = float(np.max(np.abs(cm[~np.eye(n, dtype=bool)] - c_max(n))))
    bad = [n for n, e in state_err.items() if e > 1e-10]
    ok = worst_lambda <= 1e-12 and worst_formula <= 1e-10 and not bad
    detail = ", ".join(f"n={n}: {e:.1e}" for n, e in state_err.items())
    return report(6, ok, f"lambda vs c_max max error {worst_lambda:.1e} (n=3..64); closed form at the "
                         f"symmetric point {worst_formula:.1e}; state-level error {detail}"
                         + (f"; exceeds 1e-10 at n={bad}" if bad else ""))


def criterion_7():
    done = []
    skipped = defaultdict(int)
    idx = 0
    while len(done) < 20 and idx < 400:
        n = 3 + idx % 6
        g = suite_graph(n, 1000 + idx)
        idx += 1
        try:
            p, _ = sv.solve(g, sv.SolveConfig(tolerance=1e-10))
        except EntangledGraphError:
            skipped[n] += 1
            continue
        done.append((g, p))
    worst_fid = worst_anc = worst_c = 0.0
    count_ok = True
    ns = set()
    for g, p in done:
        c = cc.build_corrected(p)
        res = sim.run(c, target=az.build_state(p))
        graph_amps = res.final.amps.reshape(-1, 8)[:, cc.ANCILLA_START]
        psi = StateVector.from_amplitudes(graph_amps, normalize=True)
        AUDITED.append(psi)
        measured = max(abs(pair_concurrence(psi, i, j) - g.weight(i, j)) for i, j in az.pairs(g.n))
        worst_fid = max(worst_fid, 1.0 - res.fidelity_vs_target)
        worst_anc = max(worst_anc, res.ancilla_product_error)
        worst_c = max(worst_c, measured)
        count_ok &= len(c.ops) == 2 * len(g.edges) + 1 and set(c.counts) == {"TLR"}
        ns.add(g.n)
    ok = len(done) == 20 and worst_fid <= 1e-10 and worst_anc < 1e-10 and worst_c <= 1e-8 and count_ok
    skip = f"; unsolved draws skipped {dict(skipped)}" if skipped else ""
    return report(7, ok, f"{len(done)} graphs over n={sorted(ns)}: 1-fidelity {worst_fid:.1e}, ancilla error "
                         f"{worst_anc:.1e}, concurrence error {worst_c:.1e}, TLR count 2E+1 "
                         f"{'exact' if count_ok else 'WRONG'}{skip}")


def criterion_8():
    bad = []
    for n in range(3, 13):
        sizes = cc.build_literal(az.symmetric_params(n)).stage_sizes()
        want = {"prologue": n + 1, "G1": n * (n - 1) + 1, "G2": 3 * n + 1, "G3": 3 * n}
        if any(sizes[k] != v for k, v in want.items()):
            bad.append(n)
    return report(8, not bad, "literal stage counts prologue N+1, G1 N(N-1)+1, G2 3N+1, G3 3N for n=3..12"
                              + (f"; mismatch at n={bad}" if bad else ""))


def criterion_9():
    a = cc.a_gate_matrix()
    aa_err = float(np.max(np.abs(a @ a - cc.a_squared_matrix())))
    rng = np.random.default_rng(SUITE_SEED)
    gates = [cc.Gate("X", (0,)), cc.Gate("H", (0,)), cc.cnot(0, 1), cc.toffoli(0, 1, 2), cc.cmsz(0, 1),
             cc.ca(0, 1, 2), cc.cainv(0, 1, 2)]
    gates += [cc.cr(float(x), 0, 1, 2) for x in rng.uniform(-1, 1, 20)]
    gates += [cc.tlr(float(x), 0, 1) for x in rng.uniform(-math.pi, math.pi, 20)]
    uni_err = max(float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))) for m in (g.matrix() for g in gates))
    if not AUDITED:
        for crit in (criterion_1, criterion_2, criterion_6):
            crit()
    worst = -math.inf
    for psi in AUDITED:
        for _, lhs, rhs in ckw_audit(psi):
            worst = max(worst, lhs - rhs)
    ok = aa_err <= 1e-12 and uni_err <= 1e-12 and worst <= 1e-9
    return report(9, ok, f"A*A error {aa_err:.1e}; unitarity error {uni_err:.1e} over {len(gates)} gates; "
                         f"CKW max(sum C^2 - tangle^2) {worst:.1e} over {len(AUDITED)} states")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("k", range(1, 10))
def test_criterion(k):
    assert CRITERIA[k - 1](), RESULTS[k]


if __name__ == "__main__":
    for crit in CRITERIA:
        crit()
