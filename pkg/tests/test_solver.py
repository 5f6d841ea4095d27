import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import eig_concurrence, loop_marginal
from entangled_graphs import ansatz as az
from entangled_graphs import solver as sv
from entangled_graphs.errors import DomainError, MonotonicityError, NonConvergenceError
from entangled_graphs.graph_model import EntangledGraph, c_max

TRIANGLE = EntangledGraph(3, {(0, 1): 0.3, (0, 2): 0.2, (1, 2): 0.1})


def random_graph(n, rng):
    top = c_max(n)
    return EntangledGraph(n, {e: top * (1.0 - rng.random()) for e in az.pairs(n)})


def test_config_validation():
    for bad in ({"tolerance": 0.0}, {"max_sweeps": 0}, {"mode": "jacobi"}, {"concurrence": "x"}):
        with pytest.raises(DomainError):
            sv.SolveConfig(**bad)


def test_edge_update_noop_at_target():
    p = az.symmetric_params(3)
    q = sv.edge_update(p, 0, 1, az.analytic_concurrence(p, 0, 1))
    assert q.alpha == pytest.approx(p.alpha, abs=1e-15)
    assert q.g(0, 1) == pytest.approx(p.g(0, 1), abs=1e-15)


def test_edge_update_lowers_one_pair():
    p = az.symmetric_params(3)
    q = sv.edge_update(p, 0, 1, 0.2)
    assert az.analytic_concurrence(q, 0, 1) == pytest.approx(0.2, abs=1e-12)
    assert az.analytic_concurrence(q, 0, 2) > az.analytic_concurrence(p, 0, 2)
    assert az.analytic_concurrence(q, 1, 2) > az.analytic_concurrence(p, 1, 2)
    assert q.alpha**2 + q.g(0, 1) ** 2 == pytest.approx(p.alpha**2 + p.g(0, 1) ** 2, abs=1e-15)


def test_edge_update_to_zero():
    p = az.symmetric_params(3)
    q = sv.edge_update(p, 0, 1, 0.0)
    assert az.analytic_concurrence(q, 0, 1) == pytest.approx(0.0, abs=1e-12)
    psi = az.build_state(q)
    assert eig_concurrence(loop_marginal(psi.amps, 3, 0, 1)) < 1e-7


def test_edge_update_refuses_raise():
    p = az.symmetric_params(7)
    with pytest.raises(MonotonicityError):
        sv.edge_update(p, 0, 1, c_max(7) + 0.01)


def test_fixed_point_at_sweep_zero():
    for n in (3, 7):
        _, trace = sv.solve(EntangledGraph.uniform(n, c_max(n)))
        assert trace.converged and trace.sweeps == 0


def test_triangle_converges_and_oracle_agrees():
    p, trace = sv.solve(TRIANGLE)
    assert trace.converged and trace.verified_residual < 1e-9
    psi = az.build_state(p)
    for (i, j), w in TRIANGLE.edges.items():
        assert eig_concurrence(loop_marginal(psi.amps, 3, i, j)) == pytest.approx(w, abs=1e-7)
    rep = sv.verify(p, TRIANGLE)
    assert rep.max_residual < 1e-9 and rep.ckw_ok


def test_verify_trivial_cases():
    assert sv.verify(az.symmetric_params(3), EntangledGraph.uniform(3, c_max(3))).max_residual < 1e-9
    rep = sv.verify(az.ghz_params(5), EntangledGraph(5))
    assert rep.max_residual == 0.0 and rep.ckw_ok


def test_rejects_infeasible_and_tiny():
    with pytest.raises(DomainError):
        sv.solve(EntangledGraph.uniform(3, 0.4))
    with pytest.raises(DomainError):
        sv.solve(EntangledGraph(2, {(0, 1): 0.1}))


def test_nonconvergence_carries_trace():
    g = random_graph(7, np.random.default_rng(5))
    with pytest.raises(NonConvergenceError) as err:
        sv.solve(g, sv.SolveConfig(max_sweeps=1))
    assert err.value.trace is not None and len(err.value.trace.records) == 2


def test_trace_format():
    _, trace = sv.solve(TRIANGLE)
    lines = trace.format().splitlines()
    assert lines[0].startswith("#") and len(lines) == len(trace.records) + 1
    assert float(lines[-1].split()[1]) == trace.records[-1].max_residual


def test_evaluators_agree():
    rng = np.random.default_rng(11)
    for n in range(3, 8):
        p = az.random_params(n, rng)
        assert np.allclose(sv.exact_concurrences(p), sv.oracle_concurrences(p), atol=1e-9)
    p = az.random_params(8, rng)
    assert np.allclose(sv.analytic_concurrences(p), sv.oracle_concurrences(p), atol=1e-9)


def test_all_at_once_step_is_monotone():
    rng = np.random.default_rng(3)
    g = random_graph(8, rng)
    t = sv.target_matrix(g)
    p = az.symmetric_params(8)
    for _ in range(5):
        achieved = sv.analytic_concurrences(p)
        q = sv.all_at_once_update(p, t, achieved)
        assert np.all(q.gamma <= p.gamma + 1e-15) and q.alpha >= p.alpha
        assert np.all(sv.analytic_concurrences(q) >= t - 1e-12)
        p = q


@settings(max_examples=15)
@given(st.integers(7, 8), st.integers(0, 2**32 - 1), st.sampled_from(sv.MODES))
def test_solution_reproduces_targets(n, seed, mode):
    g = random_graph(n, np.random.default_rng(seed))
    p, trace = sv.solve(g, sv.SolveConfig(mode=mode, tolerance=1e-9))
    assert trace.evaluator == "analytic" and not trace.monotonicity_violations
    assert all(r.validity_slack >= -1e-12 for r in trace.records)
    assert sv.verify(p, g).max_residual <= 1e-9


@settings(max_examples=10)
@given(st.integers(0, 2**32 - 1), st.permutations(range(7)))
def test_solver_permutation_covariant(seed, perm):
    g = random_graph(7, np.random.default_rng(seed))
    h = EntangledGraph(7, {(perm[i], perm[j]): w for (i, j), w in g.edges.items()})
    p, _ = sv.solve(g, sv.SolveConfig(mode="all-at-once", tolerance=1e-12))
    q, _ = sv.solve(h, sv.SolveConfig(mode="all-at-once", tolerance=1e-12))
    assert np.allclose(p.permuted(perm).gamma, q.gamma, atol=1e-9)
    assert p.alpha == pytest.approx(q.alpha, abs=1e-9)


def test_small_n_oracle_route():
    rng = np.random.default_rng(0)
    g = random_graph(5, rng)
    p, trace = sv.solve(g)
    assert trace.evaluator == "oracle"
    assert sv.verify(p, g).max_residual <= 1e-9
