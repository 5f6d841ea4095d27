"""Fixed-point iteration from target pair concurrences to ansatz amplitudes.

The iteration starts from the permutation-symmetric state, where every pair
concurrence equals ``c_max(n)``, and lowers one ``gamma_ij`` at a time so that
the pair ``{i, j}`` hits its target exactly. Lowering a gamma raises
``alpha`` (the sum ``alpha^2 + gamma_ij^2`` is conserved) and can only
increase every other pair concurrence, so targets are approached from above.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ansatz import (
    AnsatzParams,
    analytic_concurrence,
    build_state,
    check_validity,
    formula_is_exact,
    pairs,
    raw_concurrence,
    symmetric_params,
)
from .errors import DomainError, MonotonicityError, NonConvergenceError, NumericError
from .graph_model import EntangledGraph, validate
from .quantum_core import SIGMA_YY, StateVector, pair_concurrence, tangle_with_rest

RADICAND_TOL = 1e-12
MONO_TOL = 1e-12

MODES = ("per-edge", "all-at-once")
EVALUATORS = ("auto", "analytic", "oracle")


@dataclass
class SolveConfig:
    tolerance: float = 1e-9
    max_sweeps: int = 200
    mode: str = "per-edge"
    record_trace: bool = True
    # "auto": closed form where it is exact (n >= 7), exact marginals below
    concurrence: str = "auto"
    check_invariants: bool = True

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")
        if self.max_sweeps < 1:
            raise DomainError("max_sweeps must be >= 1")
        if self.mode not in MODES:
            raise DomainError(f"mode must be one of {MODES}")
        if self.concurrence not in EVALUATORS:
            raise DomainError(f"concurrence must be one of {EVALUATORS}")


@dataclass
class SweepRecord:
    sweep: int
    mode: str
    alpha: float
    gamma: np.ndarray
    achieved: np.ndarray
    max_residual: float
    validity_slack: float


@dataclass
class IterationTrace:
    n: int
    evaluator: str
    records: list[SweepRecord] = field(default_factory=list)
    monotonicity_violations: list = field(default_factory=list)
    validity_violations: list = field(default_factory=list)
    fallback_sweep: int | None = None
    converged: bool = False
    sweeps: int = 0
    verified_residual: float = math.inf

    @property
    def residuals(self) -> list[float]:
        return [r.max_residual for r in self.records]

    def format(self) -> str:
        lines = ["# sweep max_residual alpha gamma_max"]
        for r in self.records:
            lines.append(f"{r.sweep} {r.max_residual!r} {r.alpha!r} {float(r.gamma.max())!r}")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Concurrence evaluators


def analytic_concurrences(p: AnsatzParams) -> np.ndarray:
    """Closed-form pair concurrences for all pairs at once (clamped at zero)."""
    g = p.gamma
    g2 = g * g
    s = g2.sum(axis=1)
    raw = 2.0 * (2.0 * p.alpha * g - (s[:, None] - g2) - (s[None, :] - g2))
    out = np.maximum(raw, 0.0)
    np.fill_diagonal(out, 0.0)
    return out


def _pair_block(amps: np.ndarray, n: int, i: int, j: int) -> np.ndarray:
    return np.moveaxis(amps.reshape([2] * n), [i, j], [0, 1]).reshape(4, -1)


def _fast_pair(amps: np.ndarray, n: int, i: int, j: int) -> float:
    # singular values of L^T (sy sy) L with L the 4 x 2^(n-2) amplitude block
    block = _pair_block(amps, n, i, j)
    sv = np.linalg.svd(block.T @ SIGMA_YY @ block, compute_uv=False)
    sv = np.concatenate([sv[:4], np.zeros(max(0, 4 - sv.size))])
    return max(0.0, float(sv[0] - sv[1] - sv[2] - sv[3]))


def exact_concurrences(p: AnsatzParams) -> np.ndarray:
    """Pair concurrences of the built state via LAPACK SVD (inner-loop route)."""
    amps = build_state(p).amps.real
    out = np.zeros((p.n, p.n))
    for i, j in pairs(p.n):
        out[i, j] = out[j, i] = _fast_pair(amps, p.n, i, j)
    return out


def oracle_concurrences(p: AnsatzParams) -> np.ndarray:
    """Pair concurrences via partial trace and the Jacobi-based Wootters oracle."""
    psi = build_state(p)
    out = np.zeros((p.n, p.n))
    for i, j in pairs(p.n):
        out[i, j] = out[j, i] = pair_concurrence(psi, i, j)
    return out


def _evaluator(name: str, n: int) -> tuple[str, Callable]:
    if name == "auto":
        name = "analytic" if formula_is_exact(n) else "oracle"
    if name == "analytic":
        return name, analytic_concurrences
    return name, exact_concurrences


# ---------------------------------------------------------------------------
# Updates


def edge_update(p: AnsatzParams, i: int, j: int, target: float, current: float | None = None,
                allow_increase: bool = False) -> AnsatzParams:
    """Move pair {i, j} to ``target`` changing only gamma_ij and alpha.

    ``current`` defaults to the closed-form concurrence of ``p``. The new
    amplitudes solve ``a' g' = a g + (target - current) / 4`` with
    ``a'^2 + g'^2 = a^2 + g^2``.
    """
    if i > j:
        i, j = j, i
    if current is None:
        current = analytic_concurrence(p, i, j)
    delta = target - current
    if delta > MONO_TOL and not allow_increase:
        raise MonotonicityError(
            f"pair ({i}, {j}): current concurrence {current!r} below target {target!r}"
        )
    a, g = p.alpha, p.g(i, j)
    u2 = (a + g) ** 2 + 0.5 * delta
    v2 = (a - g) ** 2 - 0.5 * delta
    for name, val in (("U", u2), ("V", v2)):
        if val < -RADICAND_TOL:
            raise NumericError(f"negative radicand {name}^2 = {val!r} on pair ({i}, {j})")
    u = math.sqrt(max(u2, 0.0))
    v = math.sqrt(max(v2, 0.0))
    if u < v:
        # only reachable with an exact (non closed-form) current value
        return p.with_update(i, j, math.sqrt(a * a + g * g), 0.0)
    return p.with_update(i, j, 0.5 * (u + v), 0.5 * (u - v))


def all_at_once_update(p: AnsatzParams, targets: np.ndarray, achieved: np.ndarray) -> AnsatzParams:
    """Shift every gamma so that a * gamma absorbs a quarter of its residual, then renormalize alpha."""
    g = p.gamma + (targets - achieved) / (4.0 * p.alpha)
    g = np.maximum(g, 0.0)
    np.fill_diagonal(g, 0.0)
    rad = 0.5 - 0.5 * float(np.sum(g * g))
    if rad <= 0:
        raise NumericError("all-at-once update left no amplitude for alpha")
    return AnsatzParams(p.n, math.sqrt(rad), g)


# ---------------------------------------------------------------------------
# Driver


def target_matrix(g: EntangledGraph) -> np.ndarray:
    t = np.zeros((g.n, g.n))
    for (i, j), w in g.edges.items():
        t[i, j] = t[j, i] = w
    return t


def _max_residual(achieved: np.ndarray, targets: np.ndarray) -> float:
    return float(np.max(np.abs(achieved - targets))) if achieved.size else 0.0


class _Run:
    def __init__(self, g: EntangledGraph, cfg: SolveConfig):
        self.g = g
        self.cfg = cfg
        self.targets = target_matrix(g)
        self.evaluator, self.evaluate = _evaluator(cfg.concurrence, g.n)
        self.strict = self.evaluator == "analytic"
        self.trace = IterationTrace(g.n, self.evaluator)
        self.order = pairs(g.n)

    def record(self, sweep: int, mode: str, p: AnsatzParams, achieved: np.ndarray, resid: float):
        slack = p.validity_slack()
        if slack < -1e-12:
            self.trace.validity_violations.append((sweep, slack))
            if self.strict:
                raise MonotonicityError(f"validity condition lost at sweep {sweep} (slack {slack!r})")
        if self.cfg.record_trace:
            self.trace.records.append(
                SweepRecord(sweep, mode, p.alpha, p.gamma.copy(), achieved.copy(), resid, slack)
            )

    def violation(self, sweep: int, pair, what: str):
        self.trace.monotonicity_violations.append((sweep, pair, what))
        if self.strict:
            raise MonotonicityError(f"sweep {sweep}, pair {pair}: {what}")

    def per_edge_sweep(self, sweep: int, p: AnsatzParams, achieved: np.ndarray) -> AnsatzParams:
        check = self.cfg.check_invariants
        for i, j in self.order:
            target = self.targets[i, j]
            if self.strict:
                current = max(raw_concurrence(p, i, j), 0.0)
            else:
                current = achieved[i, j]
            if current < target - MONO_TOL:
                self.violation(sweep, (i, j), f"concurrence {current!r} below target {target!r}")
            if abs(current - target) == 0.0:
                continue
            new = edge_update(p, i, j, target, current, allow_increase=not self.strict)
            if check or not self.strict:
                after = self.evaluate(new)
                if check:
                    self.check_step(sweep, (i, j), p, new, achieved, after)
                achieved = after
            p = new
        return p

    def check_step(self, sweep, pair, old, new, before, after):
        i, j = pair
        if new.g(i, j) > old.g(i, j) + MONO_TOL:
            self.violation(sweep, pair, "gamma increased")
        if new.alpha < old.alpha - MONO_TOL:
            self.violation(sweep, pair, "alpha decreased")
        mask = np.ones_like(before, dtype=bool)
        mask[i, j] = mask[j, i] = False
        drop = (before - after)[mask]
        if drop.size and drop.max() > 1e-10:
            self.violation(sweep, pair, f"another pair concurrence dropped by {drop.max():.3e}")

    def all_at_once_step(self, sweep: int, p: AnsatzParams, achieved: np.ndarray) -> AnsatzParams | None:
        if np.any(achieved < self.targets - MONO_TOL):
            return None
        new = all_at_once_update(p, self.targets, achieved)
        if self.cfg.check_invariants and (
            np.any(new.gamma > p.gamma + MONO_TOL) or new.alpha < p.alpha - MONO_TOL
        ):
            return None
        return new

    def verify(self, p: AnsatzParams) -> float:
        resid = _max_residual(oracle_concurrences(p), self.targets)
        self.trace.verified_residual = resid
        return resid

    def run(self, p: AnsatzParams) -> tuple[AnsatzParams, IterationTrace]:
        mode = self.cfg.mode
        tol = self.cfg.tolerance
        for sweep in range(self.cfg.max_sweeps + 1):
            achieved = self.evaluate(p)
            resid = _max_residual(achieved, self.targets)
            self.record(sweep, mode, p, achieved, resid)
            if resid <= tol:
                verified = self.verify(p)
                if verified <= tol:
                    self.trace.converged = True
                    self.trace.sweeps = sweep
                    return p, self.trace
                if self.strict:
                    raise NonConvergenceError(
                        f"closed form reports residual {resid:.3e} but the oracle measures "
                        f"{verified:.3e}; the closed form is not exact for n={self.g.n}",
                        self.trace,
                    )
            if sweep == self.cfg.max_sweeps:
                break
            if mode == "all-at-once":
                new = self.all_at_once_step(sweep, p, achieved)
                if new is None:
                    self.trace.fallback_sweep = sweep
                    mode = "per-edge"
                else:
                    p = new
                    continue
            p = self.per_edge_sweep(sweep + 1, p, achieved)
        self.trace.sweeps = self.cfg.max_sweeps
        raise NonConvergenceError(
            f"no convergence within {self.cfg.max_sweeps} sweeps "
            f"(last residual {self.trace.records[-1].max_residual if self.trace.records else resid:.3e})",
            self.trace,
        )


def solve(g: EntangledGraph, cfg: SolveConfig | None = None,
          initial: AnsatzParams | None = None) -> tuple[AnsatzParams, IterationTrace]:
    cfg = cfg or SolveConfig()
    if g.n < 3:
        raise DomainError("solve needs at least 3 qubits")
    report = validate(g)
    if not report.feasible:
        raise DomainError(f"graph exceeds c_max({g.n}) = {report.c_max_bound:.12g} on {len(report.violations)} edge(s)")
    p = initial if initial is not None else symmetric_params(g.n)
    if p.n != g.n:
        raise DomainError("initial parameters have the wrong qubit count")
    return _Run(g, cfg).run(p)


# ---------------------------------------------------------------------------
# Verification report


@dataclass
class ResidualReport:
    rows: list  # (i, j, target, achieved, residual)
    max_residual: float
    ckw: list  # (j, sum_k C_jk^2, tangle_j^2, ok)

    @property
    def ckw_ok(self) -> bool:
        return all(row[3] for row in self.ckw)


def verify(p: AnsatzParams, g: EntangledGraph, ckw_slack: float = 1e-9) -> ResidualReport:
    if p.n != g.n:
        raise DomainError("parameter and graph sizes differ")
    psi: StateVector = build_state(p)
    cm = np.zeros((p.n, p.n))
    rows = []
    for i, j in pairs(p.n):
        c = pair_concurrence(psi, i, j)
        cm[i, j] = cm[j, i] = c
        t = g.weight(i, j)
        rows.append((i, j, t, c, abs(c - t)))
    ckw = []
    for v in range(p.n):
        lhs = float(np.sum(cm[v] ** 2))
        rhs = tangle_with_rest(psi, v) ** 2
        ckw.append((v, lhs, rhs, lhs <= rhs + ckw_slack))
    return ResidualReport(rows, max((r[4] for r in rows), default=0.0), ckw)
