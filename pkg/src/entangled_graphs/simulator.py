"""Dense state-vector execution of preparation circuits."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzParams, build_state, pairs
from .circuit import ANCILLA_START, Circuit, Gate, a_gate_matrix, alpha_schedule, r_gate_matrix
from .errors import CapacityError, DomainError
from .quantum_core import StateVector, reduced_density

MAX_QUBITS = 23


def _apply_controlled(t: np.ndarray, controls, targets, u: np.ndarray):
    """In place: apply ``u`` on ``targets`` of tensor ``t`` where every control is 1."""
    q = t.ndim
    index = [slice(None)] * q
    for c in controls:
        index[c] = 1
    sub = t[tuple(index)]
    remaining = [a for a in range(q) if a not in controls]
    axes = [remaining.index(x) for x in targets]
    view = np.moveaxis(sub, axes, list(range(len(targets))))
    shape = view.shape
    block = view.reshape(1 << len(targets), -1)
    view[...] = (u @ block).reshape(shape)


def _apply_inplace(amps: np.ndarray, q: int, g: Gate):
    k = g.kind
    if k == "TLR":
        a, b = g.qubits
        if max(a, b) >= amps.size:
            raise DomainError(f"TLR basis index out of range: {g.qubits}")
        c, s = math.cos(g.theta), math.sin(g.theta)
        va, vb = amps[a], amps[b]
        amps[a] = c * va - s * vb
        amps[b] = s * va + c * vb
        return
    if max(g.qubits) >= q:
        raise DomainError(f"{k} qubit index out of range for {q} qubits: {g.qubits}")
    t = amps.reshape([2] * q)
    if k == "X":
        _apply_controlled(t, (), g.qubits, np.array([[0, 1], [1, 0]], dtype=complex))
    elif k == "H":
        _apply_controlled(t, (), g.qubits, np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2.0))
    elif k == "CNOT":
        _apply_controlled(t, g.qubits[:1], g.qubits[1:], np.array([[0, 1], [1, 0]], dtype=complex))
    elif k == "TOFFOLI":
        _apply_controlled(t, g.qubits[:2], g.qubits[2:], np.array([[0, 1], [1, 0]], dtype=complex))
    elif k == "CMSZ":
        _apply_controlled(t, g.qubits[:1], g.qubits[1:], np.diag([-1.0, 1.0]).astype(complex))
    elif k == "CR":
        _apply_controlled(t, g.qubits[:1], g.qubits[1:], r_gate_matrix(g.theta).astype(complex))
    elif k == "CA":
        _apply_controlled(t, g.qubits[:1], g.qubits[1:], a_gate_matrix().astype(complex))
    elif k == "CAINV":
        _apply_controlled(t, g.qubits[:1], g.qubits[1:], a_gate_matrix().T.astype(complex))
    else:
        raise DomainError(f"unknown gate {k!r}")


def apply_gate(state: StateVector, g: Gate) -> StateVector:
    amps = np.array(state.amps, dtype=complex)
    _apply_inplace(amps, state.q, g)
    return StateVector(state.q, amps)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.q != b.q:
        raise DomainError(f"qubit counts differ ({a.q} vs {b.q})")
    return float(min(1.0, abs(np.vdot(a.amps, b.amps)) ** 2))


def ancilla_register(n: int) -> StateVector:
    return StateVector.basis(3, ANCILLA_START)


def with_ancillas(graph_state: StateVector) -> StateVector:
    return graph_state.tensor(ancilla_register(graph_state.q))


def ancilla_product_error(final: StateVector, n: int) -> float:
    """Frobenius distance between the ancilla marginal and |100><100|."""
    rho = reduced_density(final, [n, n + 1, n + 2])
    ideal = np.zeros((8, 8))
    ideal[ANCILLA_START, ANCILLA_START] = 1.0
    return float(np.linalg.norm(rho - ideal))


@dataclass
class SimResult:
    final: StateVector
    fidelity_vs_target: float
    ancilla_product_error: float
    snapshots: dict = field(default_factory=dict)
    norm_drift: float = 0.0


def run(c: Circuit, initial: StateVector | None = None, target: StateVector | None = None,
        snapshots: bool = False) -> SimResult:
    q = c.num_qubits
    if q > MAX_QUBITS:
        raise CapacityError(f"{q} qubits exceed the dense simulation limit of {MAX_QUBITS}")
    if initial is None:
        initial = StateVector.basis(q, c.initial_index())
    if initial.q != q:
        raise DomainError(f"initial state has {initial.q} qubits, circuit needs {q}")
    if target is None:
        target = initial
    elif target.q == c.n:
        target = with_ancillas(target)
    if target.q != q:
        raise DomainError(f"target has {target.q} qubits, circuit needs {q} (or {c.n})")
    amps = np.array(initial.amps, dtype=complex)
    stage_end = {stop: name for name, _, stop in c.stages}
    snaps = {}
    for k, g in enumerate(c.ops):
        _apply_inplace(amps, q, g)
        if snapshots and (k + 1) in stage_end:
            snaps[stage_end[k + 1]] = StateVector.from_amplitudes(amps.copy(), normalize=True)
    drift = abs(math.sqrt(np.vdot(amps, amps).real) - 1.0)
    if drift > 1e-9:
        raise DomainError(f"norm drifted by {drift:.3e} over the run")
    final = StateVector(q, amps)
    return SimResult(final, fidelity(final, target), ancilla_product_error(final, c.n), snaps, drift)


# ---------------------------------------------------------------------------
# Diagnosis of the literal transfer stage


def expected_transfer_state(p: AnsatzParams, processed: int, sign: float = -1.0,
                            phase_fixed: bool = False) -> StateVector:
    """What the transfer stage should hold after ``processed`` pairs (lexicographic).

    Pair-flip components sit on ancillas |000>, the remaining GHZ-branch
    amplitude on |100>. ``sign`` is the global sign of the prepared input;
    ``phase_fixed`` applies the controlled -sigma_z that turns
    |1..1> - |0..0> into |1..1> + |0..0>.
    """
    n = p.n
    full = (1 << n) - 1
    order = pairs(n)[:processed]
    q = n + 3
    amps = np.zeros(1 << q, dtype=complex)
    used = 0.0
    for i, j in order:
        e = p.g(i, j)
        m = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
        amps[(m << 3)] += sign * e
        amps[((full ^ m) << 3)] += sign * e
        used += e * e
    d = math.sqrt(max(0.0, (1.0 - 2.0 * used) / 2.0))
    amps[(full << 3) | ANCILLA_START] += sign * d
    amps[(0 << 3) | ANCILLA_START] += (sign if phase_fixed else -sign) * d
    return StateVector.from_amplitudes(amps, normalize=True)


@dataclass
class LiteralDiagnosis:
    stage_fidelities: dict
    first_deviating_pair: tuple | None
    first_deviating_step: int | None
    first_component: tuple | None  # (basis index, expected, actual)
    final_fidelity: float
    ancilla_error: float

    def lines(self) -> list[str]:
        out = [f"stage {name}: fidelity vs ideal {f:.12g}" for name, f in self.stage_fidelities.items()]
        if self.first_deviating_pair is None:
            out.append("transfer stage matches the expected superposition")
        else:
            idx, exp, act = self.first_component
            out.append(
                f"first deviation after pair {self.first_deviating_pair} (transfer step "
                f"{self.first_deviating_step}): basis index {idx} expected {exp.real:.12g} got {act.real:.12g}"
            )
        out.append(f"final fidelity {self.final_fidelity:.12g}, ancilla error {self.ancilla_error:.12g}")
        return out


def diagnose_literal(c: Circuit, p: AnsatzParams, atol: float = 1e-9) -> LiteralDiagnosis:
    """Replay a literal circuit and locate where it departs from the intended states."""
    if c.mode != "literal":
        raise DomainError("diagnosis applies to literal circuits")
    n, q = p.n, c.num_qubits
    stages = {name: (start, stop) for name, start, stop in c.stages}
    amps = np.zeros(1 << q, dtype=complex)
    amps[0] = 1.0
    g1_start, g1_stop = stages["G1"]
    for g in c.ops[:g1_start]:
        _apply_inplace(amps, q, g)
    fids = {}
    ideal_input = expected_transfer_state(p, 0)
    fids["prologue+ancilla"] = abs(np.vdot(ideal_input.amps, amps)) ** 2
    first_pair = first_step = first_comp = None
    for step, pair in enumerate(pairs(n)):
        for g in c.ops[g1_start + 2 * step: g1_start + 2 * step + 2]:
            _apply_inplace(amps, q, g)
        if first_pair is None:
            exp = expected_transfer_state(p, step + 1).amps
            diff = np.abs(exp - amps)
            bad = np.flatnonzero(diff > atol)
            if bad.size:
                k = int(bad[0])
                first_pair, first_step, first_comp = pair, step + 1, (k, exp[k], amps[k])
    fids["transfer"] = abs(np.vdot(expected_transfer_state(p, len(pairs(n))).amps, amps)) ** 2
    for g in c.ops[g1_start + 2 * len(pairs(n)): g1_stop]:
        _apply_inplace(amps, q, g)
    g1_ideal = expected_transfer_state(p, len(pairs(n)), phase_fixed=True)
    fids["G1"] = abs(np.vdot(g1_ideal.amps, amps)) ** 2
    for g in c.ops[g1_stop:]:
        _apply_inplace(amps, q, g)
    fids["final"] = abs(np.vdot(with_ancillas(build_state(p)).amps, amps)) ** 2
    final = StateVector.from_amplitudes(amps, normalize=True)
    return LiteralDiagnosis(fids, first_pair, first_step, first_comp, fids["final"], ancilla_product_error(final, n))
