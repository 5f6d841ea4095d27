"""Gate IR and the two preparation-network builders.

Register layout for ``n`` graph qubits: graph qubits ``0..n-1``, then three
ancillas ``n`` (first), ``n+1``, ``n+2``. ``literal`` circuits start from the
all-zeros register and contain their own state preparation; ``corrected``
circuits start from ``|0...0>|100>``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzParams, pairs, support
from .errors import DomainError, ParseError

K_PLUS = 0.5 * math.sqrt(1.0 + 1.0 / math.sqrt(2.0))
K_MINUS = 0.5 * math.sqrt(1.0 - 1.0 / math.sqrt(2.0))

# (name, number of qubit operands, has angle)
GATE_KINDS = {
    "CNOT": (2, False),
    "TOFFOLI": (3, False),
    "CR": (3, True),
    "CMSZ": (2, False),
    "CA": (3, False),
    "CAINV": (3, False),
    "H": (1, False),
    "X": (1, False),
    "TLR": (2, True),  # operands are basis indices, not qubits
}

TOTAL_GATES_OFFSET = 4  # literal total = n^2 + 6n + 4
ANCILLA_START = 0b100


def a_gate_matrix() -> np.ndarray:
    """Columns are the images of |00>, |01>, |10>, |11>."""
    kp, km = K_PLUS, K_MINUS
    cols = [
        [kp, -kp, -km, km],
        [km, kp, -km, kp],
        [kp, km, kp, -km],
        [-km, -km, kp, kp],
    ]
    return np.array(cols, dtype=float).T


def a_squared_matrix() -> np.ndarray:
    """|00> -> -|01>, |01> -> |11>, |10> -> |00>, |11> -> |10>."""
    m = np.zeros((4, 4))
    m[1, 0] = -1.0
    m[3, 1] = 1.0
    m[0, 2] = 1.0
    m[2, 3] = 1.0
    return m


def r_gate_matrix(alpha: float) -> np.ndarray:
    """Transfer rotation on |00>, |11>; |01>, |10> untouched."""
    if not -1.0 <= alpha <= 1.0:
        raise DomainError(f"rotation amplitude {alpha} outside [-1, 1]")
    c = math.sqrt(1.0 - alpha * alpha)
    m = np.eye(4)
    m[0, 0] = m[3, 3] = c
    m[3, 0] = -alpha
    m[0, 3] = alpha
    return m


def _controlled(u: np.ndarray, controls: int = 1) -> np.ndarray:
    dim = u.shape[0] << controls
    m = np.eye(dim, dtype=complex)
    m[dim - u.shape[0]:, dim - u.shape[0]:] = u
    return m


X_MATRIX = np.array([[0.0, 1.0], [1.0, 0.0]])
H_MATRIX = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
MINUS_Z = np.diag([-1.0, 1.0])


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise DomainError(f"unknown gate kind {self.kind!r}")
        arity, angled = GATE_KINDS[self.kind]
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != arity:
            raise DomainError(f"{self.kind} takes {arity} operands, got {len(self.qubits)}")
        if len(set(self.qubits)) != arity:
            raise DomainError(f"{self.kind} operands must be distinct: {self.qubits}")
        if min(self.qubits) < 0:
            raise DomainError("negative operand")
        if angled != (self.theta is not None):
            raise DomainError(f"{self.kind} {'needs' if angled else 'takes no'} angle")
        if self.kind == "CR" and not -1.0 <= self.theta <= 1.0:
            raise DomainError(f"CR amplitude {self.theta} outside [-1, 1]")

    def matrix(self) -> np.ndarray:
        """Unitary on the gate's own operands, in operand order (TLR: the 2x2 block)."""
        k = self.kind
        if k == "X":
            return X_MATRIX.astype(complex)
        if k == "H":
            return H_MATRIX.astype(complex)
        if k == "CNOT":
            return _controlled(X_MATRIX)
        if k == "TOFFOLI":
            return _controlled(X_MATRIX, 2)
        if k == "CMSZ":
            return _controlled(MINUS_Z)
        if k == "CR":
            return _controlled(r_gate_matrix(self.theta))
        if k == "CA":
            return _controlled(a_gate_matrix())
        if k == "CAINV":
            return _controlled(a_gate_matrix().T)
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s], [s, c]], dtype=complex)

    def inverse(self) -> "Gate":
        if self.kind in ("CR", "TLR"):
            return Gate(self.kind, self.qubits, -self.theta)
        if self.kind == "CA":
            return Gate("CAINV", self.qubits)
        if self.kind == "CAINV":
            return Gate("CA", self.qubits)
        if self.kind == "H":
            return self
        return self  # X, CNOT, TOFFOLI, CMSZ are involutions

    def format(self) -> str:
        ops = " ".join(str(q) for q in self.qubits)
        if self.theta is None:
            return f"{self.kind} {ops}"
        return f"{self.kind} {self.theta!r} {ops}"


def cnot(c, t):
    return Gate("CNOT", (c, t))


def toffoli(c1, c2, t):
    return Gate("TOFFOLI", (c1, c2, t))


def cr(alpha, c, t1, t2):
    return Gate("CR", (c, t1, t2), alpha)


def cmsz(c, t):
    return Gate("CMSZ", (c, t))


def ca(c, t1, t2):
    return Gate("CA", (c, t1, t2))


def cainv(c, t1, t2):
    return Gate("CAINV", (c, t1, t2))


def tlr(theta, a, b):
    return Gate("TLR", (a, b), theta)


@dataclass(frozen=True)
class Circuit:
    n: int
    ops: tuple[Gate, ...]
    mode: str
    stages: tuple[tuple[str, int, int], ...] = field(default=())  # (name, start, stop)

    def __post_init__(self):
        if self.mode not in ("literal", "corrected"):
            raise DomainError(f"unknown circuit mode {self.mode!r}")
        object.__setattr__(self, "ops", tuple(self.ops))
        q = self.n + 3
        for g in self.ops:
            if g.kind == "TLR":
                if max(g.qubits) >= 1 << q:
                    raise DomainError(f"TLR basis index out of range: {g.qubits}")
            elif max(g.qubits) >= q:
                raise DomainError(f"{g.kind} qubit index out of range: {g.qubits}")
        kinds = {g.kind for g in self.ops}
        if self.mode == "corrected" and kinds - {"TLR"}:
            raise DomainError("corrected circuits contain only TLR operations")
        if self.mode == "literal" and "TLR" in kinds:
            raise DomainError("literal circuits contain no TLR operations")

    @property
    def num_qubits(self) -> int:
        return self.n + 3

    @property
    def counts(self) -> Counter:
        return Counter(g.kind for g in self.ops)

    def stage_sizes(self) -> dict[str, int]:
        return {name: stop - start for name, start, stop in self.stages}

    def initial_index(self) -> int:
        return ANCILLA_START if self.mode == "corrected" else 0

    def format(self) -> str:
        lines = [f"qubits {self.num_qubits}", f"mode {self.mode}"]
        starts = {start: name for name, start, _ in self.stages}
        for k, g in enumerate(self.ops):
            if k in starts:
                lines.append(f"# stage {starts[k]}")
            lines.append(g.format())
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    q = mode = None
    ops: list[Gate] = []
    stage_marks: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            parts = stripped[1:].split()
            if len(parts) == 2 and parts[0] == "stage":
                stage_marks.append((parts[1], len(ops)))
            continue
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "qubits" and q is None:
            try:
                q = int(parts[1])
            except (IndexError, ValueError):
                raise ParseError("expected 'qubits <count>'", lineno) from None
            if q < 5:
                raise ParseError("register needs at least 2 graph qubits plus 3 ancillas", lineno)
            continue
        if head == "mode" and mode is None:
            if len(parts) != 2 or parts[1] not in ("literal", "corrected"):
                raise ParseError("expected 'mode literal|corrected'", lineno)
            mode = parts[1]
            continue
        if q is None or mode is None:
            raise ParseError("header 'qubits' and 'mode' must precede operations", lineno)
        if head not in GATE_KINDS:
            raise ParseError(f"unknown operation {head!r}", lineno)
        arity, angled = GATE_KINDS[head]
        expected = arity + (1 if angled else 0)
        if len(parts) - 1 != expected:
            raise ParseError(f"{head} expects {expected} arguments", lineno)
        try:
            theta = float(parts[1]) if angled else None
            operands = tuple(int(x) for x in parts[1 + angled:])
            ops.append(Gate(head, operands, theta))
        except ValueError as exc:
            raise ParseError(str(exc) if isinstance(exc, DomainError) else f"malformed operands in {line!r}", lineno) from None
    if q is None or mode is None:
        raise ParseError("missing circuit header")
    stages = []
    for k, (name, start) in enumerate(stage_marks):
        stop = stage_marks[k + 1][1] if k + 1 < len(stage_marks) else len(ops)
        stages.append((name, start, stop))
    try:
        return Circuit(q - 3, tuple(ops), mode, tuple(stages))
    except DomainError as exc:
        raise ParseError(str(exc)) from None


# ---------------------------------------------------------------------------
# Rotation schedule for the transfer stage


def alpha_schedule(p: AnsatzParams, order=None) -> list[float]:
    """Transfer amplitudes so that processing pairs in ``order`` leaves gamma_ij on each.

    Each rotation moves a fraction of what is left on the GHZ branch, so the
    amplitude needed grows as the branch is depleted.
    """
    order = list(order) if order is not None else pairs(p.n)
    if sorted(order) != pairs(p.n):
        raise DomainError("order must be a permutation of all pairs")
    done = 0.0
    out = []
    for i, j in order:
        g = p.g(i, j)
        rad = 1.0 - 2.0 * done
        if rad <= 0.0:
            raise DomainError(f"no amplitude left on the GHZ branch at pair ({i}, {j})")
        out.append(math.sqrt(2.0) * g / math.sqrt(rad))
        done += g * g
    return out


def transferred_amplitudes(alphas, order) -> dict:
    """Forward substitution: amplitude left on each pair after sequential transfers."""
    done = 0.0
    out = {}
    for a, pair in zip(alphas, order):
        e = a / math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - 2.0 * done))
        out[tuple(pair)] = e
        done += e * e
    return out


# ---------------------------------------------------------------------------
# Builders


def _literal_ops(p: AnsatzParams):
    n = p.n
    anc1, anc2, anc3 = n, n + 1, n + 2
    order = pairs(n)
    alphas = alpha_schedule(p, order)
    stages = []
    ops: list[Gate] = []

    def stage(name, gates):
        start = len(ops)
        ops.extend(gates)
        stages.append((name, start, len(ops)))

    # X then H puts qubit 0 in (|0> - |1>)/sqrt2, i.e. the required input up to a global sign
    stage("prologue", [Gate("X", (0,)), Gate("H", (0,))] + [cnot(0, k) for k in range(1, n)])
    stage("ancilla", [Gate("X", (anc1,))])
    g1 = []
    for (i, j), a in zip(order, alphas):
        g1 += [cr(a, anc1, i, j), toffoli(i, j, anc1)]
    g1.append(cmsz(anc1, 0))
    stage("G1", g1)
    g2 = []
    for i in range(n):
        k = (i + 1) % n
        g2 += [cnot(i, k), ca(k, anc2, anc3), cnot(i, k)]
    g2.append(cnot(anc3, anc1))
    stage("G2", g2)
    g3 = []
    for i in range(n):
        k = (i + 1) % n
        g3 += [cnot(i, k), cainv(k, anc2, anc3), cnot(i, k)]
    stage("G3", g3)
    return ops, stages


def build_literal(p: AnsatzParams) -> Circuit:
    ops, stages = _literal_ops(p)
    return Circuit(p.n, tuple(ops), "literal", tuple(stages))


def literal_stage_counts(n: int) -> dict[str, int]:
    return {"prologue": n + 1, "ancilla": 1, "G1": n * (n - 1) + 1, "G2": 3 * n + 1, "G3": 3 * n}


def embed_graph_index(x: int) -> int:
    """Graph-register basis index -> full-register index with ancillas in |100>."""
    return (x << 3) | ANCILLA_START


def givens_angles(amplitudes: list[float]) -> list[float]:
    """Angles that spread amplitude 1 on entry 0 into the given nonnegative vector.

    Rotation k moves weight from entry 0 to entry k; the tail norms are
    accumulated from the end so each angle is an atan2 of exact quantities.
    """
    t = [float(x) for x in amplitudes]
    k_total = len(t)
    tail = [0.0] * (k_total + 1)
    for k in range(k_total - 1, 0, -1):
        tail[k] = tail[k + 1] + t[k] * t[k]
    return [math.atan2(t[k], math.sqrt(t[0] * t[0] + tail[k + 1])) for k in range(1, k_total)]


def build_corrected(p: AnsatzParams) -> Circuit:
    amps = support(p)
    norm = math.sqrt(sum(v * v for v in amps.values()))
    root = 0
    rest = sorted(idx for idx in amps if idx != root)
    targets = [amps.get(root, 0.0) / norm] + [amps[idx] / norm for idx in rest]
    thetas = givens_angles(targets)
    ops = tuple(tlr(th, embed_graph_index(root), embed_graph_index(idx)) for th, idx in zip(thetas, rest))
    return Circuit(p.n, ops, "corrected", (("prepare", 0, len(ops)),))


def boundary_count(index: int, n: int) -> int:
    """Number of cyclic neighbours (i, i+1 mod n) whose bits differ in a graph basis index."""
    bits = [(index >> (n - 1 - k)) & 1 for k in range(n)]
    return sum(bits[k] != bits[(k + 1) % n] for k in range(n))


def a_gate_fires(i: int, j: int, n: int) -> int:
    """How often the controlled-A gate acts on a pair-flip component of pair {i, j}."""
    mask = (1 << (n - 1 - i)) | (1 << (n - 1 - j))
    return boundary_count(mask, n)
