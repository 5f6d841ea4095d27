"""State vectors, two-qubit marginals and the concurrence oracle.

Bit convention (global): in a register of ``q`` qubits, qubit ``k`` occupies
bit ``q - 1 - k`` of the basis index, i.e. qubit 0 is the leftmost symbol of
the ket. Reshaping an amplitude vector to ``[2] * q`` therefore puts qubit
``k`` on axis ``k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import DomainError, ParseError

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10
JACOBI_OFF_TOL = 1e-14

# sigma_y (x) sigma_y in the |00>,|01>,|10>,|11> basis
SIGMA_YY = np.array(
    [[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=float
)


@dataclass(frozen=True, eq=False)
class StateVector:
    q: int
    amps: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex).reshape(-1)
        if amps.size != 1 << self.q:
            raise DomainError(f"expected {1 << self.q} amplitudes for {self.q} qubits, got {amps.size}")
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, amps, normalize=False) -> "StateVector":
        amps = np.asarray(amps, dtype=complex).reshape(-1)
        q = amps.size.bit_length() - 1
        if amps.size != 1 << q:
            raise DomainError("amplitude count is not a power of two")
        if normalize:
            norm = math.sqrt(np.vdot(amps, amps).real)
            if norm == 0.0:
                raise DomainError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(q, amps)

    @classmethod
    def basis(cls, q: int, index: int) -> "StateVector":
        amps = np.zeros(1 << q, dtype=complex)
        amps[index] = 1.0
        return cls(q, amps)

    def tensor(self, other: "StateVector") -> "StateVector":
        return StateVector(self.q + other.q, np.kron(self.amps, other.amps))

    def probability(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def __repr__(self):
        nz = int(np.count_nonzero(np.abs(self.amps) > 1e-14))
        return f"StateVector(q={self.q}, nonzero={nz})"


@dataclass(frozen=True, eq=False)
class TwoQubitDensity:
    """A 4x4 density matrix, basis |00>,|01>,|10>,|11> (first slot = first qubit).

    ``factor`` optionally holds a 4xr matrix ``L`` with ``rho = L L^dagger``.
    Marginals of pure states carry it so the concurrence never has to take
    square roots of rounding-level eigenvalues.
    """

    rho: np.ndarray
    factor: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise DomainError(f"two-qubit density must be 4x4, got {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise DomainError("density matrix is not Hermitian")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"density matrix trace is {tr!r}, expected 1")
        object.__setattr__(self, "rho", rho)


@dataclass(frozen=True)
class XStateParams:
    """Diagonal/anti-diagonal coefficients of a pair marginal::

        [[a, 0, 0, f],
         [0, b, e, 0],
         [0, e, b, 0],
         [f, 0, 0, a]]
    """

    a: float
    b: float
    e: float
    f: float

    def __post_init__(self):
        if min(self.a, self.b, self.e, self.f) < -PSD_TOL:
            raise DomainError("X-state coefficients must be nonnegative")
        if self.f > self.a + PSD_TOL or self.e > self.b + PSD_TOL:
            raise DomainError("X-state coefficients violate positivity (need a >= f, b >= e)")
        if abs(2 * self.a + 2 * self.b - 1.0) > NORM_TOL:
            raise DomainError("X-state coefficients violate unit trace (2a + 2b = 1)")

    def matrix(self) -> np.ndarray:
        a, b, e, f = self.a, self.b, self.e, self.f
        return np.array(
            [[a, 0, 0, f], [0, b, e, 0], [0, e, b, 0], [f, 0, 0, a]], dtype=complex
        )

    def density(self) -> TwoQubitDensity:
        return TwoQubitDensity(self.matrix())


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigensolver for small Hermitian matrices


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] > 8:
        raise DomainError("hermitian_eigenvalues supports dimension <= 8")
    if m.size and np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise DomainError("matrix is not Hermitian")
    return m


def _jacobi(m: np.ndarray, vectors: bool = False, max_sweeps: int = 64):
    a = 0.5 * (m + m.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex) if vectors else None
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, np.sum(np.abs(a) ** 2) - np.sum(np.abs(np.diag(a)) ** 2)))
        if off < JACOBI_OFF_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300:
                    continue
                phase = apq / mag
                theta = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # phase fix on column q, then a real plane rotation
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                if vectors:
                    v[:, idx] = v[:, idx] @ u
    w = np.diag(a).real.copy()
    order = np.argsort(-w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


def hermitian_eigenvalues(m) -> list[float]:
    """Eigenvalues of a small Hermitian matrix (dimension <= 8), descending."""
    m = _check_hermitian(m)
    if m.shape[0] == 0:
        return []
    return [float(x) for x in _jacobi(m)]


def hermitian_eigh(m):
    """Eigenvalues (descending) and matching eigenvector columns."""
    m = _check_hermitian(m)
    return _jacobi(m, vectors=True)


# ---------------------------------------------------------------------------
# States


def symmetric_state(n: int, k: int) -> StateVector:
    """Dicke state |n;k>: equal weight on every basis state with k ones."""
    if n < 1 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    amps = np.zeros(1 << n, dtype=complex)
    amp = 1.0 / math.sqrt(math.comb(n, k))
    for ones in combinations(range(n), k):
        idx = 0
        for qubit in ones:
            idx |= 1 << (n - 1 - qubit)
        amps[idx] = amp
    return StateVector(n, amps)


def ghz_state(n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return StateVector(n, amps)


def web_state(n: int, c: float) -> StateVector:
    """sqrt(1 - x^2)|n;0> + x|n;1> with x = sqrt(c n / 2): uniform pair concurrence c."""
    x2 = c * n / 2.0
    if not 0.0 <= x2 <= 1.0:
        raise DomainError(f"web concurrence {c} not reachable for n={n}")
    w = symmetric_state(n, 1).amps
    amps = math.sqrt(x2) * w
    amps = amps.copy()
    amps[0] += math.sqrt(1.0 - x2)
    return StateVector(n, amps)


def _check_qubit(psi: StateVector, k: int):
    if not 0 <= k < psi.q:
        raise DomainError(f"qubit index {k} out of range for {psi.q} qubits")


def partial_trace_pair(psi: StateVector, i: int, j: int) -> TwoQubitDensity:
    _check_qubit(psi, i)
    _check_qubit(psi, j)
    if i == j:
        raise DomainError("pair indices must differ")
    t = psi.amps.reshape([2] * psi.q)
    block = np.moveaxis(t, [i, j], [0, 1]).reshape(4, -1)
    rho = block @ block.conj().T
    # rho = R^dagger R with R from a QR of block^dagger; R^dagger is the factor
    r = np.linalg.qr(block.conj().T, mode="r")
    return TwoQubitDensity(rho, factor=r.conj().T)


def reduced_density(psi: StateVector, keep) -> np.ndarray:
    keep = list(keep)
    for k in keep:
        _check_qubit(psi, k)
    t = psi.amps.reshape([2] * psi.q)
    block = np.moveaxis(t, keep, list(range(len(keep)))).reshape(1 << len(keep), -1)
    return block @ block.conj().T


def _psd_factor(rho: np.ndarray) -> np.ndarray:
    w, v = hermitian_eigh(rho)
    if w[-1] < -PSD_TOL:
        raise DomainError(f"density matrix has eigenvalue {w[-1]!r} < 0")
    # eigenvalues at the rounding floor would enter the concurrence as sqrt(eps)
    keep = w > 64 * np.finfo(float).eps * max(w[0], 0.0)
    return v[:, keep] * np.sqrt(w[keep])


def spin_flip(rho: np.ndarray) -> np.ndarray:
    return SIGMA_YY @ np.asarray(rho).conj() @ SIGMA_YY


def wootters_sqrt_eigenvalues(rho: TwoQubitDensity) -> list[float]:
    """Square roots of the eigenvalues of rho * spin_flip(rho), descending.

    With rho = L L^dagger these equal the singular values of T = L^T (sy sy) L,
    read off as the nonnegative half of the spectrum of [[0, T], [T^dagger, 0]].
    """
    factor = rho.factor if rho.factor is not None else _psd_factor(rho.rho)
    r = factor.shape[1]
    if r == 0:
        return [0.0] * 4
    t = factor.T @ SIGMA_YY @ factor
    dilation = np.zeros((2 * r, 2 * r), dtype=complex)
    dilation[:r, r:] = t
    dilation[r:, :r] = t.conj().T
    sv = [max(0.0, x) for x in hermitian_eigenvalues(dilation)[:r]]
    return sv + [0.0] * (4 - r)


def wootters_concurrence(rho: TwoQubitDensity) -> float:
    s = wootters_sqrt_eigenvalues(rho)
    return float(min(1.0, max(0.0, s[0] - s[1] - s[2] - s[3])))


def xstate_sqrt_eigenvalues(p: XStateParams) -> tuple[float, float, float, float]:
    return (p.a + p.f, max(0.0, p.a - p.f), p.b + p.e, max(0.0, p.b - p.e))


def xstate_concurrence(p: XStateParams) -> float:
    return float(max(0.0, 2.0 * (p.f - p.b), 2.0 * (p.e - p.a)))


def pair_concurrence(psi: StateVector, i: int, j: int) -> float:
    return wootters_concurrence(partial_trace_pair(psi, i, j))


def concurrence_matrix(psi: StateVector) -> np.ndarray:
    out = np.zeros((psi.q, psi.q))
    for i, j in combinations(range(psi.q), 2):
        out[i, j] = out[j, i] = pair_concurrence(psi, i, j)
    return out


def tangle_with_rest(psi: StateVector, j: int) -> float:
    """Concurrence between qubit j and the rest of a pure state."""
    _check_qubit(psi, j)
    rho = reduced_density(psi, [j])
    purity = float(np.sum(np.abs(rho) ** 2))
    return math.sqrt(min(1.0, max(0.0, 2.0 * (1.0 - purity))))


def ckw_audit(psi: StateVector, slack: float = 1e-9) -> list[tuple[int, float, float]]:
    """Per qubit (j, sum_k C_jk^2, tangle_j^2); raises nothing, see ``ckw_holds``."""
    cm = concurrence_matrix(psi)
    return [(j, float(np.sum(cm[j] ** 2)), tangle_with_rest(psi, j) ** 2) for j in range(psi.q)]


def ckw_holds(psi: StateVector, slack: float = 1e-9) -> bool:
    return all(lhs <= rhs + slack for _, lhs, rhs in ckw_audit(psi))


# ---------------------------------------------------------------------------
# State-vector file: "qubits <q>" then "<index> <re> <im>" per nonzero amplitude


def format_statevector(psi: StateVector, threshold: float = 0.0) -> str:
    lines = [f"qubits {psi.q}"]
    for idx in np.flatnonzero(np.abs(psi.amps) > threshold):
        a = psi.amps[idx]
        lines.append(f"{idx} {float(a.real)!r} {float(a.imag)!r}")
    return "\n".join(lines) + "\n"


def parse_statevector(text: str, normalize: bool = False) -> StateVector:
    q = None
    amps = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if q is None:
            if len(parts) != 2 or parts[0] != "qubits":
                raise ParseError("expected 'qubits <q>' header", lineno)
            try:
                q = int(parts[1])
            except ValueError:
                raise ParseError(f"bad qubit count {parts[1]!r}", lineno) from None
            if not 1 <= q <= 26:
                raise ParseError(f"qubit count {q} out of range", lineno)
            amps = np.zeros(1 << q, dtype=complex)
            continue
        if len(parts) != 3:
            raise ParseError("expected '<index> <re> <im>'", lineno)
        try:
            idx = int(parts[0])
            val = complex(float(parts[1]), float(parts[2]))
        except ValueError:
            raise ParseError(f"malformed amplitude line {line!r}", lineno) from None
        if not 0 <= idx < amps.size:
            raise ParseError(f"basis index {idx} out of range", lineno)
        amps[idx] = val
    if q is None:
        raise ParseError("missing 'qubits' header")
    try:
        return StateVector.from_amplitudes(amps, normalize=normalize)
    except DomainError as exc:
        raise ParseError(str(exc)) from None
