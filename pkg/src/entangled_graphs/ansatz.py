"""The GHZ-plus-pair-flip state family and its closed-form pair concurrences.

A state in the family is

    alpha (|0...0> + |1...1>) + sum_{i<j} gamma_ij (|1..0_i..0_j..1> + |0..1_i..1_j..0>)

with real nonnegative amplitudes and ``2 alpha^2 + 2 sum gamma^2 = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DomainError, FormulaValidityError, ParseError
from .quantum_core import NORM_TOL, StateVector, XStateParams, xstate_concurrence

VALIDITY_SLACK = 1e-12
ZERO_GAMMA = 1e-14

# Below this size the traced-out register is too small for the bit patterns
# reached from |0..0>, |1..1> and the B components to stay distinct, and the
# pair marginal picks up entries outside the X pattern.
MIN_EXACT_QUBITS = 7


def pairs(n: int) -> list[tuple[int, int]]:
    return list(combinations(range(n), 2))


def _pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise DomainError("pair indices must differ")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class AnsatzParams:
    n: int
    alpha: float
    gamma: np.ndarray  # symmetric n x n, zero diagonal

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if g.shape != (self.n, self.n):
            raise DomainError(f"gamma must be {self.n}x{self.n}")
        if self.n < 2:
            raise DomainError("need at least two qubits")
        if not np.allclose(g, g.T, atol=0.0) or np.any(np.diag(g) != 0.0):
            raise DomainError("gamma must be symmetric with zero diagonal")
        if self.alpha < 0 or np.any(g < 0):
            raise DomainError("amplitudes must be nonnegative")
        g.flags.writeable = False
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "alpha", float(self.alpha))
        if abs(self.norm() - 1.0) > NORM_TOL:
            raise DomainError(f"normalization violated: 2a^2 + 2 sum g^2 = {self.norm()!r}")

    @classmethod
    def from_pairs(cls, n: int, alpha: float, gamma: dict) -> "AnsatzParams":
        g = np.zeros((n, n))
        for (i, j), v in gamma.items():
            i, j = _pair(i, j)
            if j >= n:
                raise DomainError(f"pair ({i}, {j}) out of range for n={n}")
            g[i, j] = g[j, i] = v
        return cls(n, alpha, g)

    @classmethod
    def from_gammas(cls, n: int, gamma: dict) -> "AnsatzParams":
        """Fix alpha from the normalization condition."""
        sq = sum(v * v for v in gamma.values())
        rad = 0.5 - sq
        if rad < 0:
            raise DomainError("gamma amplitudes exceed the normalization budget")
        return cls.from_pairs(n, math.sqrt(rad), gamma)

    def norm(self) -> float:
        return 2.0 * self.alpha**2 + float(np.sum(self.gamma**2))

    def g(self, i: int, j: int) -> float:
        return float(self.gamma[i, j])

    def gamma_pairs(self) -> dict:
        return {(i, j): float(self.gamma[i, j]) for i, j in pairs(self.n)}

    @property
    def gamma_max(self) -> float:
        return float(self.gamma.max()) if self.n > 1 else 0.0

    def validity_slack(self) -> float:
        return self.alpha - 2.0 * self.gamma_max * math.sqrt(max(self.n - 2, 0))

    def support_pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in pairs(self.n) if self.gamma[i, j] > ZERO_GAMMA]

    def with_update(self, i: int, j: int, alpha: float, gamma_ij: float) -> "AnsatzParams":
        g = self.gamma.copy()
        g[i, j] = g[j, i] = gamma_ij
        return AnsatzParams(self.n, alpha, g)

    def permuted(self, perm) -> "AnsatzParams":
        """Relabel qubit k as perm[k]."""
        perm = list(perm)
        if sorted(perm) != list(range(self.n)):
            raise DomainError("not a permutation")
        inv = np.argsort(perm)
        return AnsatzParams(self.n, self.alpha, self.gamma[np.ix_(inv, inv)])

    def __eq__(self, other):
        if not isinstance(other, AnsatzParams):
            return NotImplemented
        return self.n == other.n and self.alpha == other.alpha and np.array_equal(self.gamma, other.gamma)

    def __repr__(self):
        return f"AnsatzParams(n={self.n}, alpha={self.alpha:.6g}, gamma_max={self.gamma_max:.6g})"


def ghz_params(n: int) -> AnsatzParams:
    return AnsatzParams(n, 1.0 / math.sqrt(2.0), np.zeros((n, n)))


def pair_flip_mask(n: int, i: int, j: int) -> int:
    return (1 << (n - 1 - i)) | (1 << (n - 1 - j))


def support(p: AnsatzParams) -> dict[int, float]:
    """Basis index -> amplitude for the unnormalized superposition.

    For n = 4 the components of complementary pairs land on the same basis
    states and their amplitudes add up.
    """
    full = (1 << p.n) - 1
    amps: dict[int, float] = {}
    if p.alpha > 0:
        amps[0] = amps.get(0, 0.0) + p.alpha
        amps[full] = amps.get(full, 0.0) + p.alpha
    for i, j in p.support_pairs():
        m = pair_flip_mask(p.n, i, j)
        v = p.g(i, j)
        amps[m] = amps.get(m, 0.0) + v
        amps[full ^ m] = amps.get(full ^ m, 0.0) + v
    return amps


def build_state(p: AnsatzParams) -> StateVector:
    vec = np.zeros(1 << p.n, dtype=complex)
    for idx, v in support(p).items():
        vec[idx] = v
    norm = math.sqrt(np.vdot(vec, vec).real)
    if abs(norm - 1.0) > 1e-12:
        vec /= norm  # only reachable through n = 4 overlaps
    return StateVector(p.n, vec)


def check_validity(p: AnsatzParams) -> bool:
    return p.validity_slack() >= -VALIDITY_SLACK


def formula_is_exact(n: int) -> bool:
    """Whether pair marginals of the family are X states for every parameter choice."""
    return n >= MIN_EXACT_QUBITS


def xstate_params(p: AnsatzParams, i: int, j: int) -> XStateParams:
    """Coefficients of the pair marginal, assuming the X pattern."""
    i, j = _pair(i, j)
    g = p.gamma
    gij = g[i, j]
    others = [k for k in range(p.n) if k not in (i, j)]
    touch = float(sum(g[k, i] ** 2 + g[k, j] ** 2 for k in others))
    e = 2.0 * float(sum(g[k, i] * g[k, j] for k in others))
    a = 0.5 - touch  # = alpha^2 + gamma_ij^2 + sum over disjoint pairs
    return XStateParams(a, touch, e, 2.0 * p.alpha * gij)


def raw_concurrence(p: AnsatzParams, i: int, j: int) -> float:
    """2(2 alpha g_ij - sum_k g_ki^2 - sum_k g_kj^2) before clamping at zero."""
    g = p.gamma
    row_i = float(np.dot(g[i], g[i])) - g[i, j] ** 2
    row_j = float(np.dot(g[j], g[j])) - g[i, j] ** 2
    return 2.0 * (2.0 * p.alpha * g[i, j] - row_i - row_j)


def analytic_concurrence(p: AnsatzParams, i: int, j: int) -> float:
    if not check_validity(p):
        raise FormulaValidityError(
            f"alpha = {p.alpha:.6g} < 2 gamma_max sqrt(n-2); closed form does not apply"
        )
    i, j = _pair(i, j)
    return max(raw_concurrence(p, i, j), 0.0)


def analytic_matrix(p: AnsatzParams) -> np.ndarray:
    out = np.zeros((p.n, p.n))
    for i, j in pairs(p.n):
        out[i, j] = out[j, i] = analytic_concurrence(p, i, j)
    return out


def symmetric_lambda(n: int) -> float:
    if n < 3:
        raise DomainError("symmetric initialization needs n >= 3")
    m = n * (n - 1)
    return (math.sqrt(4 * (n - 2) ** 2 + 2 * m) - 2 * (n - 2)) / m


def symmetric_params(n: int) -> AnsatzParams:
    lam = symmetric_lambda(n)
    m = n * (n - 1)
    gamma = lam / math.sqrt(2 + m * lam * lam)
    alpha = 1.0 / math.sqrt(2 + m * lam * lam)
    g = np.full((n, n), gamma)
    np.fill_diagonal(g, 0.0)
    return AnsatzParams(n, alpha, g)


def random_params(n: int, rng: np.random.Generator, density: float = 1.0) -> AnsatzParams:
    """Random normalized parameters satisfying the validity condition."""
    if n < 3:
        raise DomainError("need n >= 3")
    g = np.zeros((n, n))
    for i, j in pairs(n):
        if rng.random() < density:
            g[i, j] = g[j, i] = rng.random()
    gmax = g.max()
    if gmax == 0.0:
        return ghz_params(n)
    # alpha >= 2 gmax sqrt(n-2) * (1 + u): pick alpha/gmax ratio then scale to unit norm
    ratio = 2.0 * math.sqrt(n - 2) * (1.0 + 2.0 * rng.random())
    g = g / gmax
    alpha_rel = ratio
    scale = 1.0 / math.sqrt(2 * alpha_rel**2 + float(np.sum(g**2)))
    return AnsatzParams(n, alpha_rel * scale, g * scale)


# ---------------------------------------------------------------------------
# Parameters file: "qubits <n>", "alpha <v>", "gamma <i> <j> <v>"


def format_params(p: AnsatzParams) -> str:
    lines = [f"qubits {p.n}", f"alpha {p.alpha!r}"]
    for i, j in pairs(p.n):
        lines.append(f"gamma {i} {j} {p.g(i, j)!r}")
    return "\n".join(lines) + "\n"


def parse_params(text: str) -> AnsatzParams:
    n = alpha = None
    gamma: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0]
        try:
            if key == "qubits" and len(parts) == 2 and n is None:
                n = int(parts[1])
                if n < 2:
                    raise ParseError(f"qubit count {n} too small", lineno)
            elif key == "alpha" and len(parts) == 2 and n is not None:
                alpha = float(parts[1])
            elif key == "gamma" and len(parts) == 4 and n is not None:
                i, j, v = int(parts[1]), int(parts[2]), float(parts[3])
                if i == j or not (0 <= i < n and 0 <= j < n):
                    raise ParseError(f"bad pair ({i}, {j})", lineno)
                key_ij = _pair(i, j)
                if key_ij in gamma:
                    raise ParseError(f"duplicate gamma for {key_ij}", lineno)
                if v < 0:
                    raise ParseError("gamma must be nonnegative", lineno)
                gamma[key_ij] = v
            else:
                raise ParseError(f"unexpected line {line!r}", lineno)
        except ValueError as exc:
            if isinstance(exc, ParseError):
                raise
            raise ParseError(f"malformed number in {line!r}", lineno) from None
    if n is None or alpha is None:
        raise ParseError("parameters file needs 'qubits' and 'alpha' lines")
    try:
        return AnsatzParams.from_pairs(n, alpha, gamma)
    except DomainError as exc:
        raise ParseError(str(exc)) from None
