"""Weighted entangled graphs: construction, text format and feasibility checks."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError, ParseError

WEIGHT_TOL = 1e-12


def c_max(n: int) -> float:
    """Largest uniform concurrence reachable from the symmetric starting state."""
    if n < 3:
        raise DomainError(f"c_max needs n >= 3, got {n}")
    return (math.sqrt(6 * n * n - 18 * n + 16) - 2 * n + 4) / (n * (n - 1))


@dataclass(frozen=True)
class EntangledGraph:
    n: int
    edges: Mapping[tuple[int, int], float] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 2:
            raise DomainError(f"graph needs at least 2 vertices, got {self.n}")
        clean = {}
        for (i, j), w in dict(self.edges).items():
            i, j = int(i), int(j)
            if i == j:
                raise DomainError(f"self-loop on vertex {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= self.n:
                raise DomainError(f"edge ({i}, {j}) out of range for n={self.n}")
            if (i, j) in clean:
                raise DomainError(f"duplicate edge ({i}, {j})")
            w = float(w)
            if not (-WEIGHT_TOL <= w <= 1.0 + WEIGHT_TOL) or math.isnan(w):
                raise DomainError(f"edge ({i}, {j}) weight {w} outside [0, 1]")
            if abs(w) <= WEIGHT_TOL:
                continue
            clean[(i, j)] = min(w, 1.0)
        object.__setattr__(self, "edges", dict(sorted(clean.items())))

    def weight(self, i: int, j: int) -> float:
        if i > j:
            i, j = j, i
        return self.edges.get((i, j), 0.0)

    def targets(self) -> dict[tuple[int, int], float]:
        """Target concurrence for every pair, absent edges at 0."""
        return {(i, j): self.weight(i, j) for i in range(self.n) for j in range(i + 1, self.n)}

    @classmethod
    def uniform(cls, n: int, weight: float) -> "EntangledGraph":
        return cls(n, {(i, j): weight for i in range(n) for j in range(i + 1, n)})


@dataclass(frozen=True)
class ValidationReport:
    n: int
    c_max_bound: float
    violations: list = field(default_factory=list)  # (edge, weight, bound)
    ckw_warnings: list = field(default_factory=list)  # (vertex, sum of squares)

    @property
    def feasible(self) -> bool:
        return not self.violations


def validate(g: EntangledGraph) -> ValidationReport:
    bound = c_max(g.n) if g.n >= 3 else 0.0
    violations = [(e, w, bound) for e, w in g.edges.items() if w > bound + WEIGHT_TOL]
    warnings = []
    for v in range(g.n):
        s = sum(w * w for (i, j), w in g.edges.items() if v in (i, j))
        if s > 1.0 + WEIGHT_TOL:
            warnings.append((v, s))
    return ValidationReport(g.n, bound, violations, warnings)


def parse_graph(text: str) -> EntangledGraph:
    n = None
    edges: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "qubits":
            if n is not None or len(parts) != 2:
                raise ParseError("expected a single 'qubits <n>' line", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise ParseError(f"bad vertex count {parts[1]!r}", lineno) from None
            if n < 2:
                raise ParseError(f"vertex count {n} below 2", lineno)
        elif parts[0] == "edge":
            if n is None:
                raise ParseError("'edge' before 'qubits'", lineno)
            if len(parts) != 4:
                raise ParseError("expected 'edge <i> <j> <C>'", lineno)
            try:
                i, j, w = int(parts[1]), int(parts[2]), float(parts[3])
            except ValueError:
                raise ParseError(f"malformed edge line {line!r}", lineno) from None
            if i == j:
                raise ParseError(f"self-loop on vertex {i}", lineno)
            if not (0 <= i < n and 0 <= j < n):
                raise ParseError(f"vertex index out of range in ({i}, {j})", lineno)
            if not 0.0 <= w <= 1.0:
                raise ParseError(f"weight {w} outside [0, 1]", lineno)
            key = (min(i, j), max(i, j))
            if key in edges:
                raise ParseError(f"duplicate edge {key}", lineno)
            edges[key] = w
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'qubits' line")
    return EntangledGraph(n, edges)


def format_graph(g: EntangledGraph) -> str:
    lines = [f"qubits {g.n}"]
    lines += [f"edge {i} {j} {w!r}" for (i, j), w in g.edges.items()]
    return "\n".join(lines) + "\n"
