"""Pure states realizing weighted entangled graphs, and circuits preparing them."""
from .ansatz import AnsatzParams, build_state, symmetric_params
from .graph_model import EntangledGraph, c_max, parse_graph, validate
from .quantum_core import StateVector, pair_concurrence, wootters_concurrence
from .solver import SolveConfig, solve, verify

__all__ = [
    "AnsatzParams",
    "EntangledGraph",
    "SolveConfig",
    "StateVector",
    "build_state",
    "c_max",
    "pair_concurrence",
    "parse_graph",
    "solve",
    "symmetric_params",
    "validate",
    "verify",
    "wootters_concurrence",
]
