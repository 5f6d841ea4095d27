"""Command-line front end.

Exit codes: 0 success, 1 usage or parse error, 2 infeasible input,
3 non-convergence.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import ansatz, circuit, graph_model, quantum_core, simulator, solver
from .errors import EntangledGraphError, NonConvergenceError, ParseError

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_NONCONVERGENCE = 0, 1, 2, 3

LITERAL_WARNING = (
    "WARNING: the literal network is a transcription of the published gate sequence;\n"
    "WARNING: its Toffoli step re-triggers on the |1...1> branch and leaves half of each\n"
    "WARNING: pair-flip component unpopulated, so the fidelity below is diagnostic only."
)


def _num(x: float) -> str:
    return f"{x:.12g}"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | None, text: str, out) -> None:
    if path is None or path == "-":
        out.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def cmd_validate(args, out) -> int:
    g = graph_model.parse_graph(_read(args.graph))
    report = graph_model.validate(g)
    out.write(f"vertices {g.n}\n")
    out.write(f"c_max {_num(report.c_max_bound)}\n")
    bad = {edge for edge, _, _ in report.violations}
    for (i, j), w in g.edges.items():
        verdict = "EXCEEDS" if (i, j) in bad else "ok"
        out.write(f"edge {i} {j} {_num(w)} {verdict}\n")
    for v, s in report.ckw_warnings:
        out.write(f"ckw-warning vertex {v} sum_sq {_num(s)} > 1\n")
    out.write(f"feasible {'yes' if report.feasible else 'no'} ({len(report.violations)} violation(s))\n")
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_solve(args, out) -> int:
    g = graph_model.parse_graph(_read(args.graph))
    report = graph_model.validate(g)
    if not report.feasible:
        out.write(f"infeasible: {len(report.violations)} edge(s) above c_max {_num(report.c_max_bound)}\n")
        for (i, j), w, bound in report.violations:
            out.write(f"edge {i} {j} {_num(w)} > {_num(bound)}\n")
        return EXIT_INFEASIBLE
    cfg = solver.SolveConfig(
        tolerance=args.tolerance,
        max_sweeps=args.max_sweeps,
        mode=args.mode,
        concurrence=args.concurrence,
    )
    try:
        params, trace = solver.solve(g, cfg)
    except NonConvergenceError as exc:
        if args.trace and exc.trace is not None:
            _write(args.trace, exc.trace.format(), out)
        out.write(f"no convergence: {exc}\n")
        return EXIT_NONCONVERGENCE
    if args.trace:
        _write(args.trace, trace.format(), out)
    res = solver.verify(params, g)
    out_path = args.output if args.output else str(Path(args.graph).with_suffix(".params"))
    _write(out_path, ansatz.format_params(params), out)
    out.write(f"evaluator {trace.evaluator}\n")
    out.write(f"sweeps {trace.sweeps}\n")
    if trace.fallback_sweep is not None:
        out.write(f"fallback per-edge at sweep {trace.fallback_sweep}\n")
    out.write(f"max_residual {_num(res.max_residual)}\n")
    out.write(f"validity_slack {_num(params.validity_slack())}\n")
    out.write(f"monotonicity_violations {len(trace.monotonicity_violations)}\n")
    out.write(f"ckw {'ok' if res.ckw_ok else 'VIOLATED'}\n")
    out.write(f"params {out_path}\n")
    return EXIT_OK


def cmd_circuit(args, out) -> int:
    p = ansatz.parse_params(_read(args.params))
    c = circuit.build_literal(p) if args.circuit_mode == "literal" else circuit.build_corrected(p)
    text = c.format()
    summary_lines = [f"mode {c.mode}", f"ops {len(c.ops)}"]
    summary_lines += [f"count {k} {v}" for k, v in sorted(c.counts.items())]
    summary_lines += [f"stage {name} {size}" for name, size in c.stage_sizes().items()]
    summary = "\n".join(summary_lines) + "\n"
    if args.output:
        _write(args.output, text, out)
        out.write(summary)
    else:
        out.write(text)
        sys.stderr.write(summary)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    c = circuit.parse_circuit(_read(args.circuit))
    p = ansatz.parse_params(_read(args.params))
    if p.n != c.n:
        raise ParseError(f"circuit has {c.n} graph qubits but parameters describe {p.n}")
    target = ansatz.build_state(p)
    result = simulator.run(c, target=target, snapshots=True)
    if c.mode == "literal":
        out.write(LITERAL_WARNING + "\n")
    out.write(f"mode {c.mode}\n")
    out.write(f"fidelity {_num(result.fidelity_vs_target)}\n")
    out.write(f"ancilla_error {_num(result.ancilla_product_error)}\n")
    for name, snap in result.snapshots.items():
        out.write(f"stage {name} overlap_with_target {_num(simulator.fidelity(snap, simulator.with_ancillas(target)))}\n")
    if c.mode == "literal" and {name for name, _, _ in c.stages} >= {"G1", "G2", "G3"}:
        for line in simulator.diagnose_literal(c, p).lines():
            out.write(f"diagnosis {line}\n")
    return EXIT_OK


def cmd_concurrence(args, out) -> int:
    if args.state:
        psi = quantum_core.parse_statevector(_read(args.state))
    elif args.random_qubits:
        rng = np.random.default_rng(args.seed)
        q = args.random_qubits
        amps = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
        psi = quantum_core.StateVector.from_amplitudes(amps, normalize=True)
    else:
        raise ParseError("concurrence needs a state file or --random-qubits")
    cm = quantum_core.concurrence_matrix(psi)
    out.write(f"qubits {psi.q}\n")
    for row in cm:
        out.write(" ".join(_num(x) for x in row) + "\n")
    for j, lhs, rhs in quantum_core.ckw_audit(psi):
        out.write(f"ckw {j} sum_sq {_num(lhs)} tangle_sq {_num(rhs)}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entangled-graphs", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized inputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a graph against the feasibility bound")
    p.add_argument("graph")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("solve", help="find ansatz amplitudes realizing a graph")
    p.add_argument("graph")
    p.add_argument("-o", "--output", help="parameters file (default: <graph>.params)")
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--max-sweeps", type=int, default=200)
    p.add_argument("--mode", choices=solver.MODES, default="per-edge")
    p.add_argument("--concurrence", choices=solver.EVALUATORS, default="auto")
    p.add_argument("--trace", help="write one line per sweep to this path")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("circuit", help="compile parameters into a preparation circuit")
    p.add_argument("params")
    p.add_argument("--circuit-mode", choices=("literal", "corrected"), default="corrected")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_circuit)

    p = sub.add_parser("simulate", help="run a circuit and compare with the ansatz state")
    p.add_argument("circuit")
    p.add_argument("params")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("concurrence", help="pairwise concurrence matrix of a state")
    p.add_argument("state", nargs="?")
    p.add_argument("--random-qubits", type=int)
    p.set_defaults(func=cmd_concurrence)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except EntangledGraphError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
