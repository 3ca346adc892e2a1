"""Command line front end.

One subcommand per stage: compile a circuit file to a chain, validate the
chain dynamics, trace the branch orbits, print the predicted spectrum,
print the gap and decision regions, run the measurement decision, or
cross-check the spectrum against the dense oracle.

Output is JSON on stdout or, with -o, written atomically to a file (a
relative path lands in $CLOCKCHAIN_OUTPUT_DIR when that is set).  Floats
are serialized with %.17g so equal runs produce byte-identical output.
Exit status is 0 on success and 2 on any failure, including a failed
validation or cross-check.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .circuits import CircuitError, parse_circuit
from .compiler import CompilerError, encode, pad_for_coprimality
from .engine import EngineError, forward_matches, trace_orbits, validate_wellformed
from .measure import MeasurementError, MeasurementModel, decide, decision_statistics
from .oracle import OracleError, verify_predicted_measure
from .spectral import SpectralError, decision_partition, predicted_measure, spectral_gap

OUTPUT_DIR_VAR = "CLOCKCHAIN_OUTPUT_DIR"

_FAILURES = (
    CircuitError,
    CompilerError,
    EngineError,
    SpectralError,
    OracleError,
    MeasurementError,
    OSError,
)


# ---------------------------------------------------------------------------
# Deterministic JSON


def _emit(value, out: list[str]) -> None:
    if value is None:
        out.append("null")
    elif isinstance(value, bool):
        out.append("true" if value else "false")
    elif isinstance(value, (int, np.integer)):
        out.append(str(int(value)))
    elif isinstance(value, (float, np.floating)):
        value = float(value)
        if value != value or value in (float("inf"), float("-inf")):
            raise ValueError("non-finite float in output")
        out.append(format(value, ".17g"))
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif isinstance(value, dict):
        out.append("{")
        for i, (key, item) in enumerate(value.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(key))
            out.append(": ")
            _emit(item, out)
        out.append("}")
    elif isinstance(value, (list, tuple, np.ndarray)):
        out.append("[")
        for i, item in enumerate(value):
            if i:
                out.append(", ")
            _emit(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def render_json(value) -> str:
    out: list[str] = []
    _emit(value, out)
    return "".join(out) + "\n"


def _write_output(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    if not target.is_absolute():
        base = os.environ.get(OUTPUT_DIR_VAR)
        if base:
            target = Path(base) / target
    # Full text goes to a sibling temp file first so a crash can never
    # leave a truncated result at the target path.
    tmp = target.with_name(target.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, target)


# ---------------------------------------------------------------------------
# Shared loading


def _load_circuit(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_circuit(text)


def _build_chain(args):
    circuit = _load_circuit(args.circuit)
    if args.pad:
        return pad_for_coprimality(circuit)
    qubit = getattr(args, "annihilation_qubit", None)
    idle = getattr(args, "idle_layers", 0)
    return encode(circuit, annihilation_qubit=qubit, idle_layers=idle)


def _orbit_p(chain, bits: str) -> float:
    return trace_orbits(chain, bits).p


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_compile(args) -> int:
    chain = _build_chain(args)
    _write_output(
        render_json(
            {
                "m": chain.m,
                "period": chain.period,
                "f0": chain.f0,
                "total_layers": chain.total_layers,
                "r_tilde": chain.r_tilde,
                "s_tilde": chain.s_tilde,
                "clock": list(chain.clock_pair),
                "coprime": chain.coprime,
                "annihilation_qubit": chain.annihilation_qubit,
                "idle_layers": chain.idle_layers,
                "prepended": chain.prepended,
                "program": list(chain.program),
                "data": list(chain.data),
            }
        ),
        args.output,
    )
    return 0


def _cmd_validate(args) -> int:
    chain = _build_chain(args)
    report = validate_wellformed(chain, args.bits)
    _write_output(
        render_json(
            {
                "ok": report.ok,
                "steps_checked": report.steps_checked,
                "p": report.p,
                "violations": list(report.violations),
            }
        ),
        args.output,
    )
    return 0 if report.ok else 2


def _branch_steps(states) -> list:
    steps = []
    for state in states[:-1]:
        rule, position = forward_matches(state.program, state.data)[0]
        steps.append([state.t, rule.rule_id, position])
    return steps


def _cmd_trace(args) -> int:
    chain = _build_chain(args)
    orbit = trace_orbits(chain, args.bits)
    _write_output(
        render_json(
            {
                "p": orbit.p,
                "r_tilde": chain.r_tilde,
                "s_tilde": chain.s_tilde,
                "no_length": len(orbit.no_branch.states),
                "yes_length": len(orbit.yes_branch.states),
                "no_steps": _branch_steps(orbit.no_branch.states),
                "yes_steps": _branch_steps(orbit.yes_branch.states),
            }
        ),
        args.output,
    )
    return 0


def _cmd_spectrum(args) -> int:
    chain = _build_chain(args)
    p = _orbit_p(chain, args.bits)
    measure = predicted_measure(chain.r_tilde, chain.s_tilde, p)
    payload = {
        "r_tilde": chain.r_tilde,
        "s_tilde": chain.s_tilde,
        "p": p,
        "atoms": [[lam, w] for lam, w in zip(measure.eigenvalues, measure.weights)],
    }
    if args.oracle:
        check = verify_predicted_measure(chain, args.bits)
        payload["oracle_dim"] = check.dim
        payload["oracle_tv"] = check.tv
        payload["oracle_ok"] = check.ok()
    _write_output(render_json(payload), args.output)
    return 0


def _cmd_gap(args) -> int:
    chain = _build_chain(args)
    gap = spectral_gap(chain.r_tilde, chain.s_tilde)
    regions = decision_partition(chain.r_tilde, chain.s_tilde)
    _write_output(
        render_json(
            {
                "clock": list(chain.clock_pair),
                "gap": gap,
                "delta": regions.delta,
                "yes_intervals": [list(pair) for pair in regions.intervals],
            }
        ),
        args.output,
    )
    return 0


def _cmd_decide(args) -> int:
    chain = _build_chain(args)
    regions = decision_partition(chain.r_tilde, chain.s_tilde)
    model = MeasurementModel(
        delta=args.delta if args.delta is not None else regions.gap / 3.0,
        epsilon=args.epsilon,
        seed=args.seed,
    )
    p = _orbit_p(chain, args.bits)
    measure = predicted_measure(chain.r_tilde, chain.s_tilde, p)
    outcome = decide(measure, regions, model)
    payload = {
        "decision": outcome.decision,
        "energy": outcome.energy,
        "p": p,
        "delta": model.delta,
        "epsilon": model.epsilon,
        "seed": model.seed,
    }
    if args.runs:
        stats = decision_statistics(measure, regions, model, args.runs)
        payload["runs"] = stats.runs
        payload["yes_count"] = stats.yes_count
        payload["observed_rate"] = stats.observed_rate
        payload["expected_rate"] = stats.expected_rate
        payload["sigma"] = stats.sigma
    _write_output(render_json(payload), args.output)
    return 0


def _cmd_verify_measure(args) -> int:
    chain = _build_chain(args)
    check = verify_predicted_measure(chain, args.bits)
    ok = check.ok(args.tolerance)
    _write_output(
        render_json(
            {
                "dim": check.dim,
                "p": check.p,
                "tv": check.tv,
                "predicted_atoms": check.predicted_atoms,
                "oracle_atoms": check.oracle_atoms,
                "ok": ok,
            }
        ),
        args.output,
    )
    return 0 if ok else 2


# ---------------------------------------------------------------------------
# Parser


def _add_common(sub, bits: bool = False) -> None:
    sub.add_argument("circuit", help="circuit file, or - for stdin")
    sub.add_argument("-o", "--output", help="write JSON here instead of stdout")
    sub.add_argument(
        "--pad",
        action="store_true",
        help="search annihilation qubit and idle padding for a coprime clock pair",
    )
    if bits:
        sub.add_argument("--bits", required=True, help="register input bits")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clockchain",
        description="Compile circuits onto a qudit chain and decide them by one energy measurement.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("compile", help="encode a circuit into the two bands")
    _add_common(sub)
    sub.add_argument("--annihilation-qubit", type=int, default=None)
    sub.add_argument("--idle-layers", type=int, default=0)
    sub.set_defaults(func=_cmd_compile)

    sub = commands.add_parser("validate", help="check the chain dynamics invariants")
    _add_common(sub)
    sub.add_argument("--bits", default=None, help="register input bits (default: superposition probe)")
    sub.set_defaults(func=_cmd_validate)

    sub = commands.add_parser("trace", help="walk both branch orbits")
    _add_common(sub, bits=True)
    sub.set_defaults(func=_cmd_trace)

    sub = commands.add_parser("spectrum", help="predicted spectral measure at the initial state")
    _add_common(sub, bits=True)
    sub.add_argument("--oracle", action="store_true", help="also run the dense cross-check")
    sub.set_defaults(func=_cmd_spectrum)

    sub = commands.add_parser("gap", help="spectral gap and YES intervals")
    _add_common(sub)
    sub.set_defaults(func=_cmd_gap)

    sub = commands.add_parser("decide", help="one simulated energy measurement")
    _add_common(sub, bits=True)
    sub.add_argument("--delta", type=float, default=None, help="device resolution (default: gap/3)")
    sub.add_argument("--epsilon", type=float, default=0.0, help="device outlier rate")
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--runs", type=int, default=0, help="also report Monte Carlo statistics")
    sub.set_defaults(func=_cmd_decide)

    sub = commands.add_parser(
        "verify-measure", help="cross-check the predicted measure against a dense diagonalization"
    )
    _add_common(sub, bits=True)
    sub.add_argument("--tolerance", type=float, default=1e-6, help="total variation bound")
    sub.set_defaults(func=_cmd_verify_measure)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _FAILURES as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main())
