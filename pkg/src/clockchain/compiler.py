"""Compile circuits onto the two classical bands of the chain.

A compiled chain is a pair of token strings of common length m.  The data
band is static: fence cells every P = n + a + 1 cells, the qubit register in
the P - 1 cells right of the central fence f0, inert filler everywhere else.
The program band holds blanks except for a window of 1 + L*P tokens starting
at f0: an annihilation head above the fence, then one P-token block per
layer, each block listing the per-qubit gate symbols followed by a separator
identity.  The execution marker replaces the first block's leading identity.

Layer blocks put a two-qubit gate symbol above the right qubit of its pair.
The compiled layer sequence extends the circuit with a readout layer on the
answer qubit and an annihilation layer, optionally separated by identity
padding; the block/fence alignment then guarantees each gate symbol acts on
the register during exactly one marker sweep, so the walk of the execution
marker reproduces the circuit layer by layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .circuits import Circuit, Gate, Layer
from .engine import EngineError, SymbolEvent, iter_symbol_steps
from .symbols import BLANK, DOT, EXEC, FENCE, register_slot

MAX_PAD_LAYERS_FACTOR = 4


class CompilerError(Exception):
    pass


@dataclass(frozen=True)
class CompiledChain:
    """Both bands plus the layout facts needed to interpret them."""

    circuit: Circuit
    annihilation_qubit: int
    idle_layers: int
    prepended: bool
    program: tuple[str, ...]
    data: tuple[str, ...]
    period: int
    f0: int
    total_layers: int
    r_tilde: int
    s_tilde: int

    @property
    def m(self) -> int:
        return len(self.program)

    @property
    def register_cells(self) -> range:
        width = self.circuit.n + self.circuit.a
        return range(self.f0 + 1, self.f0 + 1 + width)

    @property
    def clock_pair(self) -> tuple[int, int]:
        return (self.r_tilde + 2, self.s_tilde + 2)

    @property
    def coprime(self) -> bool:
        return math.gcd(*self.clock_pair) == 1


def _layer_symbols(layer: Layer, width: int) -> list[str]:
    symbols = ["I"] * width
    for gate in layer.gates:
        if gate.arity == 2:
            symbols[gate.target + 1] = gate.kind
        elif gate.kind != "I":
            symbols[gate.target] = gate.kind
    return symbols


def extension_layers(
    circuit: Circuit, annihilation_qubit: int, idle_layers: int
) -> tuple[list[list[str]], bool]:
    """Per-layer symbol rows for the full compiled sequence.

    Appends the readout row and the annihilation row after `idle_layers`
    identity rows.  The marker needs an identity in the first row's leading
    slot; a circuit whose first compiled row starts with a gate (only the
    readout row of a layerless circuit with answer qubit 0 can) gets one
    identity row prepended.
    """
    width = circuit.n + circuit.a
    rows = [_layer_symbols(layer, width) for layer in circuit.layers]
    readout = ["I"] * width
    readout[circuit.answer_qubit] = "R"
    rows.append(readout)
    rows.extend([["I"] * width for _ in range(idle_layers)])
    annihilation = ["I"] * width
    annihilation[annihilation_qubit] = "A"
    rows.append(annihilation)
    prepended = rows[0][0] != "I"
    if prepended:
        rows.insert(0, ["I"] * width)
    return rows, prepended


def _assemble_bands(rows: list[list[str]], width: int):
    period = width + 1
    total_layers = len(rows)
    f0 = (total_layers + 1) * period
    m = (2 * total_layers + 2) * period + 1

    tokens = ["A"]
    for row in rows:
        tokens.extend(row)
        tokens.append("I")
    if tokens[1] != "I":
        raise CompilerError("first layer slot is not free for the marker")
    tokens[1] = EXEC

    program = [BLANK] * m
    program[f0 : f0 + len(tokens)] = tokens

    data = []
    for c in range(m):
        if c % period == 0:
            data.append(FENCE)
        elif f0 < c <= f0 + width:
            data.append(register_slot(c - f0 - 1))
        else:
            data.append(DOT)
    return tuple(program), tuple(data), period, f0, total_layers


def extract_clock_lengths(program, data, register_cells: range, answer_cell: int, m: int, total_layers: int, period: int) -> tuple[int, int]:
    """Walk the marker and read off when readout and annihilation fire.

    Returns (r_tilde, s_tilde): the readout happens on the step out of clock
    position r_tilde + 1 and the annihilation on the step out of s_tilde + 1.
    """
    max_steps = 10 * m * (total_layers + 2) * period
    readout_step: Optional[int] = None
    final: Optional[SymbolEvent] = None
    try:
        for event in iter_symbol_steps(program, data, register_cells, max_steps):
            final = event
            if not event.over_register:
                continue
            if event.gate in ("S", "W") and event.position not in register_cells:
                raise CompilerError(
                    f"step {event.step}: pair gate {event.gate} half on the register"
                )
            if event.gate == "R":
                if event.position + 1 != answer_cell:
                    raise CompilerError(
                        f"step {event.step}: readout hit cell {event.position + 1}, "
                        f"not the answer cell {answer_cell}"
                    )
                if readout_step is not None:
                    raise CompilerError(f"step {event.step}: second readout")
                readout_step = event.step
    except EngineError as exc:
        raise CompilerError(f"marker walk failed: {exc}") from exc
    if final is None or final.gate != "A":
        raise CompilerError("marker walk ended without annihilation")
    if readout_step is None:
        raise CompilerError("readout never reached the answer cell")
    return readout_step - 1, final.step - 1


def encode(circuit: Circuit, annihilation_qubit: Optional[int] = None, idle_layers: int = 0) -> CompiledChain:
    width = circuit.n + circuit.a
    if annihilation_qubit is None:
        annihilation_qubit = circuit.answer_qubit
    if not 0 <= annihilation_qubit < width:
        raise CompilerError(f"annihilation qubit {annihilation_qubit} out of range")
    if idle_layers < 0:
        raise CompilerError("negative idle padding")

    rows, prepended = extension_layers(circuit, annihilation_qubit, idle_layers)
    program, data, period, f0, total_layers = _assemble_bands(rows, width)
    register_cells = range(f0 + 1, f0 + 1 + width)
    answer_cell = f0 + 1 + circuit.answer_qubit
    r_tilde, s_tilde = extract_clock_lengths(
        program, data, register_cells, answer_cell, len(program), total_layers, period
    )
    return CompiledChain(
        circuit=circuit,
        annihilation_qubit=annihilation_qubit,
        idle_layers=idle_layers,
        prepended=prepended,
        program=program,
        data=data,
        period=period,
        f0=f0,
        total_layers=total_layers,
        r_tilde=r_tilde,
        s_tilde=s_tilde,
    )


def pad_for_coprimality(circuit: Circuit, max_idle_layers: Optional[int] = None) -> CompiledChain:
    """Choose annihilation qubit and idle padding so the two effective clock
    lengths r_tilde + 2 and s_tilde + 2 are coprime.

    Idle padding alone cannot always get there: both lengths have parities
    pinned by the answer and annihilation cell positions, so when they come
    out both even for every padding the annihilation qubit itself must move.
    The search tries the answer qubit first, then the others left to right,
    with padding 0..max for each.
    """
    width = circuit.n + circuit.a
    period = width + 1
    if max_idle_layers is None:
        max_idle_layers = MAX_PAD_LAYERS_FACTOR * period + 4
    candidates = [circuit.answer_qubit] + [
        q for q in range(width) if q != circuit.answer_qubit
    ]
    for qubit in candidates:
        for k in range(max_idle_layers + 1):
            chain = encode(circuit, annihilation_qubit=qubit, idle_layers=k)
            if chain.coprime:
                return chain
    raise CompilerError(
        f"no coprime clock pair with padding up to {max_idle_layers} layers"
    )


# ---------------------------------------------------------------------------
# Decoding and inspection


@dataclass(frozen=True)
class DecodedProgram:
    circuit: Circuit
    annihilation_qubit: int
    idle_layers: int


def decode_program(chain: CompiledChain) -> DecodedProgram:
    """Read the program band back into a circuit.

    A prepended identity row decodes as an explicit leading identity layer,
    so the decoded circuit re-encodes to the same bands rather than always
    matching the original circuit object.
    """
    width = chain.circuit.n + chain.circuit.a
    period = chain.period
    window = [t for t in chain.program if t != BLANK]
    if len(window) != 1 + chain.total_layers * period:
        raise CompilerError("program window has the wrong length")
    if window[0] != "A" or window[1] != EXEC:
        raise CompilerError("program window is missing its head or marker")
    tokens = list(window)
    tokens[1] = "I"

    rows = []
    for layer_index in range(chain.total_layers):
        block = tokens[1 + layer_index * period : 1 + (layer_index + 1) * period]
        if block[-1] != "I":
            raise CompilerError(f"block {layer_index} lacks its separator")
        rows.append(block[:-1])

    def row_gates(row: list[str]) -> list[Gate]:
        gates = []
        for qubit, symbol in enumerate(row):
            if symbol == "I":
                continue
            if symbol in ("S", "W"):
                if qubit == 0:
                    raise CompilerError("pair gate symbol above qubit 0")
                gates.append(Gate(symbol, qubit - 1))
            else:
                raise CompilerError(f"gate {symbol} inside a circuit layer")
        return gates

    special = [
        (i, row.index(sym), sym)
        for i, row in enumerate(rows)
        for sym in ("R", "A")
        if sym in row
    ]
    if [sym for _, _, sym in special] != ["R", "A"]:
        raise CompilerError("expected exactly one readout row then one annihilation row")
    (readout_row, answer_qubit, _), (annihilation_row, annihilation_qubit, _) = special
    if readout_row >= annihilation_row:
        raise CompilerError("readout and annihilation share a row")
    for i in range(readout_row + 1, annihilation_row):
        if any(sym != "I" for sym in rows[i]):
            raise CompilerError(f"row {i} between readout and annihilation is not idle")

    layers = [Layer(tuple(row_gates(row))) for row in rows[:readout_row]]
    circuit = Circuit(chain.circuit.n, chain.circuit.a, tuple(layers), answer_qubit)
    return DecodedProgram(circuit, annihilation_qubit, annihilation_row - readout_row - 1)


def band_dump(chain: CompiledChain) -> str:
    """Two-row rendering of the bands, fence-aligned, for eyeballing."""
    cell = max(len(t) for t in chain.program + chain.data)
    groups_prog = []
    groups_data = []
    for start in range(0, chain.m, chain.period):
        stop = min(start + chain.period, chain.m)
        groups_prog.append(" ".join(t.ljust(cell) for t in chain.program[start:stop]))
        groups_data.append(" ".join(t.ljust(cell) for t in chain.data[start:stop]))
    lines = [
        f"m={chain.m} period={chain.period} f0={chain.f0} "
        f"clock=({chain.r_tilde}, {chain.s_tilde})",
        "program: " + " | ".join(groups_prog),
        "data:    " + " | ".join(groups_data),
    ]
    return "\n".join(lines)
