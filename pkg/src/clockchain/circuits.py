"""Circuit intermediate representation and a dense statevector reference.

Circuits act on n input qubits plus a ancilla qubits arranged on a line.
The unitary gate set is deliberately tiny: S swaps two adjacent qubits and
W is a controlled rotation with the control on the left qubit.  Readout (R)
and annihilation (A) are non-unitary single-qubit operations that only the
chain compiler appends; they are rejected inside user circuits.

Qubit 0 is the leftmost (most significant) position: the basis state
|b0 b1 ... b_{w-1}> has index int("b0b1...b_{w-1}", 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GATE_KINDS = ("I", "S", "W", "R", "A")
TWO_QUBIT_KINDS = ("S", "W")
UNITARY_KINDS = ("I", "S", "W")

# Desk-scale cap: dense vectors of 2**12 amplitudes are the design limit.
MAX_QUBITS = 12

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# Basis order for a pair (left, right): |00>, |01>, |10>, |11>.
W_MATRIX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, _INV_SQRT2, -_INV_SQRT2],
        [0.0, 0.0, _INV_SQRT2, _INV_SQRT2],
    ],
    dtype=complex,
)

S_MATRIX = np.array(
    [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ],
    dtype=complex,
)

PAIR_GATES = {"S": S_MATRIX, "W": W_MATRIX}


class CircuitError(ValueError):
    pass


class ParseError(CircuitError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Gate:
    """A gate anchored at `target`; two-qubit kinds act on (target, target+1)."""

    kind: str
    target: int

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.target < 0:
            raise CircuitError(f"negative gate target {self.target}")

    @property
    def arity(self) -> int:
        return 2 if self.kind in TWO_QUBIT_KINDS else 1

    @property
    def support(self) -> tuple[int, ...]:
        if self.arity == 2:
            return (self.target, self.target + 1)
        return (self.target,)


@dataclass(frozen=True)
class Layer:
    """Gates applied in parallel; supports must be disjoint."""

    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        seen: set[int] = set()
        for gate in self.gates:
            for q in gate.support:
                if q in seen:
                    raise CircuitError(f"overlapping gates at qubit {q}")
                seen.add(q)

    def max_qubit(self) -> int:
        return max((max(g.support) for g in self.gates), default=-1)


@dataclass(frozen=True)
class Circuit:
    """n input qubits, a ancillas (initialized to 0), unitary layers only."""

    n: int
    a: int
    layers: tuple[Layer, ...] = ()
    answer_qubit: int = field(default=-1)

    def __post_init__(self):
        if self.n < 1 or self.a < 0:
            raise CircuitError("need n >= 1 and a >= 0")
        if self.width > MAX_QUBITS:
            raise CircuitError(f"register too wide: {self.width} > {MAX_QUBITS} qubits")
        if self.answer_qubit == -1:
            object.__setattr__(self, "answer_qubit", self.width - 1)
        if not 0 <= self.answer_qubit < self.width:
            raise CircuitError(f"answer qubit {self.answer_qubit} out of range")
        for layer in self.layers:
            if layer.max_qubit() >= self.width:
                raise CircuitError("gate target out of range")
            for gate in layer.gates:
                if gate.kind not in UNITARY_KINDS:
                    raise CircuitError(f"gate {gate.kind} not allowed inside a circuit")

    @property
    def width(self) -> int:
        return self.n + self.a

    @property
    def depth(self) -> int:
        return len(self.layers)


def parse_circuit(text: str) -> Circuit:
    """Parse the plain-text circuit grammar.

    Directives, one per line ('#' starts a comment):
        qubits <n> <a>
        answer <k>                  optional, defaults to the last qubit
        layer <G> <q> [<G> <q>...]  G in {I, S, W}; S/W act on (q, q+1)
    """
    n = a = None
    answer: int | None = None
    layers: list[Layer] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head, args = tokens[0], tokens[1:]
        if head == "qubits":
            if n is not None:
                raise ParseError("duplicate qubits directive", lineno)
            if len(args) != 2:
                raise ParseError("qubits takes two integers", lineno)
            try:
                n, a = int(args[0]), int(args[1])
            except ValueError:
                raise ParseError("qubits takes two integers", lineno) from None
        elif n is None:
            raise ParseError("qubits directive must come first", lineno)
        elif head == "answer":
            if answer is not None:
                raise ParseError("duplicate answer directive", lineno)
            if layers:
                raise ParseError("answer directive must precede layers", lineno)
            if len(args) != 1 or not args[0].lstrip("-").isdigit():
                raise ParseError("answer takes one integer", lineno)
            answer = int(args[0])
        elif head == "layer":
            if len(args) == 0 or len(args) % 2 != 0:
                raise ParseError("layer takes gate/target pairs", lineno)
            gates = []
            for kind, tgt in zip(args[::2], args[1::2]):
                if kind not in UNITARY_KINDS:
                    raise ParseError(f"unknown or non-unitary gate {kind!r}", lineno)
                if not tgt.isdigit():
                    raise ParseError(f"bad gate target {tgt!r}", lineno)
                gates.append(Gate(kind, int(tgt)))
            try:
                layers.append(Layer(tuple(gates)))
            except CircuitError as exc:
                raise ParseError(str(exc), lineno) from None
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if n is None:
        raise ParseError("missing qubits directive", len(text.splitlines()) or 1)
    try:
        return Circuit(n, a, tuple(layers), -1 if answer is None else answer)
    except CircuitError as exc:
        raise ParseError(str(exc), 1) from None


# ---------------------------------------------------------------------------
# Dense statevector reference


@dataclass(frozen=True)
class RegisterState:
    """Dense register state; `norm` may drop below 1 after a projection."""

    amplitudes: np.ndarray
    norm: float

    def __post_init__(self):
        actual = float(np.linalg.norm(self.amplitudes))
        if abs(actual - self.norm) > 1e-12:
            raise CircuitError(f"stored norm {self.norm} != actual {actual}")

    @classmethod
    def from_amplitudes(cls, amplitudes: np.ndarray) -> "RegisterState":
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls(amplitudes, float(np.linalg.norm(amplitudes)))

    @classmethod
    def basis_state(cls, width: int, bits: str) -> "RegisterState":
        vec = basis_vector(width, bits)
        return cls(vec, 1.0)

    @property
    def width(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1


def basis_vector(width: int, bits: str) -> np.ndarray:
    if len(bits) != width or set(bits) - {"0", "1"}:
        raise CircuitError(f"bad bit string {bits!r} for width {width}")
    vec = np.zeros(1 << width, dtype=complex)
    vec[int(bits, 2)] = 1.0
    return vec


def apply_adjacent_pair(vec: np.ndarray, matrix: np.ndarray, q: int, width: int) -> np.ndarray:
    """Apply a 4x4 matrix to qubits (q, q+1) of a dense vector."""
    pre = 1 << q
    post = 1 << (width - q - 2)
    cube = vec.reshape(pre, 4, post)
    return np.einsum("ab,ibj->iaj", matrix, cube).reshape(-1)


def project_qubit(vec: np.ndarray, q: int, width: int, value: int) -> np.ndarray:
    """Zero out every amplitude where qubit q differs from `value`."""
    pre = 1 << q
    cube = vec.reshape(pre, 2, -1).copy()
    cube[:, 1 - value, :] = 0.0
    return cube.reshape(-1)


def apply_gate(vec: np.ndarray, gate: Gate, width: int) -> np.ndarray:
    if gate.kind == "I":
        return vec
    if gate.kind in TWO_QUBIT_KINDS:
        if gate.target + 1 >= width:
            raise CircuitError(f"gate {gate.kind} at {gate.target} runs off the register")
        return apply_adjacent_pair(vec, PAIR_GATES[gate.kind], gate.target, width)
    if gate.kind == "R":
        return project_qubit(vec, gate.target, width, 1)
    if gate.kind == "A":
        return np.zeros_like(vec)
    raise CircuitError(f"cannot apply gate {gate.kind}")


def apply_layer(state: RegisterState, layer: Layer) -> RegisterState:
    vec = state.amplitudes
    width = state.width
    for gate in layer.gates:
        vec = apply_gate(vec, gate, width)
    return RegisterState.from_amplitudes(vec)


def simulate(circuit: Circuit, bits: str) -> RegisterState:
    """Run the unitary layers on |x, 0...0>; `bits` holds the n input bits."""
    if len(bits) != circuit.n:
        raise CircuitError(f"expected {circuit.n} input bits, got {len(bits)}")
    state = RegisterState.basis_state(circuit.width, bits + "0" * circuit.a)
    for layer in circuit.layers:
        state = apply_layer(state, layer)
    return state


def answer_one_probability(vec: np.ndarray, width: int, qubit: int) -> float:
    kept = project_qubit(vec, qubit, width, 1)
    return float(np.real(np.vdot(kept, kept)))


def acceptance_probability(circuit: Circuit, bits: str) -> float:
    """Probability that the answer qubit reads 1 after the unitary layers."""
    final = simulate(circuit, bits)
    return answer_one_probability(final.amplitudes, circuit.width, circuit.answer_qubit)
