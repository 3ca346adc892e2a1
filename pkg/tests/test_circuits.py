import math
import random

import numpy as np
import pytest

from clockchain import CircuitError, Gate, Layer, ParseError, parse_circuit, simulate
from clockchain.circuits import (
    Circuit,
    PAIR_GATES,
    S_MATRIX,
    W_MATRIX,
    acceptance_probability,
    apply_adjacent_pair,
    basis_vector,
    project_qubit,
)

from conftest import DEMO2Q, EMPTY1, WCOIN


def test_parse_demo_circuit():
    circuit = parse_circuit(DEMO2Q)
    assert (circuit.n, circuit.a) == (1, 1)
    assert circuit.answer_qubit == 1
    assert [g.kind for layer in circuit.layers for g in layer.gates] == ["W", "S"]


def test_parse_answer_line():
    circuit = parse_circuit("qubits 2 1\nanswer 1\n")
    assert circuit.answer_qubit == 1


def test_parse_comments_and_blanks():
    circuit = parse_circuit("# header\n\nqubits 1 0  # trailing\nlayer I 0\n")
    assert len(circuit.layers) == 1


@pytest.mark.parametrize(
    "text",
    [
        "layer W 0\n",
        "qubits 0 0\n",
        "qubits 1 1\nanswer 2\n",
        "qubits 1 1\nlayer W 1\n",
        "qubits 1 1\nlayer R 0\n",
        "qubits 1 1\nlayer W 0 S 0\n",
        "qubits 1 1\nqubits 1 1\n",
        "qubits 1 1\nlayer W 0\nanswer 0\n",
    ],
)
def test_parse_rejects(text):
    with pytest.raises(CircuitError):
        parse_circuit(text)


def test_parse_error_carries_line_number():
    with pytest.raises(ParseError) as err:
        parse_circuit("qubits 1 1\nlayer Q 0\n")
    assert err.value.line == 2


def test_w_matrix_shape():
    expected = np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, 1 / math.sqrt(2), -1 / math.sqrt(2)],
            [0, 0, 1 / math.sqrt(2), 1 / math.sqrt(2)],
        ]
    )
    assert np.allclose(W_MATRIX, expected, atol=0)


def test_pair_matrices_unitary():
    for kind, matrix in PAIR_GATES.items():
        assert np.allclose(matrix @ matrix.conj().T, np.eye(4), atol=1e-15), kind


def test_w_acts_only_on_control_one():
    # control zero: both basis states fixed
    for right in (0, 1):
        vec = basis_vector(2, f"0{right}")
        out = apply_adjacent_pair(vec, W_MATRIX, 0, 2)
        assert np.allclose(out, vec, atol=0)
    out = apply_adjacent_pair(basis_vector(2, "10"), W_MATRIX, 0, 2)
    assert np.allclose(out, np.array([0, 0, 1, 1]) / math.sqrt(2), atol=1e-15)
    out = apply_adjacent_pair(basis_vector(2, "11"), W_MATRIX, 0, 2)
    assert np.allclose(out, np.array([0, 0, -1, 1]) / math.sqrt(2), atol=1e-15)


def test_swap_on_middle_pair():
    vec = basis_vector(3, "010")
    out = apply_adjacent_pair(vec, S_MATRIX, 1, 3)
    assert np.allclose(out, basis_vector(3, "001"), atol=0)


def test_project_qubit():
    vec = (basis_vector(2, "01") + basis_vector(2, "11")) / math.sqrt(2)
    kept = project_qubit(vec, 0, 2, 1)
    assert np.allclose(kept, basis_vector(2, "11") / math.sqrt(2), atol=1e-15)


def test_demo_acceptance_is_input_bit():
    circuit = parse_circuit(DEMO2Q)
    assert acceptance_probability(circuit, "0") == pytest.approx(0.0, abs=1e-15)
    assert acceptance_probability(circuit, "1") == pytest.approx(1.0, abs=1e-12)


def test_wcoin_acceptance_half():
    circuit = parse_circuit(WCOIN)
    assert acceptance_probability(circuit, "1") == pytest.approx(0.5, abs=1e-15)
    assert acceptance_probability(circuit, "0") == pytest.approx(0.0, abs=1e-15)


def test_empty_circuit_identity():
    circuit = parse_circuit(EMPTY1)
    assert acceptance_probability(circuit, "1") == pytest.approx(1.0, abs=1e-15)


def test_layer_rejects_overlapping_supports():
    with pytest.raises(CircuitError):
        Layer((Gate("S", 0), Gate("W", 1)))


def test_answer_defaults_to_last_qubit():
    circuit = Circuit(2, 1, ())
    assert circuit.answer_qubit == 2


def test_random_layers_preserve_norm():
    rng = random.Random(1218)
    for _ in range(40):
        width = rng.randint(2, 4)
        layers = []
        for _ in range(rng.randint(1, 3)):
            target = rng.randrange(width - 1)
            layers.append(Layer((Gate(rng.choice("SW"), target),)))
        circuit = Circuit(width - 1, 1, tuple(layers))
        bits = "".join(rng.choice("01") for _ in range(width - 1))
        state = simulate(circuit, bits)
        assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-12
