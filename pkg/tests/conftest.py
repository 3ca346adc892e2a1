import pytest

from clockchain import parse_circuit, pad_for_coprimality

# Two-layer two-qubit demo circuit: W then a swap, answer on the last qubit.
# Computes the input bit, so it accepts x=1 surely and rejects x=0 surely.
DEMO2Q = "qubits 1 1\nlayer W 0\nlayer S 0\n"
DEMO2Q_ANS0 = "qubits 1 1\nanswer 0\nlayer W 0\nlayer S 0\n"
# Single W with the answer on the target: accepts x=1 with probability 1/2.
WCOIN = "qubits 1 1\nanswer 1\nlayer W 0\n"
# No gates at all on a single wire: answer equals the input bit.
EMPTY1 = "qubits 1 0\nanswer 0\n"
DOUBLE_W = "qubits 1 1\nlayer W 0\nlayer W 0\n"
# Three data cells, to keep the width-2 special cases honest.
WIDE3 = "qubits 2 1\nlayer W 0\nlayer S 1\n"

TEXTS = {
    "demo": DEMO2Q,
    "demo_ans0": DEMO2Q_ANS0,
    "wcoin": WCOIN,
    "empty1": EMPTY1,
    "double_w": DOUBLE_W,
    "wide3": WIDE3,
}


@pytest.fixture(scope="session")
def circuits():
    return {name: parse_circuit(text) for name, text in TEXTS.items()}


@pytest.fixture(scope="session")
def chains(circuits):
    return {
        name: pad_for_coprimality(circuits[name])
        for name in ("demo", "wcoin", "empty1", "double_w", "wide3")
    }
