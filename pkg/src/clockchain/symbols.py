"""Cell alphabets for the chain.

Every cell of the chain carries a pair (program symbol, data symbol).
There are 14 program symbols and 4 data symbols, so a cell is a 56-level
system.  The tokens below are also the wire format used by band dumps.

Program symbols:
    gate symbols        I S W R A
    marked gate symbols iI iS iW iR iA   (a gate symbol carrying the
                                          left-moving return marker)
    hole                HO   (right-moving, executes nothing)
    execution marker    EX   (right-moving, executes gates as it swaps)
    turn-around         TA
    blank               ..

Data symbols:
    qubit values        0 1      (only inside the data register)
    fence               ||       (separates register-sized blocks)
    dot                 **       (inert filler)

The engine additionally writes register slot tokens q0, q1, ... into the
data band where the register lives; the slot's quantum state is tracked
separately.  Slot tokens count as qubit-like for rule conditions.
"""

from __future__ import annotations

GATE_I = "I"
GATE_S = "S"
GATE_W = "W"
GATE_R = "R"
GATE_A = "A"

GATE_SYMBOLS: tuple[str, ...] = (GATE_I, GATE_S, GATE_W, GATE_R, GATE_A)

HOLE = "HO"
EXEC = "EX"
TURN = "TA"
BLANK = ".."


def marked(gate: str) -> str:
    """Marked variant of a gate symbol."""
    if gate not in GATE_SYMBOLS:
        raise ValueError(f"not a gate symbol: {gate!r}")
    return "i" + gate


def unmarked(symbol: str) -> str:
    if not is_marked(symbol):
        raise ValueError(f"not a marked symbol: {symbol!r}")
    return symbol[1:]


def is_marked(symbol: str) -> bool:
    return len(symbol) == 2 and symbol[0] == "i" and symbol[1:] in GATE_SYMBOLS


MARKED_SYMBOLS: tuple[str, ...] = tuple(marked(g) for g in GATE_SYMBOLS)

# Symbols of which a well-formed configuration holds exactly one.
CONTROL_SYMBOLS = frozenset((HOLE, EXEC, TURN)) | frozenset(MARKED_SYMBOLS)

PROGRAM_SYMBOLS = (
    frozenset(GATE_SYMBOLS) | frozenset((HOLE, EXEC, TURN, BLANK)) | frozenset(MARKED_SYMBOLS)
)

ZERO = "0"
ONE = "1"
FENCE = "||"
DOT = "**"

DATA_SYMBOLS = frozenset((ZERO, ONE, FENCE, DOT))


def register_slot(qubit: int) -> str:
    return f"q{qubit}"


def is_register_slot(token: str) -> bool:
    return len(token) >= 2 and token[0] == "q" and token[1:].isdigit()


def slot_qubit(token: str) -> int:
    if not is_register_slot(token):
        raise ValueError(f"not a register slot: {token!r}")
    return int(token[1:])


def is_qubit_like(token: str) -> bool:
    """True for cells that can hold a qubit value (0/1 or a register slot)."""
    return token == ZERO or token == ONE or is_register_slot(token)


def is_star(token: str) -> bool:
    """The wildcard used by rule conditions: any data symbol except the fence."""
    return token == DOT or is_qubit_like(token)


def is_fence(token: str) -> bool:
    return token == FENCE
