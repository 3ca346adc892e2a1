"""Single-step dynamics of the program-band automaton.

The chain evolves by one local rewrite per step: a two-cell operator is
summed over every adjacent pair of cells, and on a well-formed configuration
exactly one (rule, position) pair matches.  The rules move a control symbol
right through the program code, hand a marker back to the left edge, and
re-launch the control one cell further left, so the program slides leftward
one cell per sweep while the execution marker fires gates whenever its sweep
lines the program up with the data register.

Rule table (left pair -> right pair; G, F range over gate symbols):

    1a  HO G        ->  G HO
    1b  EX G        ->  G EX        gate G executes on the data pair
    2a  HO ..       ->  TA ..       requires a non-fence cell under HO
    2b  EX ..       ->  TA ..       requires a fence cell under EX
    3   G  TA       ->  iG ..
    4   F  iG       ->  iF G
    5   .. iG       ->  TA G
    6a  .. TA       ->  .. HO       requires a non-fence cell under TA
    6b  .. TA       ->  .. EX       requires a fence cell under TA

Gate execution happens before the symbol swap: with EX at cell j and gate G
at cell j+1, S and W act on the data pair (j, j+1) when both cells are
register cells, R projects a register cell at j+1 onto |1> (splitting the
evolution into a kept branch and an annihilated branch), and A wipes any
register cell at j+1 (annihilating the state).  On non-register data every
gate acts as the identity.  Running backward applies the same recipe with
adjoint gates after un-swapping the symbols; in particular the A that heads
every compiled program annihilates the initial configuration when stepped
backward, which is what pins the evolution to a half-infinite clock line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .circuits import PAIR_GATES, answer_one_probability, apply_adjacent_pair, project_qubit
from .symbols import (
    BLANK,
    CONTROL_SYMBOLS,
    EXEC,
    GATE_SYMBOLS,
    HOLE,
    TURN,
    is_fence,
    is_star,
    marked,
)

_ANNIHILATION_TOL = 1e-24


class EngineError(Exception):
    pass


class IllFormedError(EngineError):
    """Zero or multiple (rule, position) matches at a configuration."""

    def __init__(self, message: str, matches: tuple = ()):
        super().__init__(message)
        self.matches = matches


class BoundaryOverflowError(EngineError):
    """The active symbol ran into the end of the chain."""


class SafetyBoundError(EngineError):
    """Forward evolution exceeded the step budget without terminating."""


@dataclass(frozen=True)
class TransitionRule:
    rule_id: str
    lhs: tuple[str, str]
    rhs: tuple[str, str]
    # (side, kind): the rule fires only if the data cell on `side` of the
    # pair is a star ("0"/"1"/dot/slot) or a fence.  Data is never moved,
    # so the same condition disambiguates forward and backward matching.
    condition: Optional[tuple[str, str]] = None


def _build_rules() -> tuple[TransitionRule, ...]:
    rules: list[TransitionRule] = []
    for g in GATE_SYMBOLS:
        rules.append(TransitionRule("1a", (HOLE, g), (g, HOLE)))
        rules.append(TransitionRule("1b", (EXEC, g), (g, EXEC)))
    rules.append(TransitionRule("2a", (HOLE, BLANK), (TURN, BLANK), ("left", "star")))
    rules.append(TransitionRule("2b", (EXEC, BLANK), (TURN, BLANK), ("left", "fence")))
    for g in GATE_SYMBOLS:
        rules.append(TransitionRule("3", (g, TURN), (marked(g), BLANK)))
    for f in GATE_SYMBOLS:
        for g in GATE_SYMBOLS:
            rules.append(TransitionRule("4", (f, marked(g)), (marked(f), g)))
    for g in GATE_SYMBOLS:
        rules.append(TransitionRule("5", (BLANK, marked(g)), (TURN, g)))
    rules.append(TransitionRule("6a", (BLANK, TURN), (BLANK, HOLE), ("right", "star")))
    rules.append(TransitionRule("6b", (BLANK, TURN), (BLANK, EXEC), ("right", "fence")))
    return tuple(rules)


RULES: tuple[TransitionRule, ...] = _build_rules()


def _index(rules: Iterable[TransitionRule], key: str) -> dict:
    table: dict[tuple[str, str], tuple[TransitionRule, ...]] = {}
    for rule in rules:
        pair = getattr(rule, key)
        table[pair] = table.get(pair, ()) + (rule,)
    return table

_FORWARD_INDEX = _index(RULES, "lhs")
_BACKWARD_INDEX = _index(RULES, "rhs")


def _condition_holds(rule: TransitionRule, data_pair: tuple[str, str]) -> bool:
    if rule.condition is None:
        return True
    side, kind = rule.condition
    token = data_pair[0] if side == "left" else data_pair[1]
    return is_star(token) if kind == "star" else is_fence(token)


def forward_matches(program, data) -> list[tuple[TransitionRule, int]]:
    """All (rule, position) pairs whose left side matches the configuration."""
    out = []
    for j in range(len(program) - 1):
        for rule in _FORWARD_INDEX.get((program[j], program[j + 1]), ()):
            if _condition_holds(rule, (data[j], data[j + 1])):
                out.append((rule, j))
    return out


def backward_matches(program, data) -> list[tuple[TransitionRule, int]]:
    """All (rule, position) pairs whose right side matches the configuration."""
    out = []
    for j in range(len(program) - 1):
        for rule in _BACKWARD_INDEX.get((program[j], program[j + 1]), ()):
            if _condition_holds(rule, (data[j], data[j + 1])):
                out.append((rule, j))
    return out


def control_cells(program) -> list[int]:
    return [j for j, sym in enumerate(program) if sym in CONTROL_SYMBOLS]


def _splice(program: tuple[str, ...], j: int, pair: tuple[str, str]) -> tuple[str, ...]:
    return program[:j] + pair + program[j + 2 :]


def _require_unique(matches, program, data, direction: str):
    if len(matches) == 1:
        return matches[0]
    if not matches:
        m = len(program)
        for c in control_cells(program):
            if c <= 1 or c >= m - 2:
                raise BoundaryOverflowError(
                    f"active symbol at cell {c} has run out of chain ({direction})"
                )
        raise IllFormedError(f"no rule applies {direction}", ())
    detail = ", ".join(f"rule {r.rule_id} at {j}" for r, j in matches)
    raise IllFormedError(f"ambiguous configuration ({direction}): {detail}", tuple(matches))


# ---------------------------------------------------------------------------
# Quantum states and single steps


@dataclass(frozen=True, eq=False)
class QcaState:
    """Full chain state: classical bands plus the register statevector.

    `t` is the clock label; compiled chains start at t = 1.
    """

    program: tuple[str, ...]
    data: tuple[str, ...]
    register: np.ndarray
    t: int
    register_cells: range

    @property
    def width(self) -> int:
        return len(self.register_cells)

    def qubit_of(self, cell: int) -> int:
        return cell - self.register_cells.start

    def register_norm(self) -> float:
        return float(np.linalg.norm(self.register))

    def same_configuration(self, other: "QcaState") -> bool:
        return self.program == other.program and self.data == other.data


@dataclass(frozen=True)
class Next:
    state: QcaState


@dataclass(frozen=True)
class Split:
    """Readout fired: kept branch `yes` with weight p, discarded weight 1 - p."""

    yes: Optional[QcaState]
    p: float


@dataclass(frozen=True)
class Annihilated:
    pass


@dataclass(frozen=True)
class Prev:
    state: QcaState


def _is_pair_of_register_cells(state: QcaState, j: int) -> bool:
    return j in state.register_cells and (j + 1) in state.register_cells


def step_forward(state: QcaState):
    """Apply the unique forward rewrite; the gate part acts before the swap."""
    matches = forward_matches(state.program, state.data)
    rule, j = _require_unique(matches, state.program, state.data, "forward")
    program = _splice(state.program, j, rule.rhs)
    register = state.register
    if rule.rule_id == "1b":
        gate = rule.lhs[1]
        if gate in PAIR_GATES and _is_pair_of_register_cells(state, j):
            register = apply_adjacent_pair(
                register, PAIR_GATES[gate], state.qubit_of(j), state.width
            )
        elif gate == "R" and (j + 1) in state.register_cells:
            qubit = state.qubit_of(j + 1)
            kept = project_qubit(register, qubit, state.width, 1)
            p = float(np.real(np.vdot(kept, kept)))
            yes = None
            if p > _ANNIHILATION_TOL:
                yes = QcaState(
                    program, state.data, kept / math.sqrt(p), state.t + 1, state.register_cells
                )
            return Split(yes, min(p, 1.0))
        elif gate == "A" and (j + 1) in state.register_cells:
            return Annihilated()
    return Next(QcaState(program, state.data, register, state.t + 1, state.register_cells))


def step_backward(state: QcaState):
    """Apply the unique backward rewrite (un-swap first, then adjoint gates)."""
    matches = backward_matches(state.program, state.data)
    rule, j = _require_unique(matches, state.program, state.data, "backward")
    program = _splice(state.program, j, rule.lhs)
    register = state.register
    if rule.rule_id == "1b":
        gate = rule.lhs[1]
        if gate in PAIR_GATES and _is_pair_of_register_cells(state, j):
            adjoint = PAIR_GATES[gate].conj().T
            register = apply_adjacent_pair(register, adjoint, state.qubit_of(j), state.width)
        elif gate == "R" and (j + 1) in state.register_cells:
            register = project_qubit(register, state.qubit_of(j + 1), state.width, 1)
            if float(np.real(np.vdot(register, register))) <= _ANNIHILATION_TOL:
                return Annihilated()
        elif gate == "A" and (j + 1) in state.register_cells:
            return Annihilated()
    return Prev(QcaState(program, state.data, register, state.t - 1, state.register_cells))


# ---------------------------------------------------------------------------
# Symbol-level walk (register-free; the symbol dynamics does not depend on
# the register contents, only on fence positions)


@dataclass(frozen=True)
class SymbolEvent:
    step: int
    rule_id: str
    position: int
    gate: Optional[str]
    over_register: bool


def iter_symbol_steps(program, data, register_cells: range, max_steps: int):
    """Yield one SymbolEvent per step until annihilation or the step budget.

    The walk treats the R projection as a pass-through (the kept branch) so
    it always reaches the annihilation event of a well-formed chain.
    """
    program = tuple(program)
    data = tuple(data)
    for step in range(1, max_steps + 1):
        matches = forward_matches(program, data)
        rule, j = _require_unique(matches, program, data, "forward")
        gate = rule.lhs[1] if rule.rule_id == "1b" else None
        over_register = gate is not None and (j + 1) in register_cells
        yield SymbolEvent(step, rule.rule_id, j, gate, over_register)
        if gate == "A" and over_register:
            return
        program = _splice(program, j, rule.rhs)
    raise SafetyBoundError(f"no annihilation within {max_steps} symbol steps")


# ---------------------------------------------------------------------------
# Orbit tracing


@dataclass(frozen=True)
class BranchTrace:
    branch: str
    weight: float
    states: tuple[QcaState, ...]


@dataclass(frozen=True)
class OrbitResult:
    no_branch: BranchTrace
    yes_branch: BranchTrace
    p: float

    @property
    def r_eff(self) -> int:
        return len(self.no_branch.states) - 1 if self.no_branch.states else -1

    @property
    def s_eff(self) -> int:
        return len(self.yes_branch.states) - 1 if self.yes_branch.states else -1


def safety_bound(chain) -> int:
    return 10 * chain.m * (chain.total_layers + 2) * chain.period


def initial_state(chain, bits: Optional[str] = None, register: Optional[np.ndarray] = None) -> QcaState:
    """Initial configuration of a compiled chain.

    `bits` fills the register basis state |x, 0...0>; a raw register vector
    may be passed instead (used by the well-formedness probe).
    """
    width = len(chain.register_cells)
    if register is None:
        if bits is None:
            raise EngineError("need input bits or an explicit register vector")
        if len(bits) != chain.circuit.n or set(bits) - {"0", "1"}:
            raise EngineError(f"bad input bits {bits!r}")
        full = bits + "0" * chain.circuit.a
        register = np.zeros(1 << width, dtype=complex)
        register[int(full, 2)] = 1.0
    else:
        register = np.asarray(register, dtype=complex)
        if register.size != 1 << width:
            raise EngineError("register vector has the wrong dimension")
    return QcaState(tuple(chain.program), tuple(chain.data), register, 1, chain.register_cells)


def trace_orbits(chain, bits: Optional[str] = None, register: Optional[np.ndarray] = None) -> OrbitResult:
    """Trace both spectral branches of a compiled chain.

    The kept (YES) branch is the orbit of the readout-projected component,
    extended back to t = 1 by backward steps; the discarded (NO) branch is
    its orthogonal complement inside the pre-readout orbit.  Branch weights
    are p and 1 - p where p is the readout probability.
    """
    start = initial_state(chain, bits, register)
    bound = safety_bound(chain)
    raw = [start]
    state = start
    split = None
    for _ in range(bound):
        result = step_forward(state)
        if isinstance(result, Next):
            raw.append(result.state)
            state = result.state
        elif isinstance(result, Split):
            split = result
            break
        else:
            raise IllFormedError("annihilation before readout")
    if split is None:
        raise SafetyBoundError(f"no readout within {bound} steps")
    p = split.p

    yes_states: list[QcaState] = []
    if split.yes is not None:
        post = [split.yes]
        state = split.yes
        for _ in range(bound):
            result = step_forward(state)
            if isinstance(result, Next):
                post.append(result.state)
                state = result.state
            elif isinstance(result, Annihilated):
                break
            else:
                raise IllFormedError("second readout on the kept branch")
        else:
            raise SafetyBoundError(f"no annihilation within {bound} steps")
        pre: list[QcaState] = []
        state = split.yes
        while state.t > 1:
            result = step_backward(state)
            if not isinstance(result, Prev):
                raise IllFormedError("kept branch annihilated while rewinding")
            pre.append(result.state)
            state = result.state
        pre.reverse()
        yes_states = pre + post

    no_states: list[QcaState] = []
    if p < 1.0 - 1e-15:
        scale = 1.0 / math.sqrt(1.0 - p)
        for t_index, raw_state in enumerate(raw):
            reg = raw_state.register
            if yes_states:
                reg = (reg - math.sqrt(p) * yes_states[t_index].register) * scale
            new = QcaState(
                raw_state.program, raw_state.data, reg, raw_state.t, raw_state.register_cells
            )
            no_states.append(new)

    return OrbitResult(
        no_branch=BranchTrace("NO", 1.0 - p, tuple(no_states)),
        yes_branch=BranchTrace("YES", p, tuple(yes_states)),
        p=p,
    )


# ---------------------------------------------------------------------------
# Well-formedness validation


@dataclass(frozen=True)
class WellFormedReport:
    ok: bool
    steps_checked: int
    p: float
    violations: tuple[str, ...] = ()


def _uniform_register(width: int) -> np.ndarray:
    dim = 1 << width
    return np.full(dim, 1.0 / math.sqrt(dim), dtype=complex)


def validate_wellformed(chain, bits: Optional[str] = None) -> WellFormedReport:
    """Check the dynamical invariants of a compiled chain along its orbit.

    At every orbit state exactly one rule matches forward and exactly one
    backward, there is exactly one control or marked symbol, and stepping
    backward undoes stepping forward on the full state.  The probe register
    defaults to the uniform superposition, which keeps the readout weight
    positive so the entire orbit, through readout and annihilation, gets
    walked for any chain.
    """
    violations: list[str] = []
    register = None if bits is not None else _uniform_register(len(chain.register_cells))
    try:
        orbit = trace_orbits(chain, bits, register)
    except EngineError as exc:
        return WellFormedReport(False, 0, 0.0, (str(exc),))

    states = orbit.yes_branch.states if orbit.yes_branch.states else orbit.no_branch.states
    for state in states:
        if len(control_cells(state.program)) != 1:
            violations.append(f"t={state.t}: control symbol count != 1")
        fwd = forward_matches(state.program, state.data)
        if len(fwd) != 1:
            found = ", ".join(f"{r.rule_id}@{j}" for r, j in fwd) or "none"
            violations.append(f"t={state.t}: forward matches: {found}")
        bwd = backward_matches(state.program, state.data)
        if len(bwd) != 1:
            found = ", ".join(f"{r.rule_id}@{j}" for r, j in bwd) or "none"
            violations.append(f"t={state.t}: backward matches: {found}")
        if abs(state.register_norm() - 1.0) > 1e-12:
            violations.append(f"t={state.t}: register norm {state.register_norm()}")

    for current, successor in zip(states, states[1:]):
        result = step_forward(current)
        if isinstance(result, Split):
            if abs(result.p - 1.0) > 1e-12:
                violations.append(f"t={current.t}: readout leaks weight {1.0 - result.p}")
            advanced = result.yes
        elif isinstance(result, Next):
            advanced = result.state
        else:
            violations.append(f"t={current.t}: unexpected annihilation")
            break
        if advanced is None or not advanced.same_configuration(successor):
            violations.append(f"t={current.t}: forward step disagrees with orbit")
            continue
        if not np.allclose(advanced.register, successor.register, atol=1e-12, rtol=0.0):
            violations.append(f"t={current.t}: forward register mismatch")
        back = step_backward(successor)
        if not isinstance(back, Prev) or not back.state.same_configuration(current):
            violations.append(f"t={successor.t}: backward step disagrees with orbit")
            continue
        if not np.allclose(back.state.register, current.register, atol=1e-12, rtol=0.0):
            violations.append(f"t={successor.t}: backward register mismatch")

    if states:
        # A weight-zero readout is a valid terminator: it is how the kept
        # branch vanishes when the circuit never accepts.
        final = step_forward(states[-1])
        terminated = isinstance(final, Annihilated) or (
            isinstance(final, Split) and final.p <= 1e-12
        )
        if not terminated:
            violations.append("final orbit state not annihilated by the next step")
        if not isinstance(step_backward(states[0]), Annihilated):
            violations.append("initial state survives a backward step")

    return WellFormedReport(not violations, len(states), orbit.p, tuple(violations))
