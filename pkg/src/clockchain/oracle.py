"""Dense cross-check of the closed-form spectral measure.

The chain Hilbert space is spanned by classical configurations: both bands
written out with explicit 0/1 register bits.  Starting from the initial
configuration of a compiled chain, the reachable set under the local rules
(run both directions) is tiny, and the forward operator restricted to it is
an exact block of the full chain operator because the set is closed both
ways.  Diagonalizing the restriction gives the spectral measure of the
chain Hamiltonian at the initial state with no appeal to the line-graph
picture, which is what makes it a useful referee for `predicted_measure`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuits import PAIR_GATES, acceptance_probability
from .engine import forward_matches, backward_matches
from .spectral import AtomicMeasure, predicted_measure, tv_distance
from .symbols import register_slot

MAX_CONFIGS = 20_000

_BITS = ("0", "1")


class OracleError(Exception):
    pass


Config = tuple[tuple[str, ...], tuple[str, ...]]


def _splice(band: tuple[str, ...], j: int, pair) -> tuple[str, ...]:
    return band[:j] + tuple(pair) + band[j + 2 :]


def _pair_images(gate: str, left: str, right: str):
    column = PAIR_GATES[gate][:, 2 * int(left) + int(right)]
    out = []
    for row, amp in enumerate(column):
        if amp != 0:
            out.append(((_BITS[row >> 1], _BITS[row & 1]), complex(amp).real))
    return out


def _unique(matches, what: str):
    if len(matches) != 1:
        raise OracleError(f"{what}: {len(matches)} rule matches on a reachable config")
    return matches[0]


def forward_images(config: Config) -> list[tuple[Config, float]]:
    """Images of a basis configuration under the forward operator."""
    program, data = config
    rule, j = _unique(forward_matches(program, data), "forward")
    prog2 = _splice(program, j, rule.rhs)
    if rule.rule_id == "1b":
        gate = rule.lhs[1]
        left, right = data[j], data[j + 1]
        if gate in PAIR_GATES and left in _BITS and right in _BITS:
            out = []
            for (a, b), amp in _pair_images(gate, left, right):
                out.append(((prog2, _splice(data, j, (a, b))), amp))
            return out
        if gate == "R" and right in _BITS:
            return [((prog2, data), 1.0)] if right == "1" else []
        if gate == "A" and right in _BITS:
            return []
    return [((prog2, data), 1.0)]


def backward_supports(config: Config) -> list[Config]:
    """Configurations with a forward edge into this one (amplitudes unused)."""
    program, data = config
    rule, j = _unique(backward_matches(program, data), "backward")
    prog2 = _splice(program, j, rule.lhs)
    if rule.rule_id == "1b":
        gate = rule.lhs[1]
        left, right = data[j], data[j + 1]
        if gate in PAIR_GATES and left in _BITS and right in _BITS:
            column = PAIR_GATES[gate][2 * int(left) + int(right), :]
            out = []
            for col, amp in enumerate(column):
                if amp != 0:
                    pre = _splice(data, j, (_BITS[col >> 1], _BITS[col & 1]))
                    out.append((prog2, pre))
            return out
        if gate == "R" and right in _BITS:
            return [(prog2, data)] if right == "1" else []
        if gate == "A" and right in _BITS:
            return []
    return [(prog2, data)]


def initial_config(chain, bits: str) -> Config:
    if len(bits) != chain.circuit.n or set(bits) - set(_BITS):
        raise OracleError(f"bad input bits {bits!r}")
    full = bits + "0" * chain.circuit.a
    data = list(chain.data)
    for qubit, bit in enumerate(full):
        cell = chain.f0 + 1 + qubit
        assert data[cell] == register_slot(qubit)
        data[cell] = bit
    return tuple(chain.program), tuple(data)


@dataclass(frozen=True, eq=False)
class RestrictedOperator:
    configs: list[Config]
    forward: np.ndarray
    init_index: int

    @property
    def dim(self) -> int:
        return len(self.configs)

    @property
    def hamiltonian(self) -> np.ndarray:
        return self.forward + self.forward.T


def build_restricted(chain, bits: str) -> RestrictedOperator:
    """Reachable-set restriction of the forward operator, as a dense matrix."""
    start = initial_config(chain, bits)
    index: dict[Config, int] = {start: 0}
    configs = [start]
    frontier = [start]
    edges: list[tuple[int, int, float]] = []
    while frontier:
        config = frontier.pop()
        source = index[config]
        for image, amp in forward_images(config):
            if image not in index:
                if len(configs) >= MAX_CONFIGS:
                    raise OracleError(f"reachable set exceeds {MAX_CONFIGS} configs")
                index[image] = len(configs)
                configs.append(image)
                frontier.append(image)
            edges.append((index[image], source, amp))
        for pre in backward_supports(config):
            if pre not in index:
                if len(configs) >= MAX_CONFIGS:
                    raise OracleError(f"reachable set exceeds {MAX_CONFIGS} configs")
                index[pre] = len(configs)
                configs.append(pre)
                frontier.append(pre)
    forward = np.zeros((len(configs), len(configs)))
    for row, col, amp in edges:
        forward[row, col] += amp
    return RestrictedOperator(configs, forward, 0)


def induced_measure(operator: RestrictedOperator) -> AtomicMeasure:
    """Spectral measure of the restricted Hamiltonian at the initial config."""
    eigenvalues, vectors = np.linalg.eigh(operator.hamiltonian)
    weights = vectors[operator.init_index, :] ** 2
    return AtomicMeasure.from_atoms(eigenvalues, weights, merge_tol=1e-9, floor=1e-14)


@dataclass(frozen=True)
class MeasureCheck:
    dim: int
    p: float
    tv: float
    predicted_atoms: int
    oracle_atoms: int

    def ok(self, tv_tol: float = 1e-6) -> bool:
        return self.tv <= tv_tol


def verify_predicted_measure(chain, bits: str, atom_tol: float = 1e-7) -> MeasureCheck:
    """Compare the closed-form measure against the dense diagonalization.

    The closed form says the measure at the initial state is a p-weighted
    mixture of the two line-graph endpoint measures, with p the circuit's
    acceptance probability on these input bits.  Returns the total variation
    distance between that mixture and the measure of the dense restriction.
    """
    operator = build_restricted(chain, bits)
    oracle = induced_measure(operator)
    p = acceptance_probability(chain.circuit, bits)
    predicted = predicted_measure(chain.r_tilde, chain.s_tilde, p)
    merged = AtomicMeasure.from_atoms(
        predicted.eigenvalues, predicted.weights, merge_tol=atom_tol, floor=0.0
    )
    tv = tv_distance(merged, oracle, atom_tol=atom_tol)
    return MeasureCheck(operator.dim, p, tv, len(predicted.eigenvalues), len(oracle.eigenvalues))
