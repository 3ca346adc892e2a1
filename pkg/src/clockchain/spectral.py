"""Spectral side of the decision procedure.

The two branch orbits of a compiled chain behave like walks on line graphs
with r_tilde + 1 and s_tilde + 1 vertices, so the spectral measure of the
chain Hamiltonian at the initial configuration is an explicit mixture of the
two endpoint measures of those graphs.  Everything here is closed-form; the
dense-matrix cross-check lives in the oracle module.

Eigenvalue floats are computed as 2*cos(pi*(k/q)) with the rational k/q
divided first: equal rationals then give bit-identical doubles, so an
eigenvalue shared between the two branch spectra (possible only when the
clock pair is not coprime) merges exactly instead of leaving two atoms a
rounding error apart.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np


class SpectralError(Exception):
    pass


def line_graph_spectrum(num_vertices: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and endpoint weights of the path on `num_vertices` vertices.

    The adjacency matrix of the path with q - 1 vertices (q = num_vertices + 1)
    has simple spectrum 2*cos(pi*k/q), k = 1..q-1, and the spectral measure
    at either endpoint puts weight (2/q)*sin^2(pi*k/q) on the k-th eigenvalue.
    Returned in increasing eigenvalue order.
    """
    if num_vertices < 1:
        raise SpectralError("a path needs at least one vertex")
    q = num_vertices + 1
    ratios = np.arange(q - 1, 0, -1) / q
    eigenvalues = 2.0 * np.cos(np.pi * ratios)
    weights = (2.0 / q) * np.sin(np.pi * ratios) ** 2
    return eigenvalues, weights


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite positive measure supported on sorted distinct atoms."""

    eigenvalues: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_atoms(cls, eigenvalues, weights, merge_tol: float = 0.0, floor: float = 0.0):
        """Sort atoms, merge any closer than merge_tol, drop weight <= floor."""
        lam = np.asarray(eigenvalues, dtype=float)
        w = np.asarray(weights, dtype=float)
        order = np.argsort(lam)
        lam, w = lam[order], w[order]
        out_lam: list[float] = []
        out_w: list[float] = []
        for x, wx in zip(lam, w):
            if out_lam and x - out_lam[-1] <= merge_tol:
                out_w[-1] += wx
            else:
                out_lam.append(float(x))
                out_w.append(float(wx))
        lam = np.array(out_lam)
        w = np.array(out_w)
        keep = w > floor
        return cls(lam[keep], w[keep])

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def mass_where(self, mask: np.ndarray) -> float:
        return float(self.weights[mask].sum())


def tv_distance(a: AtomicMeasure, b: AtomicMeasure, atom_tol: float = 1e-7) -> float:
    """Total variation distance, bucketing atoms closer than atom_tol.

    Atoms of the two measures within atom_tol of each other count as the
    same point; the bucketing is applied to the union, so each measure must
    already have its own atoms separated by more than atom_tol.
    """
    lam = np.concatenate([a.eigenvalues, b.eigenvalues])
    src = np.concatenate([np.zeros(len(a.eigenvalues)), np.ones(len(b.eigenvalues))])
    w = np.concatenate([a.weights, b.weights])
    order = np.argsort(lam, kind="stable")
    lam, src, w = lam[order], src[order], w[order]
    total = 0.0
    i = 0
    while i < len(lam):
        j = i + 1
        while j < len(lam) and lam[j] - lam[j - 1] <= atom_tol:
            j += 1
        bucket_a = w[i:j][src[i:j] == 0].sum()
        bucket_b = w[i:j][src[i:j] == 1].sum()
        total += abs(bucket_a - bucket_b)
        i = j
    return 0.5 * float(total)


def predicted_measure(r_tilde: int, s_tilde: int, p: float) -> AtomicMeasure:
    """Spectral measure of the chain Hamiltonian at the initial state.

    A (1 - p) multiple of the endpoint measure of the path on r_tilde + 1
    vertices plus a p multiple of the one on s_tilde + 1 vertices.  Exactly
    shared eigenvalues merge; a branch with zero weight contributes nothing.
    """
    if not 0.0 <= p <= 1.0 + 1e-12:
        raise SpectralError(f"branch weight {p} outside [0, 1]")
    p = min(p, 1.0)
    parts: list[tuple[np.ndarray, np.ndarray]] = []
    if p < 1.0:
        lam, w = line_graph_spectrum(r_tilde + 1)
        parts.append((lam, (1.0 - p) * w))
    if p > 0.0:
        lam, w = line_graph_spectrum(s_tilde + 1)
        parts.append((lam, p * w))
    eigenvalues = np.concatenate([x for x, _ in parts])
    weights = np.concatenate([y for _, y in parts])
    return AtomicMeasure.from_atoms(eigenvalues, weights, merge_tol=0.0, floor=0.0)


def spectral_gap(r_tilde: int, s_tilde: int) -> float:
    """Guaranteed separation between the two branch spectra.

    Valid only when q = r_tilde + 2 and q' = s_tilde + 2 are coprime; the
    spectra are then disjoint and every cross pair of eigenvalues is at
    least pi^2 / (2 q^2 q'^2) apart.
    """
    q, qp = r_tilde + 2, s_tilde + 2
    if math.gcd(q, qp) != 1:
        raise SpectralError(f"clock pair ({q}, {qp}) is not coprime")
    return math.pi**2 / (2.0 * q * q * qp * qp)


def exact_min_gap(r_tilde: int, s_tilde: int) -> float:
    """Smallest distance between the two branch spectra, by enumeration."""
    no_lam, _ = line_graph_spectrum(r_tilde + 1)
    yes_lam, _ = line_graph_spectrum(s_tilde + 1)
    return float(np.abs(no_lam[:, None] - yes_lam[None, :]).min())


@dataclass(frozen=True, eq=False)
class DecisionRegions:
    """Closed YES intervals around the accepting spectrum; the rest is NO.

    Interval boundaries count as YES.  `classify` takes a scalar; use
    `classify_many` for arrays.
    """

    starts: np.ndarray
    ends: np.ndarray
    delta: float
    gap: float

    @property
    def intervals(self) -> tuple[tuple[float, float], ...]:
        return tuple(zip(self.starts.tolist(), self.ends.tolist()))

    def classify(self, value: float) -> str:
        idx = bisect_right(self.starts, value) - 1
        if idx >= 0 and value <= self.ends[idx]:
            return "YES"
        return "NO"

    def classify_many(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        idx = np.searchsorted(self.starts, values, side="right") - 1
        inside = idx >= 0
        inside[inside] &= values[inside] <= self.ends[idx[inside]]
        return inside

    def yes_mass(self, measure: AtomicMeasure) -> float:
        return measure.mass_where(self.classify_many(measure.eigenvalues))


def decision_partition(r_tilde: int, s_tilde: int, delta: float | None = None) -> DecisionRegions:
    """Build the YES/NO split of the energy axis for a coprime clock pair.

    The default margin is a third of the guaranteed gap: wide enough that a
    sample within delta of an accepting eigenvalue stays inside, narrow
    enough that no rejecting eigenvalue can reach a YES interval even after
    another delta of measurement noise.
    """
    gap = spectral_gap(r_tilde, s_tilde)
    if delta is None:
        delta = gap / 3.0
    if not 0.0 < delta:
        raise SpectralError(f"margin {delta} must be positive")
    yes_lam, _ = line_graph_spectrum(s_tilde + 1)
    starts: list[float] = []
    ends: list[float] = []
    for lam in yes_lam:
        lo, hi = lam - delta, lam + delta
        if starts and lo <= ends[-1]:
            ends[-1] = max(ends[-1], hi)
        else:
            starts.append(lo)
            ends.append(hi)
    return DecisionRegions(np.array(starts), np.array(ends), float(delta), gap)
