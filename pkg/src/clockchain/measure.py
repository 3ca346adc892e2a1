"""Simulated energy measurement and the decision it supports.

A measurement device is modeled by a resolution delta and an outlier rate
epsilon: with probability 1 - epsilon it reports some true eigenvalue of
the measure, displaced by at most delta; with probability epsilon it
reports garbage.  Garbage defaults to a uniform draw over the full energy
window [-2 - delta, 2 + delta] but can be pinned to a constant to make a
worst-case adversary.

Deciding a chain takes one sample and asks which side of the YES/NO
partition it lands on.  The partition's guarantee needs the device
resolution to be at most a third of the spectral gap: a true accepting
eigenvalue then cannot jitter out of its interval, and a rejecting one
cannot jitter in.  `decide` refuses a device that is too coarse rather
than returning an unreliable answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .spectral import AtomicMeasure, DecisionRegions


class MeasurementError(Exception):
    pass


@dataclass(frozen=True)
class MeasurementModel:
    delta: float
    epsilon: float
    seed: int = 0
    fallback_value: Optional[float] = None

    def __post_init__(self):
        if self.delta < 0:
            raise MeasurementError("resolution must be nonnegative")
        if not 0.0 <= self.epsilon <= 1.0:
            raise MeasurementError("outlier rate must be in [0, 1]")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def sample_many(self, measure: AtomicMeasure, count: int, rng=None) -> np.ndarray:
        """Draw `count` measurement outcomes.

        The generator is consumed in a fixed order regardless of outcomes:
        outlier flags, then atom indices, then displacement uniforms, then
        (only when no fallback constant is set) outlier uniforms.  Repeat
        calls with a fresh seeded generator therefore reproduce bytes.
        """
        if rng is None:
            rng = self.rng()
        weights = measure.weights / measure.total
        flags = rng.random(count) < self.epsilon
        idx = rng.choice(len(weights), size=count, p=weights)
        jitter = rng.uniform(-self.delta, self.delta, count)
        values = measure.eigenvalues[idx] + jitter
        if self.fallback_value is not None:
            values[flags] = self.fallback_value
        else:
            lo, hi = -2.0 - self.delta, 2.0 + self.delta
            values[flags] = rng.uniform(lo, hi, count)[flags]
        return values

    def sample(self, measure: AtomicMeasure, rng=None) -> float:
        return float(self.sample_many(measure, 1, rng)[0])


@dataclass(frozen=True)
class DecisionOutcome:
    decision: str
    energy: float


def decide(measure: AtomicMeasure, regions: DecisionRegions, model: MeasurementModel) -> DecisionOutcome:
    """One energy measurement, classified.  Refuses a too-coarse device."""
    limit = regions.gap / 3.0
    if model.delta > limit * (1.0 + 1e-12):
        raise MeasurementError(
            f"device resolution {model.delta} exceeds a third of the gap ({limit})"
        )
    energy = model.sample(measure)
    return DecisionOutcome(regions.classify(energy), energy)


def _fallback_yes_probability(regions: DecisionRegions, model: MeasurementModel) -> float:
    if model.fallback_value is not None:
        return 1.0 if regions.classify(model.fallback_value) == "YES" else 0.0
    lo, hi = -2.0 - model.delta, 2.0 + model.delta
    covered = 0.0
    for start, end in regions.intervals:
        covered += max(0.0, min(end, hi) - max(start, lo))
    return covered / (hi - lo)


@dataclass(frozen=True)
class DecisionStats:
    runs: int
    yes_count: int
    expected_rate: float
    sigma: float

    @property
    def observed_rate(self) -> float:
        return self.yes_count / self.runs

    @property
    def z_score(self) -> float:
        if self.sigma == 0.0:
            return 0.0 if self.observed_rate == self.expected_rate else float("inf")
        return (self.observed_rate - self.expected_rate) / self.sigma


def decision_statistics(
    measure: AtomicMeasure,
    regions: DecisionRegions,
    model: MeasurementModel,
    runs: int,
) -> DecisionStats:
    """Monte Carlo YES rate against its exact expectation.

    With the resolution within the partition's margin, a non-outlier draw
    lands YES exactly when its atom belongs to a YES interval, so the
    expected rate is (1 - eps) * (atom mass inside YES) plus the outlier
    contribution.  sigma is the binomial standard deviation at that rate.
    """
    values = model.sample_many(measure, runs)
    yes_count = int(regions.classify_many(values).sum())
    atom_yes = regions.yes_mass(measure) / measure.total
    expected = (1.0 - model.epsilon) * atom_yes
    expected += model.epsilon * _fallback_yes_probability(regions, model)
    sigma = float(np.sqrt(max(expected * (1.0 - expected), 1e-12) / runs))
    return DecisionStats(runs, yes_count, expected, sigma)


# ---------------------------------------------------------------------------
# Device-contract compliance


@dataclass(frozen=True)
class IntervalCheck:
    lo: float
    hi: float
    empirical: float
    required: float

    @property
    def ok(self) -> bool:
        return self.empirical >= self.required


@dataclass(frozen=True)
class ComplianceReport:
    samples: int
    checks: tuple[IntervalCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def worst_margin(self) -> float:
        return min(c.empirical - c.required for c in self.checks)


def dyadic_intervals(levels: int = 3) -> list[tuple[float, float]]:
    """All intervals with endpoints on the dyadic grid of [-2, 2]."""
    points = [-2.0 + 4.0 * j / (1 << levels) for j in range((1 << levels) + 1)]
    return [(a, b) for i, a in enumerate(points) for b in points[i + 1 :]]


def compliance_report(
    measure: AtomicMeasure,
    model: MeasurementModel,
    samples: int,
    intervals: Optional[list[tuple[float, float]]] = None,
    z: float = 5.0,
    values: Optional[np.ndarray] = None,
) -> ComplianceReport:
    """Check a device keeps its promise on every test interval.

    The contract: for any [a, b], a sample lands in [a - delta, b + delta]
    with probability at least (1 - eps) times the measure of [a, b].  The
    empirical rate is allowed a z * 0.5 / sqrt(N) slack, the worst-case
    binomial deviation, so a compliant device fails a check with
    probability well under 2^-z^2/2 per interval.

    By default the samples come from the model itself; pass `values` to
    referee an outcome stream from elsewhere against the model's claimed
    delta and epsilon.
    """
    if intervals is None:
        intervals = dyadic_intervals()
    if values is None:
        values = model.sample_many(measure, samples)
    else:
        values = np.asarray(values, dtype=float)
        samples = len(values)
    slack = z * 0.5 / np.sqrt(samples)
    total = measure.total
    checks = []
    for lo, hi in intervals:
        mask = (measure.eigenvalues >= lo) & (measure.eigenvalues <= hi)
        mass = measure.mass_where(mask) / total
        hits = np.count_nonzero((values >= lo - model.delta) & (values <= hi + model.delta))
        checks.append(
            IntervalCheck(lo, hi, hits / samples, (1.0 - model.epsilon) * mass - slack)
        )
    return ComplianceReport(samples, tuple(checks))
