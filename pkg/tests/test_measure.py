import numpy as np
import pytest

from clockchain.measure import (
    MeasurementError,
    MeasurementModel,
    compliance_report,
    decide,
    decision_statistics,
    dyadic_intervals,
)
from clockchain.spectral import decision_partition, predicted_measure


@pytest.fixture(scope="module")
def coin_setup():
    # p = 1/2 mixture on a small coprime clock pair
    r, s = 3, 4
    return (
        predicted_measure(r, s, 0.5),
        decision_partition(r, s),
    )


def test_model_validation():
    with pytest.raises(MeasurementError):
        MeasurementModel(delta=-1e-3, epsilon=0.0)
    with pytest.raises(MeasurementError):
        MeasurementModel(delta=0.0, epsilon=1.5)


def test_sampling_is_reproducible(coin_setup):
    measure, _ = coin_setup
    model = MeasurementModel(delta=1e-3, epsilon=0.1, seed=42)
    assert np.array_equal(model.sample_many(measure, 64), model.sample_many(measure, 64))


def test_samples_stay_near_atoms_when_clean(coin_setup):
    measure, _ = coin_setup
    model = MeasurementModel(delta=1e-3, epsilon=0.0, seed=1)
    values = model.sample_many(measure, 2000)
    distances = np.abs(values[:, None] - measure.eigenvalues[None, :]).min(axis=1)
    assert distances.max() <= 1e-3


def test_outliers_use_fallback_constant(coin_setup):
    measure, _ = coin_setup
    model = MeasurementModel(delta=1e-3, epsilon=1.0, seed=1, fallback_value=1.75)
    values = model.sample_many(measure, 50)
    assert np.all(values == 1.75)


def test_decide_refuses_coarse_device(coin_setup):
    measure, regions = coin_setup
    with pytest.raises(MeasurementError):
        decide(measure, regions, MeasurementModel(delta=regions.gap, epsilon=0.0))


def test_decide_accepts_exact_third(coin_setup):
    measure, regions = coin_setup
    outcome = decide(measure, regions, MeasurementModel(delta=regions.gap / 3.0, epsilon=0.0))
    assert outcome.decision in ("YES", "NO")


def test_decide_deterministic_measures():
    r, s = 3, 4
    regions = decision_partition(r, s)
    model = MeasurementModel(delta=regions.gap / 3.0, epsilon=0.0, seed=9)
    for p, expected in ((0.0, "NO"), (1.0, "YES")):
        measure = predicted_measure(r, s, p)
        for seed in range(20):
            model = MeasurementModel(delta=regions.gap / 3.0, epsilon=0.0, seed=seed)
            assert decide(measure, regions, model).decision == expected


def test_statistics_match_expectation(coin_setup):
    measure, regions = coin_setup
    model = MeasurementModel(delta=regions.delta, epsilon=0.1, seed=5)
    stats = decision_statistics(measure, regions, model, 20_000)
    assert abs(stats.z_score) < 4.0
    assert stats.expected_rate == pytest.approx(0.45, abs=0.01)


def test_statistics_with_adversarial_fallback(coin_setup):
    measure, regions = coin_setup
    # pin the outlier value inside a YES interval: the expected rate
    # picks up the full epsilon
    yes_atom = float(predicted_measure(3, 4, 1.0).eigenvalues[0])
    model = MeasurementModel(delta=regions.delta, epsilon=0.2, seed=6, fallback_value=yes_atom)
    stats = decision_statistics(measure, regions, model, 20_000)
    assert stats.expected_rate == pytest.approx(0.8 * 0.5 + 0.2, abs=1e-12)
    assert abs(stats.z_score) < 4.0


def test_dyadic_grid():
    intervals = dyadic_intervals(2)
    assert (-2.0, 2.0) in intervals
    assert len(intervals) == 10
    assert all(a < b for a, b in intervals)


def test_compliance_accepts_honest_device(coin_setup):
    measure, regions = coin_setup
    model = MeasurementModel(delta=regions.delta, epsilon=0.05, seed=3)
    report = compliance_report(measure, model, 40_000)
    assert report.ok, report.worst_margin


def test_compliance_flags_broken_device(coin_setup):
    measure, _ = coin_setup
    # the device claims epsilon = 0 but its outcomes sit at 2.0, far from
    # every atom of the coin measure
    claimed = MeasurementModel(delta=1e-6, epsilon=0.0, seed=3)
    stuck = np.full(40_000, 2.0)
    report = compliance_report(measure, claimed, 40_000, values=stuck)
    assert not report.ok
    assert report.worst_margin < -0.1
