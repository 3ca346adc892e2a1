import math
import random

import numpy as np
import pytest

from clockchain.spectral import (
    AtomicMeasure,
    SpectralError,
    decision_partition,
    exact_min_gap,
    line_graph_spectrum,
    predicted_measure,
    spectral_gap,
    tv_distance,
)


def _dense_path_endpoint(n: int):
    adjacency = np.zeros((n, n))
    for i in range(n - 1):
        adjacency[i, i + 1] = adjacency[i + 1, i] = 1.0
    eigenvalues, vectors = np.linalg.eigh(adjacency)
    return eigenvalues, vectors[0, :] ** 2


def test_single_vertex_path():
    lam, w = line_graph_spectrum(1)
    assert abs(lam[0]) < 1e-15
    assert w.tolist() == [1.0]


def test_two_vertex_path_by_hand():
    lam, w = line_graph_spectrum(2)
    assert np.allclose(lam, [-1.0, 1.0], atol=1e-15)
    assert np.allclose(w, [0.5, 0.5], atol=1e-15)


def test_three_vertex_path_by_hand():
    lam, w = line_graph_spectrum(3)
    root2 = math.sqrt(2.0)
    assert np.allclose(lam, [-root2, 0.0, root2], atol=1e-15)
    assert np.allclose(w, [0.25, 0.5, 0.25], atol=1e-15)


def test_spectrum_sorted_and_normalized():
    for n in (1, 2, 7, 40, 173):
        lam, w = line_graph_spectrum(n)
        assert np.all(np.diff(lam) > 0)
        assert abs(w.sum() - 1.0) < 1e-12
        assert np.all(np.abs(lam) < 2.0)


def test_matches_dense_diagonalization_spot():
    for n in (2, 3, 10, 37, 64):
        lam, w = line_graph_spectrum(n)
        lam_dense, w_dense = _dense_path_endpoint(n)
        assert np.abs(lam - lam_dense).max() < 1e-12
        assert np.abs(w - w_dense).max() < 1e-12


def test_shared_eigenvalues_bit_identical():
    # nested divisors: every eigenvalue of the shorter path reappears
    # exactly when q divides q'
    lam_small, _ = line_graph_spectrum(4)     # q = 5
    lam_big, _ = line_graph_spectrum(14)      # q' = 15
    shared = set(lam_small.tolist()) & set(lam_big.tolist())
    assert len(shared) == 4


def test_predicted_measure_mixture():
    measure = predicted_measure(2, 3, 0.25)
    assert abs(measure.total - 1.0) < 1e-12
    lam_no, w_no = line_graph_spectrum(3)
    lam_yes, w_yes = line_graph_spectrum(4)
    # q=4, q'=5 coprime: no overlap, so atom count is the sum
    assert len(measure.eigenvalues) == 7
    by_value = dict(zip(measure.eigenvalues.tolist(), measure.weights.tolist()))
    for lam, w in zip(lam_no, w_no):
        assert by_value[float(lam)] == pytest.approx(0.75 * w, abs=1e-15)
    for lam, w in zip(lam_yes, w_yes):
        assert by_value[float(lam)] == pytest.approx(0.25 * w, abs=1e-15)


def test_predicted_measure_merges_shared_atoms():
    # q=4 and q'=8 share eigenvalues at ratios 1/4, 2/4, 3/4
    measure = predicted_measure(2, 6, 0.5)
    assert len(measure.eigenvalues) == 3 + 7 - 3
    assert abs(measure.total - 1.0) < 1e-12


def test_predicted_measure_degenerate_weights():
    assert len(predicted_measure(2, 3, 0.0).eigenvalues) == 3
    assert len(predicted_measure(2, 3, 1.0).eigenvalues) == 4
    with pytest.raises(SpectralError):
        predicted_measure(2, 3, 1.5)


def test_gap_formula_value():
    assert spectral_gap(1, 2) == pytest.approx(math.pi**2 / (2 * 9 * 16), rel=1e-15)


def test_gap_requires_coprime():
    with pytest.raises(SpectralError):
        spectral_gap(2, 6)


def test_gap_bound_spot_sample():
    rng = random.Random(88)
    checked = 0
    while checked < 60:
        r, s = rng.randrange(0, 80), rng.randrange(0, 80)
        if math.gcd(r + 2, s + 2) != 1:
            continue
        assert exact_min_gap(r, s) >= spectral_gap(r, s)
        checked += 1


def test_decision_regions_classify():
    regions = decision_partition(1, 2)
    lam_yes, _ = line_graph_spectrum(3)
    lam_no, _ = line_graph_spectrum(2)
    delta = regions.delta
    for lam in lam_yes:
        assert regions.classify(lam) == "YES"
        assert regions.classify(lam + delta) == "YES"     # boundary included
        assert regions.classify(lam + 1.01 * delta) == "NO"
    for lam in lam_no:
        assert regions.classify(lam) == "NO"
        assert regions.classify(lam + delta) == "NO"


def test_classify_many_matches_scalar():
    regions = decision_partition(3, 4)
    rng = np.random.default_rng(17)
    values = rng.uniform(-2.2, 2.2, 500)
    many = regions.classify_many(values)
    for value, flag in zip(values, many):
        assert (regions.classify(float(value)) == "YES") == bool(flag)


def test_regions_disjoint_sorted():
    regions = decision_partition(11, 14)
    starts = np.array([a for a, _ in regions.intervals])
    ends = np.array([b for _, b in regions.intervals])
    assert np.all(starts[1:] > ends[:-1])
    assert np.all(ends >= starts)


def test_yes_mass_splits_by_branch():
    r, s, p = 3, 4, 0.3
    regions = decision_partition(r, s)
    measure = predicted_measure(r, s, p)
    assert regions.yes_mass(measure) == pytest.approx(p, abs=1e-12)


def test_tv_distance_properties():
    lam, w = line_graph_spectrum(6)
    a = AtomicMeasure(lam, w)
    assert tv_distance(a, a) == 0.0
    b = AtomicMeasure(lam + 1e-9, w)          # inside the bucket tolerance
    assert tv_distance(a, b) < 1e-15
    c = AtomicMeasure(lam + 1.0, w)
    assert tv_distance(a, c) == pytest.approx(1.0, abs=1e-12)


def test_from_atoms_merge_and_floor():
    measure = AtomicMeasure.from_atoms(
        [0.0, 0.0, 1.0, 2.0], [0.25, 0.25, 0.5, 0.0], merge_tol=0.0, floor=0.0
    )
    assert measure.eigenvalues.tolist() == [0.0, 1.0]
    assert measure.weights.tolist() == [0.5, 0.5]
