"""Problem construction: random matrices, sparse signals, noise injection."""

import json
import math

import numpy as np
import pytest

from sparserec import linalg, sensing
from sparserec.sensing import Normalization, VarianceMode


def measured_snr_db(clean, noise):
    return 20.0 * math.log10(np.linalg.norm(clean) / np.linalg.norm(noise))


# ---------------------------------------------------------------- determinism

def test_gaussian_matrix_same_seed_same_bytes():
    a = sensing.gaussian_matrix(8, 13, VarianceMode.ONE_OVER_M, seed=42)
    b = sensing.gaussian_matrix(8, 13, VarianceMode.ONE_OVER_M, seed=42)
    assert a.tobytes() == b.tobytes()


def test_gaussian_matrix_different_seeds_differ():
    a = sensing.gaussian_matrix(8, 13, VarianceMode.ONE_OVER_M, seed=1)
    b = sensing.gaussian_matrix(8, 13, VarianceMode.ONE_OVER_M, seed=2)
    assert not np.array_equal(a, b)


def test_streams_are_lane_separated():
    # matrix, signal, and noise draws with one seed must not reuse a stream
    A = sensing.gaussian_matrix(4, 6, VarianceMode.UNIT, seed=9)
    x = sensing.random_sparse_signal(6, 2, seed=9)
    assert not np.array_equal(A[0, :6], np.ravel(x)[:6])


def test_problem_determinism_byte_for_byte():
    p = sensing.build_problem(16, 32, 4, seed=7, snr_db=20.0)
    q = sensing.build_problem(16, 32, 4, seed=7, snr_db=20.0)
    assert p.matrix.tobytes() == q.matrix.tobytes()
    assert p.measurements.tobytes() == q.measurements.tobytes()
    assert p.ground_truth.tobytes() == q.ground_truth.tobytes()
    assert p.noise.tobytes() == q.noise.tobytes()


# ---------------------------------------------------------------- moments

def test_gaussian_entry_moments():
    m, d, reps = 32, 64, 10
    entries = np.concatenate([
        sensing.gaussian_matrix(m, d, VarianceMode.ONE_OVER_M, seed=100 + k).ravel()
        for k in range(reps)
    ])
    n = entries.size  # 20480 samples
    mean = entries.mean()
    sem = entries.std(ddof=1) / math.sqrt(n)
    assert abs(mean) <= 3.0 * sem
    assert entries.var() == pytest.approx(1.0 / m, rel=0.02)


def test_column_fourth_moment():
    # E ||A_i||^4 = 1 + 2/m for N(0, 1/m) entries
    m, d, reps = 32, 64, 300
    acc = []
    for k in range(reps):
        A = sensing.gaussian_matrix(m, d, VarianceMode.ONE_OVER_M, seed=2000 + k)
        acc.append(np.sum(A * A, axis=0) ** 2)
    fourth = float(np.mean(np.concatenate(acc)))
    assert fourth == pytest.approx(1.0 + 2.0 / m, rel=0.02)


def test_unit_variance_mode():
    A = sensing.gaussian_matrix(64, 64, VarianceMode.UNIT, seed=3)
    assert A.var() == pytest.approx(1.0, rel=0.1)


# ---------------------------------------------------------------- normalization

def test_normalize_operator_norm():
    A = sensing.gaussian_matrix(12, 24, VarianceMode.ONE_OVER_M, seed=11)
    B = sensing.normalize_operator_norm(A)
    assert linalg.operator_norm(B) == pytest.approx(1.0, abs=1e-6)


def test_normalize_rejects_zero_matrix():
    with pytest.raises(ValueError):
        sensing.normalize_operator_norm(np.zeros((3, 3)))


def test_random_coisometry_rows_orthonormal():
    A = sensing.random_coisometry(7, 8, seed=5)
    assert np.allclose(A @ A.T, np.eye(7), atol=1e-12)
    assert linalg.operator_norm(A) == pytest.approx(1.0, abs=1e-9)


def test_random_coisometry_determinism():
    a = sensing.random_coisometry(5, 9, seed=1)
    b = sensing.random_coisometry(5, 9, seed=1)
    assert a.tobytes() == b.tobytes()


def test_random_coisometry_requires_wide_shape():
    with pytest.raises(ValueError):
        sensing.random_coisometry(9, 5, seed=0)


# ---------------------------------------------------------------- signals

def test_sparse_signal_exact_support_size():
    for seed in range(40):
        x = sensing.random_sparse_signal(30, 7, seed=seed)
        assert np.count_nonzero(x) == 7


def test_sparse_signal_support_spreads():
    hits = np.zeros(12)
    for seed in range(300):
        hits += sensing.random_sparse_signal(12, 3, seed=seed) != 0
    assert hits.min() > 0  # every coordinate selected at least once


def test_sparse_signal_bad_sparsity():
    with pytest.raises(ValueError):
        sensing.random_sparse_signal(5, 6, seed=0)
    with pytest.raises(ValueError):
        sensing.random_sparse_signal(5, -1, seed=0)


# ---------------------------------------------------------------- noise

def test_snr_roundtrip_tight():
    g = np.random.Generator(np.random.Philox(key=[77, 0]))
    for snr in (0.0, 10.0, 25.0, 30.0, 60.0):
        clean = g.standard_normal(64)
        noisy, noise = sensing.add_noise(clean, snr, seed=5)
        assert np.array_equal(noisy, clean + noise)
        assert measured_snr_db(clean, noise) == pytest.approx(snr, abs=1e-9)


def test_infinite_snr_means_no_noise():
    clean = np.arange(1.0, 5.0)
    noisy, noise = sensing.add_noise(clean, math.inf, seed=0)
    assert np.array_equal(noisy, clean)
    assert not noise.any()


def test_add_noise_rejects_nan_and_neg_inf():
    clean = np.ones(4)
    with pytest.raises(ValueError):
        sensing.add_noise(clean, math.nan, seed=0)
    with pytest.raises(ValueError):
        sensing.add_noise(clean, -math.inf, seed=0)


def test_add_noise_zero_clean_signal():
    with pytest.raises(ValueError):
        sensing.add_noise(np.zeros(4), 20.0, seed=0)


# ---------------------------------------------------------------- problems

def test_build_problem_invariants():
    p = sensing.build_problem(16, 32, 4, seed=3, snr_db=30.0)
    assert p.shape == (16, 32)
    assert np.count_nonzero(p.ground_truth) == 4
    recon = p.matrix @ p.ground_truth + p.noise
    assert np.allclose(recon, p.measurements, atol=1e-12)
    assert linalg.operator_norm(p.matrix) == pytest.approx(1.0, abs=1e-6)


def test_build_problem_noiseless():
    p = sensing.build_problem(10, 20, 3, seed=4)
    assert p.noise is None
    assert np.allclose(p.matrix @ p.ground_truth, p.measurements, atol=1e-15)


def test_build_problem_colvar_normalization():
    p = sensing.build_problem(16, 32, 4, seed=3,
                              normalization=Normalization.COLVAR_ONE)
    assert p.normalization is Normalization.COLVAR_ONE
    # raw 1/m draw: operator norm is comfortably above 1 for d = 2m
    assert linalg.operator_norm(p.matrix) > 1.1


def test_effective_error_equals_noise_for_exactly_sparse_truth():
    p = sensing.build_problem(12, 24, 3, seed=8, snr_db=15.0)
    assert np.allclose(sensing.effective_error(p), p.noise, atol=1e-12)


def test_effective_error_noiseless_is_zero():
    p = sensing.build_problem(12, 24, 3, seed=8)
    assert np.allclose(sensing.effective_error(p), 0.0, atol=1e-12)


def test_problem_bundle_roundtrip(tmp_path):
    p = sensing.build_problem(6, 10, 2, seed=13, snr_db=18.0)
    out = sensing.save_problem(tmp_path / "bundle", p)
    q = sensing.load_problem(out)
    assert np.array_equal(p.matrix, q.matrix)
    assert np.array_equal(p.measurements, q.measurements)
    assert np.array_equal(p.ground_truth, q.ground_truth)
    # noise is reconstructed as y - A x*, exact only up to rounding
    assert np.allclose(p.noise, q.noise, atol=1e-12)
    assert q.sparsity == 2
    assert q.normalization is p.normalization
    meta = json.loads((out / "meta.json").read_text())
    assert meta["m"] == 6 and meta["d"] == 10 and meta["s"] == 2
    assert meta["snr_db"] == 18.0 and meta["seed"] == 13


def test_problem_bundle_roundtrip_noiseless(tmp_path):
    p = sensing.build_problem(6, 10, 2, seed=14)
    q = sensing.load_problem(sensing.save_problem(tmp_path / "b2", p))
    assert q.noise is None
    assert np.array_equal(p.measurements, q.measurements)


def test_build_problem_validates_geometry():
    with pytest.raises(ValueError):
        sensing.build_problem(0, 8, 1, seed=0)
    with pytest.raises(ValueError):
        sensing.build_problem(4, 8, 9, seed=0)
