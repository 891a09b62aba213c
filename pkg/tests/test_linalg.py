"""Dense matrix/vector helpers: norms, products, CSV round-trips."""

import math

import numpy as np
import pytest

from sparserec import analysis, linalg


# ---------------------------------------------------------------- oracles

def opnorm_by_jacobi(M):
    """Independent route to the largest singular value.

    Eigenvalues of the Gram matrix via cyclic Jacobi sweeps, which share no
    code with the power iteration under test.
    """
    M = np.asarray(M, dtype=np.float64)
    gram = M.T @ M if M.shape[0] >= M.shape[1] else M @ M.T
    evals = analysis.sym_eigvals_jacobi(gram)
    return math.sqrt(max(float(evals[-1]), 0.0))


def rng(seed):
    return np.random.Generator(np.random.Philox(key=[seed, 0xA11CE]))


# ---------------------------------------------------------------- operator norm

def test_operator_norm_matches_jacobi_oracle_small():
    g = rng(1)
    for trial in range(25):
        m = int(g.integers(1, 7))
        d = int(g.integers(1, 7))
        M = g.standard_normal((m, d))
        got = linalg.operator_norm(M)
        want = opnorm_by_jacobi(M)
        assert got == pytest.approx(want, rel=1e-8, abs=1e-10)


def test_operator_norm_random_3x5_instance():
    M = rng(2).standard_normal((3, 5))
    assert linalg.operator_norm(M) == pytest.approx(opnorm_by_jacobi(M), rel=1e-8)


def test_operator_norm_known_values():
    assert linalg.operator_norm(np.array([[3.0, 0.0], [4.0, 0.0]])) == pytest.approx(5.0, abs=1e-9)
    assert linalg.operator_norm(np.eye(4)) == pytest.approx(1.0, abs=1e-12)
    assert linalg.operator_norm(np.zeros((3, 2))) == 0.0


def test_operator_norm_transpose_invariant():
    g = rng(3)
    for trial in range(10):
        M = g.standard_normal((4, 9))
        a = linalg.operator_norm(M)
        b = linalg.operator_norm(M.T)
        assert a == pytest.approx(b, rel=1e-8)


def test_operator_norm_bounds_matvec():
    g = rng(4)
    M = g.standard_normal((6, 11))
    top = linalg.operator_norm(M)
    for trial in range(50):
        v = g.standard_normal(11)
        assert np.linalg.norm(M @ v) <= top * np.linalg.norm(v) + 1e-9


def test_operator_norm_scaling():
    M = rng(5).standard_normal((5, 5))
    base = linalg.operator_norm(M)
    assert linalg.operator_norm(-2.5 * M) == pytest.approx(2.5 * base, rel=1e-8)


def test_operator_norm_equal_rows_does_not_stall():
    # the all-ones start vector is orthogonal to nothing here, but a matrix
    # with identical rows makes the Gram rank one; must still converge
    M = np.ones((3, 4))
    assert linalg.operator_norm(M) == pytest.approx(math.sqrt(12.0), rel=1e-9)


def test_operator_norm_rejects_bad_budget_and_tol():
    M = np.eye(2)
    with pytest.raises(ValueError):
        linalg.operator_norm(M, tol=0.0)
    with pytest.raises(ValueError):
        linalg.operator_norm(M, max_iters=0)


# ---------------------------------------------------------------- products

def test_matvec_linearity():
    g = rng(6)
    M = g.standard_normal((7, 5))
    u = g.standard_normal(5)
    v = g.standard_normal(5)
    a, b = 1.7, -0.3
    lhs = linalg.matvec(M, a * u + b * v)
    rhs = a * linalg.matvec(M, u) + b * linalg.matvec(M, v)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_adjoint_consistency():
    g = rng(7)
    M = g.standard_normal((6, 4))
    v = g.standard_normal(4)
    r = g.standard_normal(6)
    lhs = float(np.dot(linalg.matvec(M, v), r))
    rhs = float(np.dot(v, linalg.adjoint_matvec(M, r)))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_matvec_dimension_mismatch():
    with pytest.raises(ValueError):
        linalg.matvec(np.eye(3), np.ones(4))
    with pytest.raises(ValueError):
        linalg.adjoint_matvec(np.eye(3), np.ones(4))


def test_frobenius_norm_sq():
    M = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert linalg.frobenius_norm_sq(M) == pytest.approx(30.0, abs=1e-12)


def test_as_vector_rejects_matrices():
    with pytest.raises(ValueError):
        linalg.as_vector(np.eye(2))
    with pytest.raises(ValueError):
        linalg.as_matrix(np.ones(3))


# ---------------------------------------------------------------- CSV I/O

def test_matrix_csv_roundtrip_is_exact(tmp_path):
    M = rng(8).standard_normal((5, 3)) * 10.0 ** rng(9).integers(-8, 8, size=(5, 3))
    path = tmp_path / "M.csv"
    linalg.save_matrix(path, M)
    back = linalg.load_matrix(path)
    assert back.shape == M.shape
    assert np.array_equal(back, M)  # 17 significant digits round-trip float64


def test_vector_csv_roundtrip_is_exact(tmp_path):
    v = rng(10).standard_normal(9)
    path = tmp_path / "v.csv"
    linalg.save_vector(path, v)
    assert np.array_equal(linalg.load_vector(path), v)


def test_vector_csv_single_entry(tmp_path):
    path = tmp_path / "one.csv"
    linalg.save_vector(path, np.array([2.5]))
    back = linalg.load_vector(path)
    assert back.shape == (1,)
    assert back[0] == 2.5


def test_load_matrix_missing_file(tmp_path):
    with pytest.raises(OSError):
        linalg.load_matrix(tmp_path / "absent.csv")
