"""Dense vector/matrix primitives shared by everything else.

Vectors and matrices are C-contiguous float64 numpy arrays; helpers here
coerce inputs once at the boundary so the kernels can assume that layout.
Matrix-vector products and the power-iteration operator norm dispatch to the
active backend (compiled or pure numpy); accumulation order is fixed within a
backend, so repeated runs on one platform reproduce bit-for-bit.
"""

import numpy as np

from . import _backend

OPNORM_TOL = 1e-10
OPNORM_MAX_ITERS = 10_000


def as_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.ascontiguousarray(v, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    return arr


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    arr = np.ascontiguousarray(M, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    return arr


def matvec(M, v) -> np.ndarray:
    """M @ v with an explicit dimension check naming both operand shapes."""
    M = as_matrix(M)
    v = as_vector(v)
    if M.shape[1] != v.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, vector has length {v.shape[0]}"
        )
    return _backend.active().matvec(M, v)


def adjoint_matvec(M, r) -> np.ndarray:
    """M.T @ r, checked like matvec."""
    M = as_matrix(M)
    r = as_vector(r)
    if M.shape[0] != r.shape[0]:
        raise ValueError(
            f"dimension mismatch: matrix is {M.shape[0]}x{M.shape[1]}, vector has length {r.shape[0]}"
        )
    return _backend.active().rmatvec(M, r)


def frobenius_norm_sq(M) -> float:
    M = as_matrix(M)
    return float(np.sum(M * M))


def operator_norm(M, tol: float = OPNORM_TOL, max_iters: int = OPNORM_MAX_ITERS) -> float:
    """Largest singular value via power iteration on the Gram matrix.

    Deterministic: starts from the normalized all-ones vector and stops when
    the Rayleigh quotient's relative change reaches tol. Raises RuntimeError
    when the budget runs out before that.
    """
    M = as_matrix(M)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iters < 1:
        raise ValueError(f"max_iters must be at least 1, got {max_iters}")
    sigma, iters, converged, last_rq = _backend.active().gram_opnorm(M, tol, max_iters)
    if not converged:
        raise RuntimeError(
            f"power iteration did not converge within {iters} iterations "
            f"(last Rayleigh quotient {last_rq!r})"
        )
    return sigma


def save_matrix(path, M) -> None:
    """Write a matrix as CSV, one row per line, 17 significant digits."""
    M = as_matrix(M)
    np.savetxt(path, M, fmt="%.17g", delimiter=",")


def load_matrix(path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: matrix contains non-finite entries")
    return arr


def save_vector(path, v) -> None:
    """Write a vector as CSV, one value per line, 17 significant digits."""
    v = as_vector(v)
    np.savetxt(path, v, fmt="%.17g", delimiter=",")


def load_vector(path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=1)
    if arr.ndim != 1:
        raise ValueError(f"{path}: expected one value per line, got shape {arr.shape}")
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{path}: vector contains non-finite entries")
    return arr
