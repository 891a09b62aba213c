"""Thresholding rules: plain hard thresholding and its look-ahead variant.

Hard thresholding keeps the s largest-magnitude coordinates. The look-ahead
rule keeps the s coordinates with the largest scores

    score_i = z_i**2 - 2 * eta * z_i * g_i,

where g is the gradient of the residual cost C(x) = ||y - A x||^2 at z.
Keeping the top scores is the same as picking the support whose projection of
z lands nearest the look-ahead point z - eta * g; eta = 0 recovers plain hard
thresholding. Ties always resolve to the lowest index.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend, linalg


@dataclass(frozen=True)
class SupportSet:
    """A sorted set of coordinate indices inside an ambient dimension."""

    indices: tuple[int, ...]
    dim: int

    def __post_init__(self):
        if self.dim < 0:
            raise ValueError(f"dim must be nonnegative, got {self.dim}")
        prev = -1
        for i in self.indices:
            if not (0 <= i < self.dim):
                raise ValueError(f"index {i} out of range for dim {self.dim}")
            if i <= prev:
                raise ValueError(f"indices must be strictly increasing, got {self.indices}")
            prev = i

    @classmethod
    def from_iterable(cls, indices, dim: int) -> "SupportSet":
        return cls(tuple(sorted(int(i) for i in set(indices))), dim)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices


@dataclass(frozen=True)
class LatScores:
    """Per-coordinate look-ahead scores, with the gradient kept for audit."""

    scores: np.ndarray
    eta: float
    grad: np.ndarray


def _check_sparsity(s: int, d: int) -> int:
    s = int(s)
    if not (0 <= s <= d):
        raise ValueError(f"sparsity must be in [0, {d}], got {s}")
    return s


def _check_eta(eta: float) -> float:
    eta = float(eta)
    if not np.isfinite(eta) or eta < 0.0:
        raise ValueError(f"eta must be finite and nonnegative, got {eta}")
    return eta


def project(z, support: SupportSet) -> np.ndarray:
    """Zero out every coordinate of z outside the support."""
    z = linalg.as_vector(z)
    if support.dim != z.shape[0]:
        raise ValueError(f"support dim {support.dim} does not match vector length {z.shape[0]}")
    out = np.zeros(z.shape[0])
    idx = support.as_array()
    out[idx] = z[idx]
    return out


def hard_threshold(z, s: int) -> tuple[np.ndarray, SupportSet]:
    """Keep the s largest-magnitude coordinates of z (ties to the lowest index)."""
    z = linalg.as_vector(z)
    s = _check_sparsity(s, z.shape[0])
    keys = z * z
    idx = _backend.active().top_s_indices(keys, s)
    out = np.zeros(z.shape[0])
    out[idx] = z[idx]
    return out, SupportSet(tuple(int(i) for i in idx), z.shape[0])


def cost_value(A, y, z) -> float:
    """C(z) = ||y - A z||^2."""
    r = linalg.as_vector(y) - linalg.matvec(A, z)
    return float(r @ r)


def cost_gradient(A, y, z) -> np.ndarray:
    """Gradient of C at z: -2 A^T (y - A z)."""
    y = linalg.as_vector(y)
    r = y - linalg.matvec(A, z)
    return -2.0 * linalg.adjoint_matvec(A, r)


def look_ahead_point(z, grad, eta: float) -> np.ndarray:
    """The point z - eta * grad that look-ahead scoring implicitly targets."""
    z = linalg.as_vector(z)
    grad = linalg.as_vector(grad)
    if z.shape != grad.shape:
        raise ValueError(f"shape mismatch: z {z.shape} vs grad {grad.shape}")
    return z - _check_eta(eta) * grad


def lat_scores(z, grad, eta: float) -> LatScores:
    """Look-ahead scores z_i^2 - 2 eta z_i grad_i (larger = more worth keeping)."""
    z = linalg.as_vector(z)
    grad = linalg.as_vector(grad)
    if z.shape != grad.shape:
        raise ValueError(f"shape mismatch: z {z.shape} vs grad {grad.shape}")
    eta = _check_eta(eta)
    scores = z * z - (2.0 * eta) * z * grad
    return LatScores(scores=scores, eta=eta, grad=grad)


def lat_threshold(z, A, y, s: int, eta: float, grad=None) -> tuple[np.ndarray, SupportSet]:
    """Keep the s coordinates of z with the largest look-ahead scores.

    The cost gradient at z is computed from (A, y) unless a precomputed one
    is passed, in which case A and y may be None.
    """
    z = linalg.as_vector(z)
    s = _check_sparsity(s, z.shape[0])
    if grad is None:
        grad = cost_gradient(A, y, z)
    scored = lat_scores(z, grad, eta)
    idx = _backend.active().top_s_indices(scored.scores, s)
    out = np.zeros(z.shape[0])
    out[idx] = z[idx]
    return out, SupportSet(tuple(int(i) for i in idx), z.shape[0])


def surrogate_value(z, grad, cost_at_z: float, x, eta: float) -> float:
    """One-point quadratic model of the cost around z, evaluated at x.

    f(x) = C(z) + sum_i (2 eta grad_i (x_i - z_i) + (x_i - z_i)^2). Minimizing
    this over s-sparse x with coordinates either z_i or 0 is what the
    look-ahead scores rank.
    """
    z = linalg.as_vector(z)
    grad = linalg.as_vector(grad)
    x = linalg.as_vector(x)
    eta = _check_eta(eta)
    delta = x - z
    return float(cost_at_z + np.sum((2.0 * eta) * grad * delta + delta * delta))
