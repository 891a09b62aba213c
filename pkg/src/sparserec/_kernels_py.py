"""Pure-numpy backend kernels.

Twin of the compiled extension ``sparserec._kernels``: same functions, same
semantics, same operation order. The compiled module is preferred at import
time when present; this module is the fallback and the readable reference.

All kernels take C-contiguous float64 arrays and never mutate their inputs.
"""

import math

import numpy as np

NAME = "python"


def matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    return A @ x


def rmatvec(A: np.ndarray, r: np.ndarray) -> np.ndarray:
    return A.T @ r


def top_s_indices(keys: np.ndarray, s: int) -> np.ndarray:
    """Indices of the s largest keys, ties to the lowest index, sorted ascending."""
    d = keys.shape[0]
    order = np.lexsort((np.arange(d), -keys))
    return np.sort(order[:s]).astype(np.int64)


def gram_opnorm(M: np.ndarray, tol: float, max_iters: int):
    """Power iteration on M^T M from the normalized all-ones vector.

    Returns (sigma, iterations, converged, last_rayleigh_quotient). Stops when
    the Rayleigh quotient's relative change drops to tol. A start vector
    annihilated by the Gram matrix triggers one deterministic restart from a
    ramp vector; a zero matrix returns sigma 0 immediately.
    """
    m, d = M.shape
    v = np.full(d, 1.0 / math.sqrt(d))
    frob_sq = float(np.sum(M * M))
    lam = 0.0
    prev = 0.0
    restarted = False
    k = 0
    while k < max_iters:
        k += 1
        w = M @ v
        lam = float(w @ w)
        if lam == 0.0:
            if frob_sq == 0.0:
                return 0.0, k, True, 0.0
            if restarted:
                return 0.0, k, False, 0.0
            ramp = np.arange(1.0, d + 1.0)
            v = ramp / float(np.sqrt(ramp @ ramp))
            restarted = True
            continue
        if k >= 2 and abs(lam - prev) <= tol * lam:
            return math.sqrt(lam), k, True, lam
        prev = lam
        u = M.T @ w
        v = u / float(np.sqrt(u @ u))
    return math.sqrt(lam), max_iters, False, lam


def _alloc_history(max_iters, d, s, truth, record_supports, record_iterates):
    residuals = np.empty(max_iters)
    errors = np.empty(max_iters) if truth is not None else None
    supports = np.empty((max_iters, s), dtype=np.int64) if record_supports else None
    iterates = np.empty((max_iters, d)) if record_iterates else None
    return residuals, errors, supports, iterates


def _trim(iters, residuals, errors, supports, iterates):
    trim = lambda arr: None if arr is None else arr[:iters].copy()
    return trim(residuals), trim(errors), trim(supports), trim(iterates)


def iht(A, y, s, max_iters, stop_tol, div_limit, truth, record_supports, record_iterates):
    """Hard-thresholded gradient iteration from x = 0.

    Per iteration: a = x + A^T (y - A x), then keep the s largest-magnitude
    entries of a. Returns (x, iterations_run, diverged, residuals, errors,
    supports, iterates); history arrays are trimmed to iterations_run.
    """
    m, d = A.shape
    x = np.zeros(d)
    residuals, errors, supports, iterates = _alloc_history(
        max_iters, d, s, truth, record_supports, record_iterates
    )
    diverged = False
    iters = 0
    for t in range(1, max_iters + 1):
        r = y - A @ x
        if t >= 2:
            residuals[t - 2] = np.linalg.norm(r)
        a = x + A.T @ r
        keys = a * a
        idx = top_s_indices(keys, s)
        x_new = np.zeros(d)
        x_new[idx] = a[idx]
        dx = float(np.linalg.norm(x_new - x))
        x = x_new
        iters = t
        if errors is not None:
            errors[t - 1] = np.linalg.norm(x - truth)
        if supports is not None:
            supports[t - 1] = idx
        if iterates is not None:
            iterates[t - 1] = x
        if float(np.linalg.norm(x)) > div_limit:
            diverged = True
            break
        if stop_tol > 0.0 and dx <= stop_tol:
            break
    residuals[iters - 1] = np.linalg.norm(y - A @ x)
    residuals, errors, supports, iterates = _trim(iters, residuals, errors, supports, iterates)
    return x, iters, diverged, residuals, errors, supports, iterates


def ilat(A, y, s, eta, max_iters, stop_tol, div_limit, truth, record_supports, record_iterates):
    """Look-ahead-thresholded gradient iteration from x = 0.

    Per iteration: a = x + A^T (y - A x), then keep the s entries of a with
    the largest scores a_i^2 - 2 eta a_i g_i, where g is the cost gradient
    recomputed at a. Two gradient evaluations per iteration.
    """
    m, d = A.shape
    x = np.zeros(d)
    residuals, errors, supports, iterates = _alloc_history(
        max_iters, d, s, truth, record_supports, record_iterates
    )
    diverged = False
    iters = 0
    for t in range(1, max_iters + 1):
        r = y - A @ x
        if t >= 2:
            residuals[t - 2] = np.linalg.norm(r)
        a = x + A.T @ r
        r2 = y - A @ a
        g = -2.0 * (A.T @ r2)
        scores = a * a - (2.0 * eta) * a * g
        idx = top_s_indices(scores, s)
        x_new = np.zeros(d)
        x_new[idx] = a[idx]
        dx = float(np.linalg.norm(x_new - x))
        x = x_new
        iters = t
        if errors is not None:
            errors[t - 1] = np.linalg.norm(x - truth)
        if supports is not None:
            supports[t - 1] = idx
        if iterates is not None:
            iterates[t - 1] = x
        if float(np.linalg.norm(x)) > div_limit:
            diverged = True
            break
        if stop_tol > 0.0 and dx <= stop_tol:
            break
    residuals[iters - 1] = np.linalg.norm(y - A @ x)
    residuals, errors, supports, iterates = _trim(iters, residuals, errors, supports, iterates)
    return x, iters, diverged, residuals, errors, supports, iterates
