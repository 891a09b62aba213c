"""Guarantees and diagnostics: restricted-isometry constants, contraction
certificates, average-case moment formulas, and exhaustive small-scale
oracles used to cross-check the fast paths.

The worst-case certificates take the restricted-isometry constant of order
2s. Noiseless contraction holds when sqrt(delta_2s) * (1 + sqrt(1 + 4 eta^2))
is below 1; under measurement error the factor is (2 + 2 eta) * sqrt(delta_2s)
and the iteration stalls at a floor proportional to the effective error norm.
The average-case formulas describe unnormalized Gaussian ensembles with
entry variance 1/m.
"""

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg, sensing, thresholding

COMB_GUARD = 1_000_000

_LANE_RIP_SAMPLING = 5
_LANE_MOMENTS = 4


# ---------------------------------------------------------------------------
# small symmetric eigensolver (independent of LAPACK, used as a test oracle)

def sym_eigvals_jacobi(S, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending."""
    S = linalg.as_matrix(S).copy()
    n = S.shape[0]
    if S.shape[1] != n:
        raise ValueError(f"matrix must be square, got {S.shape}")
    scale = float(np.max(np.abs(S))) if n else 0.0
    if not np.allclose(S, S.T, atol=1e-12 * max(scale, 1.0)):
        raise ValueError("matrix is not symmetric")
    fro = float(np.linalg.norm(S))
    if fro == 0.0:
        return np.zeros(n)
    upper = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        # norm of the strictly off-diagonal part, summed directly: subtracting
        # diagonal mass from the total cancels catastrophically near convergence
        off = math.sqrt(2.0 * float(np.sum(S[upper] ** 2)))
        if off <= tol * fro:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = S[p, q]
                if apq == 0.0:
                    continue
                diff = S[q, q] - S[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    # theta would overflow; tangent in the asymptotic regime
                    t = apq / diff
                else:
                    theta = diff / (2.0 * apq)
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                rot = np.eye(2)
                rot[0, 0] = rot[1, 1] = c
                rot[0, 1] = s
                rot[1, 0] = -s
                pq = [p, q]
                S[pq, :] = rot.T @ S[pq, :]
                S[:, pq] = S[:, pq] @ rot
    else:
        raise RuntimeError(f"jacobi sweeps did not converge in {max_sweeps} sweeps")
    return np.sort(np.diag(S))


# ---------------------------------------------------------------------------
# restricted-isometry constants

def _support_blocks(supports_iter, block: int):
    while True:
        chunk = list(itertools.islice(supports_iter, block))
        if not chunk:
            return
        yield np.asarray(chunk, dtype=np.int64)


def _max_spectral_deviation(A: np.ndarray, support_blocks) -> float:
    At = np.ascontiguousarray(A.T)
    s_eye = None
    worst = 0.0
    for idx in support_blocks:
        cols = At[idx]                      # (B, s, m)
        gram = cols @ cols.transpose(0, 2, 1)
        if s_eye is None or s_eye.shape[0] != gram.shape[1]:
            s_eye = np.eye(gram.shape[1])
        ev = np.linalg.eigvalsh(gram - s_eye)
        block_max = float(np.max(np.abs(ev[:, [0, -1]])))
        worst = max(worst, block_max)
    return worst


def rip_constant_exact(A, s: int, max_supports: int = COMB_GUARD) -> float:
    """delta_s by exhaustive enumeration of all size-s supports.

    Guarded: refuses when C(d, s) exceeds max_supports; use
    rip_constant_sampled for a certified lower bound instead.
    """
    A = linalg.as_matrix(A)
    d = A.shape[1]
    if not (1 <= s <= d):
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    ncomb = math.comb(d, s)
    if ncomb > max_supports:
        raise ValueError(
            f"C({d},{s}) = {ncomb} supports exceeds the enumeration guard "
            f"({max_supports}); use rip_constant_sampled for an estimate"
        )
    return _max_spectral_deviation(A, _support_blocks(itertools.combinations(range(d), s), 8192))


def rip_constant_sampled(A, s: int, n_supports: int, seed: int) -> float:
    """Max spectral deviation over n distinct uniformly sampled supports.

    Always a lower bound on delta_s; drawing at least C(d, s) supports
    degenerates to the exhaustive computation.
    """
    A = linalg.as_matrix(A)
    d = A.shape[1]
    if not (1 <= s <= d):
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    if n_supports < 1:
        raise ValueError(f"n_supports must be positive, got {n_supports}")
    ncomb = math.comb(d, s)
    if n_supports >= ncomb:
        return rip_constant_exact(A, s, max_supports=max(ncomb, COMB_GUARD))
    rng = sensing.rng_for(seed, _LANE_RIP_SAMPLING)
    seen: set[tuple[int, ...]] = set()
    attempts = 0
    cap = 50 * n_supports + 100
    while len(seen) < n_supports and attempts < cap:
        attempts += 1
        seen.add(tuple(np.sort(rng.choice(d, size=s, replace=False)).tolist()))
    supports = sorted(seen)
    return _max_spectral_deviation(A, _support_blocks(iter(supports), 8192))


# ---------------------------------------------------------------------------
# worst-case certificates

@dataclass(frozen=True)
class Certificate:
    rho: float
    condition_met: bool


@dataclass(frozen=True)
class NoisyCertificate:
    rho: float
    condition_met: bool
    noise_floor_bound: float


def _check_cert_inputs(delta_2s: float, eta: float):
    delta_2s = float(delta_2s)
    eta = float(eta)
    if not (0.0 <= delta_2s) or not math.isfinite(delta_2s):
        raise ValueError(f"delta_2s must be finite and nonnegative, got {delta_2s}")
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"eta must lie in [0, 1] for the certificates, got {eta}")
    return delta_2s, eta


def noiseless_certificate(delta_2s: float, eta: float) -> Certificate:
    """Per-iteration contraction factor for exact measurements."""
    delta_2s, eta = _check_cert_inputs(delta_2s, eta)
    rho = math.sqrt(delta_2s) * (1.0 + math.sqrt(1.0 + 4.0 * eta * eta))
    return Certificate(rho=rho, condition_met=rho < 1.0)


def noisy_certificate(delta_2s: float, eta: float, e_tilde_norm: float) -> NoisyCertificate:
    """Contraction factor and error floor under measurement error.

    The floor is the fixed point of err <- rho * err + (2 + 8 eta) * ||e~||;
    it is +inf when the contraction condition fails.
    """
    delta_2s, eta = _check_cert_inputs(delta_2s, eta)
    e_tilde_norm = float(e_tilde_norm)
    if e_tilde_norm < 0.0 or not math.isfinite(e_tilde_norm):
        raise ValueError(f"e_tilde_norm must be finite and nonnegative, got {e_tilde_norm}")
    rho = (2.0 + 2.0 * eta) * math.sqrt(delta_2s)
    met = rho < 1.0
    floor = (2.0 + 8.0 * eta) * e_tilde_norm / (1.0 - rho) if met else math.inf
    return NoisyCertificate(rho=rho, condition_met=met, noise_floor_bound=floor)


@dataclass(frozen=True)
class TheoryReport:
    """Certificates for one instance, keyed by the computed isometry constants."""

    delta: dict[int, float]
    eta: float
    noiseless_rho: float
    noiseless_condition_met: bool
    noisy_rho: float
    noisy_condition_met: bool
    noise_floor_bound: float | None


def theory_report(
    A,
    sparsity: int,
    eta: float,
    e_tilde_norm: float | None = None,
    n_supports: int | None = None,
    seed: int = 0,
) -> TheoryReport:
    """Compute delta_s and delta_2s (exact, or sampled when n_supports is
    given) and both contraction certificates for them."""
    A = linalg.as_matrix(A)
    d = A.shape[1]
    s = int(sparsity)
    if 2 * s > d:
        raise ValueError(f"certificates need 2*s <= d, got s={s}, d={d}")
    if n_supports is None:
        delta = {s: rip_constant_exact(A, s), 2 * s: rip_constant_exact(A, 2 * s)}
    else:
        delta = {
            s: rip_constant_sampled(A, s, n_supports, seed),
            2 * s: rip_constant_sampled(A, 2 * s, n_supports, seed + 1),
        }
    clean = noiseless_certificate(delta[2 * s], eta)
    noisy = noisy_certificate(delta[2 * s], eta, e_tilde_norm if e_tilde_norm is not None else 0.0)
    return TheoryReport(
        delta=delta,
        eta=float(eta),
        noiseless_rho=clean.rho,
        noiseless_condition_met=clean.condition_met,
        noisy_rho=noisy.rho,
        noisy_condition_met=noisy.condition_met,
        noise_floor_bound=None if e_tilde_norm is None else noisy.noise_floor_bound,
    )


# ---------------------------------------------------------------------------
# average-case moment formulas (Gaussian entries, variance 1/m, unnormalized)

def _check_md(m: int, d: int):
    if m < 1 or d < 1:
        raise ValueError(f"dimensions must be positive, got m={m}, d={d}")
    return int(m), int(d)


def _check_eta_nonneg(eta: float) -> float:
    eta = float(eta)
    if not math.isfinite(eta) or eta < 0.0:
        raise ValueError(f"eta must be finite and nonnegative, got {eta}")
    return eta


def expected_frob_residual(m: int, d: int, eta: float) -> float:
    """E ||I - 2 eta A^T A||_F^2 = 4 d (((d+m+1)/m) eta^2 - eta + 1/4)."""
    m, d = _check_md(m, d)
    eta = _check_eta_nonneg(eta)
    c = (d + m + 1.0) / m
    return 4.0 * d * (c * eta * eta - eta + 0.25)


def expected_frob_gram(m: int, d: int, eta: float) -> float:
    """E ||2 eta A^T A||_F^2 = 4 d ((d+m+1)/m) eta^2."""
    m, d = _check_md(m, d)
    eta = _check_eta_nonneg(eta)
    c = (d + m + 1.0) / m
    return 4.0 * d * c * eta * eta


def avg_case_rho(m: int, d: int, eta: float) -> float:
    """Average-case distance-amplification bound for one look-ahead step."""
    m, d = _check_md(m, d)
    eta = _check_eta_nonneg(eta)
    c = (d + m + 1.0) / m
    return 2.0 * math.sqrt(8.0 * c * eta * eta - 4.0 * eta + 1.0)


def eta_valid_range_upper(m: int, d: int) -> float:
    """Largest eta below which avg_case_rho stays under 2 (exclusive)."""
    m, d = _check_md(m, d)
    return m / (2.0 * (m + d + 1.0))


def eta_optimal(m: int, d: int) -> float:
    """The eta minimizing avg_case_rho."""
    m, d = _check_md(m, d)
    return m / (4.0 * (d + m + 1.0))


@dataclass(frozen=True)
class MomentPrediction:
    m: int
    d: int
    eta: float
    expected_frob_residual: float
    expected_frob_gram: float
    avg_case_rho: float
    eta_valid_range_upper: float
    eta_optimal: float


def moment_prediction(m: int, d: int, eta: float) -> MomentPrediction:
    return MomentPrediction(
        m=int(m),
        d=int(d),
        eta=float(eta),
        expected_frob_residual=expected_frob_residual(m, d, eta),
        expected_frob_gram=expected_frob_gram(m, d, eta),
        avg_case_rho=avg_case_rho(m, d, eta),
        eta_valid_range_upper=eta_valid_range_upper(m, d),
        eta_optimal=eta_optimal(m, d),
    )


@dataclass(frozen=True)
class MomentStats:
    """Monte Carlo moments of the Gram matrix G = A^T A over Gaussian draws.

    mean_frob_gram_sq is E ||G||_F^2, mean_trace is E tr G,
    mean_offdiag_sq is the per-pair mean of G_ij^2 (i != j), and
    mean_diag_sq is the per-column mean of G_ii^2 = ||A_i||^4.
    """

    m: int
    d: int
    draws: int
    mean_trace: float
    mean_frob_gram_sq: float
    mean_offdiag_sq: float
    mean_diag_sq: float

    def mc_frob_residual(self, eta: float) -> float:
        """MC estimate of E ||I - 2 eta A^T A||_F^2.

        Expanding the square gives d - 4 eta tr G + 4 eta^2 ||G||_F^2 per
        draw, so the estimate is this exact function of the accumulated
        trace and Frobenius moments.
        """
        eta = _check_eta_nonneg(eta)
        return self.d - 4.0 * eta * self.mean_trace + 4.0 * eta * eta * self.mean_frob_gram_sq

    def mc_frob_gram(self, eta: float) -> float:
        """MC estimate of E ||2 eta A^T A||_F^2."""
        eta = _check_eta_nonneg(eta)
        return 4.0 * eta * eta * self.mean_frob_gram_sq


def monte_carlo_moments(m: int, d: int, draws: int, seed: int) -> MomentStats:
    """Accumulate Gram-matrix moments over fresh variance-1/m Gaussian draws."""
    m, d = _check_md(m, d)
    if draws < 1:
        raise ValueError(f"draws must be positive, got {draws}")
    rng = sensing.rng_for(seed, _LANE_MOMENTS)
    chunk = max(1, min(512, int(2e7 / (d * d))))
    tr_sum = 0.0
    frob_sum = 0.0
    diag_sq_sum = 0.0
    done = 0
    while done < draws:
        b = min(chunk, draws - done)
        A = rng.standard_normal((b, m, d)) / math.sqrt(m)
        G = np.einsum("kmi,kmj->kij", A, A, optimize=True)
        diag = np.einsum("kii->ki", G)
        tr_sum += float(np.sum(diag))
        frob_sum += float(np.einsum("kij,kij->", G, G))
        diag_sq_sum += float(np.sum(diag * diag))
        done += b
    mean_frob = frob_sum / draws
    mean_diag_sq_total = diag_sq_sum / draws
    offdiag_pairs = d * (d - 1)
    mean_offdiag_sq = (mean_frob - mean_diag_sq_total) / offdiag_pairs if offdiag_pairs else 0.0
    return MomentStats(
        m=m,
        d=d,
        draws=draws,
        mean_trace=tr_sum / draws,
        mean_frob_gram_sq=mean_frob,
        mean_offdiag_sq=mean_offdiag_sq,
        mean_diag_sq=mean_diag_sq_total / d,
    )


# ---------------------------------------------------------------------------
# exhaustive oracles

def oracle_nearest_sparse_to(z, target, s: int) -> thresholding.SupportSet:
    """Support whose projection of z lands nearest the target, by enumeration.

    Ties resolve to the lexicographically smallest index set. Guarded by the
    same combinatorial cap as the exact isometry constant.
    """
    z = linalg.as_vector(z)
    target = linalg.as_vector(target)
    if z.shape != target.shape:
        raise ValueError(f"shape mismatch: z {z.shape} vs target {target.shape}")
    d = z.shape[0]
    s = int(s)
    if not (0 <= s <= d):
        raise ValueError(f"sparsity must be in [0, {d}], got {s}")
    if math.comb(d, s) > COMB_GUARD:
        raise ValueError(f"C({d},{s}) exceeds the enumeration guard ({COMB_GUARD})")
    # ||P_S z - t||^2 = ||t||^2 + sum_{i in S} ((z_i - t_i)^2 - t_i^2)
    contrib = (z - target) ** 2 - target**2
    best = None
    best_cost = math.inf
    for combo in itertools.combinations(range(d), s):
        cost = float(np.sum(contrib[list(combo)])) if combo else 0.0
        if cost < best_cost:
            best_cost = cost
            best = combo
    return thresholding.SupportSet(best, d)


@dataclass(frozen=True)
class L0Result:
    x: np.ndarray
    support: thresholding.SupportSet
    residual_norm: float


def oracle_l0_recover(A, y, s: int) -> L0Result:
    """Globally best s-sparse least-squares fit by support enumeration.

    Solves the normal equations on every size-s support (Cholesky; supports
    with a rank-deficient submatrix are skipped with a warning) and returns
    the minimum-residual solution, ties to the lexicographically smallest
    support.
    """
    A = linalg.as_matrix(A)
    y = linalg.as_vector(y)
    m, d = A.shape
    if y.shape[0] != m:
        raise ValueError(f"measurements length {y.shape[0]} does not match matrix rows {m}")
    s = int(s)
    if not (1 <= s <= d):
        raise ValueError(f"need 1 <= s <= d, got s={s}, d={d}")
    if math.comb(d, s) > COMB_GUARD:
        raise ValueError(f"C({d},{s}) exceeds the enumeration guard ({COMB_GUARD})")
    best_x = None
    best_support = None
    best_res = math.inf
    skipped = 0
    for combo in itertools.combinations(range(d), s):
        cols = A[:, combo]
        gram = cols.T @ cols
        try:
            L = np.linalg.cholesky(gram)
        except np.linalg.LinAlgError:
            skipped += 1
            continue
        rhs = cols.T @ y
        coeffs = np.linalg.solve(L.T, np.linalg.solve(L, rhs))
        res = float(np.linalg.norm(y - cols @ coeffs))
        if res < best_res:
            best_res = res
            best_support = combo
            best_x = np.zeros(d)
            best_x[list(combo)] = coeffs
    if skipped:
        warnings.warn(f"skipped {skipped} rank-deficient support(s) during l0 search")
    if best_x is None:
        raise ValueError("every candidate support was rank deficient")
    return L0Result(
        x=best_x,
        support=thresholding.SupportSet(best_support, d),
        residual_norm=best_res,
    )
