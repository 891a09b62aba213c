"""Iterative sparse recovery drivers.

Both algorithms iterate a gradient step on the measurement residual followed
by a pruning step back to s nonzeros. The plain variant keeps the s largest
magnitudes; the look-ahead variant re-evaluates the residual gradient at the
stepped point and keeps the s coordinates whose retention best decreases a
one-step quadratic model, which costs a second gradient evaluation per
iteration.
"""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _backend, linalg, sensing, thresholding

DIVERGENCE_LIMIT = 1e12


class Algorithm(str, Enum):
    IHT = "iht"
    ILAT = "ilat"


@dataclass(frozen=True)
class RecoveryConfig:
    algorithm: Algorithm = Algorithm.IHT
    sparsity: int | None = None        # None: take it from the problem
    eta: float = 0.0                   # look-ahead weight, ignored by plain IHT
    max_iters: int = 1000
    stop_tolerance: float = 0.0        # stop when ||x_new - x|| falls to this
    record_history: bool = False       # keep per-iteration supports and iterates
    divergence_limit: float = DIVERGENCE_LIMIT

    def __post_init__(self):
        algorithm = Algorithm(self.algorithm)
        object.__setattr__(self, "algorithm", algorithm)
        if self.sparsity is not None and self.sparsity < 0:
            raise ValueError(f"sparsity must be nonnegative, got {self.sparsity}")
        eta = float(self.eta)
        if not math.isfinite(eta) or eta < 0.0:
            raise ValueError(f"eta must be finite and nonnegative, got {self.eta}")
        object.__setattr__(self, "eta", eta)
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be at least 1, got {self.max_iters}")
        tol = float(self.stop_tolerance)
        if not math.isfinite(tol) or tol < 0.0:
            raise ValueError(f"stop_tolerance must be finite and nonnegative, got {self.stop_tolerance}")
        object.__setattr__(self, "stop_tolerance", tol)
        limit = float(self.divergence_limit)
        if not (limit > 0.0):
            raise ValueError(f"divergence_limit must be positive, got {self.divergence_limit}")
        object.__setattr__(self, "divergence_limit", limit)


@dataclass(frozen=True)
class RecoveryResult:
    estimate: np.ndarray
    iterations_run: int
    gradient_evaluations: int
    diverged: bool
    residual_history: np.ndarray
    error_history: np.ndarray | None = None
    support_history: list[thresholding.SupportSet] | None = field(default=None, repr=False)
    iterate_history: np.ndarray | None = field(default=None, repr=False)

    @property
    def final_residual_norm(self) -> float:
        return float(self.residual_history[-1])

    @property
    def support(self) -> thresholding.SupportSet:
        idx = np.flatnonzero(self.estimate)
        return thresholding.SupportSet(tuple(int(i) for i in idx), self.estimate.shape[0])


def gradient_step(A, y, x) -> np.ndarray:
    """One residual-correlation update: x + A^T (y - A x)."""
    A = linalg.as_matrix(A)
    y = linalg.as_vector(y)
    x = linalg.as_vector(x)
    return x + linalg.adjoint_matvec(A, y - linalg.matvec(A, x))


def _resolve_sparsity(problem: sensing.SensingProblem, config: RecoveryConfig) -> int:
    s = problem.sparsity if config.sparsity is None else config.sparsity
    d = problem.matrix.shape[1]
    if not (0 <= s <= d):
        raise ValueError(f"sparsity must be in [0, {d}], got {s}")
    return int(s)


def _run(problem: sensing.SensingProblem, config: RecoveryConfig) -> RecoveryResult:
    A = problem.matrix
    y = problem.measurements
    s = _resolve_sparsity(problem, config)
    truth = problem.ground_truth
    kernels = _backend.active()
    runner = kernels.ilat if config.algorithm is Algorithm.ILAT else kernels.iht
    args = (A, y, s, config.max_iters, config.stop_tolerance, config.divergence_limit,
            truth, config.record_history, config.record_history)
    if config.algorithm is Algorithm.ILAT:
        x, iters, diverged, residuals, errors, supports, iterates = runner(
            A, y, s, config.eta, config.max_iters, config.stop_tolerance,
            config.divergence_limit, truth, config.record_history, config.record_history)
        grad_evals = 2 * iters
    else:
        x, iters, diverged, residuals, errors, supports, iterates = runner(*args)
        grad_evals = iters
    support_history = None
    if supports is not None:
        d = A.shape[1]
        support_history = [
            thresholding.SupportSet(tuple(int(i) for i in row), d) for row in supports
        ]
    return RecoveryResult(
        estimate=x,
        iterations_run=int(iters),
        gradient_evaluations=int(grad_evals),
        diverged=bool(diverged),
        residual_history=residuals,
        error_history=errors,
        support_history=support_history,
        iterate_history=iterates,
    )


def run_iht(problem: sensing.SensingProblem, config: RecoveryConfig | None = None) -> RecoveryResult:
    if config is None:
        config = RecoveryConfig(algorithm=Algorithm.IHT)
    if Algorithm(config.algorithm) is not Algorithm.IHT:
        raise ValueError(f"config requests {config.algorithm!r}; use recover() or run_ilat()")
    return _run(problem, config)


def run_ilat(problem: sensing.SensingProblem, config: RecoveryConfig) -> RecoveryResult:
    if Algorithm(config.algorithm) is not Algorithm.ILAT:
        raise ValueError(f"config requests {config.algorithm!r}; use recover() or run_iht()")
    return _run(problem, config)


def recover(problem: sensing.SensingProblem, config: RecoveryConfig) -> RecoveryResult:
    """Dispatch on config.algorithm."""
    return _run(problem, config)


def relative_error(estimate, truth) -> float:
    estimate = linalg.as_vector(estimate)
    truth = linalg.as_vector(truth)
    if estimate.shape != truth.shape:
        raise ValueError(f"shape mismatch: estimate {estimate.shape} vs truth {truth.shape}")
    denom = float(np.linalg.norm(truth))
    if denom == 0.0:
        raise ValueError("ground truth is identically zero; relative error undefined")
    return float(np.linalg.norm(estimate - truth)) / denom


def check_success(result: RecoveryResult, truth, rel_tol: float = 1e-4) -> bool:
    """Relative-error success test against a known signal."""
    if not (rel_tol > 0.0) or not math.isfinite(rel_tol):
        raise ValueError(f"rel_tol must be finite and positive, got {rel_tol}")
    if result.diverged:
        return False
    return relative_error(result.estimate, truth) <= rel_tol
