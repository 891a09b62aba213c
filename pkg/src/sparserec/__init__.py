"""Sparse recovery from compressed measurements with look-ahead thresholding.

The package centers on two iterative algorithms: classical iterative hard
thresholding, which keeps the s largest magnitudes after each gradient step,
and its look-ahead variant, which spends a second gradient evaluation per
iteration to score coordinates by where they are heading rather than where
they are. Supporting modules generate seeded Gaussian instances, compute
restricted-isometry diagnostics and contraction certificates, and run seeded
Monte Carlo sweeps.

Hot kernels run on a compiled extension when it is built, with a pure numpy
fallback selected automatically at import; see `backend_name()`.
"""

from ._backend import available_backends, backend_name
from .analysis import (
    Certificate,
    L0Result,
    MomentPrediction,
    MomentStats,
    NoisyCertificate,
    TheoryReport,
    avg_case_rho,
    eta_optimal,
    eta_valid_range_upper,
    expected_frob_gram,
    expected_frob_residual,
    moment_prediction,
    monte_carlo_moments,
    noiseless_certificate,
    noisy_certificate,
    oracle_l0_recover,
    oracle_nearest_sparse_to,
    rip_constant_exact,
    rip_constant_sampled,
    theory_report,
)
from .harness import (
    ExperimentKind,
    ExperimentSpec,
    TrialRecord,
    aggregate,
    persist_experiment,
    read_results_csv,
    read_spec_json,
    run_constant_compute,
    run_experiment,
    run_noisy_error,
    run_phase_transition,
    run_threshold_compare,
    write_results_csv,
    write_spec_json,
    write_summary_csv,
)
from .linalg import (
    adjoint_matvec,
    frobenius_norm_sq,
    load_matrix,
    load_vector,
    matvec,
    operator_norm,
    save_matrix,
    save_vector,
)
from .recovery import (
    Algorithm,
    RecoveryConfig,
    RecoveryResult,
    check_success,
    gradient_step,
    recover,
    relative_error,
    run_iht,
    run_ilat,
)
from .sensing import (
    Normalization,
    SensingProblem,
    VarianceMode,
    add_noise,
    build_problem,
    effective_error,
    gaussian_matrix,
    load_problem,
    normalize_operator_norm,
    random_coisometry,
    random_sparse_signal,
    save_problem,
)
from .thresholding import (
    LatScores,
    SupportSet,
    cost_gradient,
    cost_value,
    hard_threshold,
    lat_scores,
    lat_threshold,
    look_ahead_point,
    project,
    surrogate_value,
)

__version__ = "0.1.0"

__all__ = [
    "Algorithm",
    "Certificate",
    "ExperimentKind",
    "ExperimentSpec",
    "L0Result",
    "LatScores",
    "MomentPrediction",
    "MomentStats",
    "NoisyCertificate",
    "Normalization",
    "RecoveryConfig",
    "RecoveryResult",
    "SensingProblem",
    "SupportSet",
    "TheoryReport",
    "TrialRecord",
    "VarianceMode",
    "add_noise",
    "adjoint_matvec",
    "aggregate",
    "available_backends",
    "avg_case_rho",
    "backend_name",
    "build_problem",
    "check_success",
    "cost_gradient",
    "cost_value",
    "effective_error",
    "eta_optimal",
    "eta_valid_range_upper",
    "expected_frob_gram",
    "expected_frob_residual",
    "frobenius_norm_sq",
    "gaussian_matrix",
    "gradient_step",
    "hard_threshold",
    "lat_scores",
    "lat_threshold",
    "load_matrix",
    "load_problem",
    "load_vector",
    "look_ahead_point",
    "matvec",
    "moment_prediction",
    "monte_carlo_moments",
    "noiseless_certificate",
    "noisy_certificate",
    "normalize_operator_norm",
    "operator_norm",
    "oracle_l0_recover",
    "oracle_nearest_sparse_to",
    "persist_experiment",
    "project",
    "random_coisometry",
    "random_sparse_signal",
    "read_results_csv",
    "read_spec_json",
    "recover",
    "relative_error",
    "rip_constant_exact",
    "rip_constant_sampled",
    "run_constant_compute",
    "run_experiment",
    "run_iht",
    "run_ilat",
    "run_noisy_error",
    "run_phase_transition",
    "run_threshold_compare",
    "save_matrix",
    "save_problem",
    "save_vector",
    "surrogate_value",
    "theory_report",
    "write_results_csv",
    "write_spec_json",
    "write_summary_csv",
]
