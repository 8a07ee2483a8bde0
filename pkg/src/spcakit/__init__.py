"""Sparse PCA via SDP relaxation, randomized rounding, and exact baselines."""

from .baselines import (
    BaselineResult,
    brute_force_opt,
    chan,
    greedy,
    local_search,
    low_rank_spannogram,
)
from .bench import BenchConfig, BenchRecord, MatrixSource, chan_gap, emit_report, run_bench
from .certificates import (
    KktCertificate,
    KktReport,
    RankOneInstance,
    SpectralConditionReport,
    SsrReport,
    build_rank_one_instance,
    check_rank_one_conditions,
    check_sparse_top_eigvec,
    curvature_gap_check,
    ssr_report,
    verify_kkt,
)
from .estimator import RandomizedSparsePCA
from .linalg import (
    EigenPair,
    EigenSolverError,
    check_symmetric,
    full_eigendecomposition,
    matrix_norm,
    matrix_sqrt,
    principal_submatrix,
    project_l1_ball,
    top_eigpair,
)
from .matio import load_matrix, save_matrix
from .rounding import (
    RoundingProbabilities,
    SparseSolution,
    greedy_diagonal_init,
    multi_round,
    round_once,
    rounding_probabilities,
    sample_support,
)
from .sdp import CgalConfig, SdpSolution, feasibility_residuals, holder_upper_bound, solve_spca_sdp
from .statmodel import (
    ModelInstance,
    ModelSpec,
    RatioExperiment,
    RecoveryMetrics,
    deterministic_robustness_check,
    error_decomposition,
    gen_model,
    n_star,
    ratio_experiment,
    recovery_metrics,
    sample_size_threshold,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineResult",
    "BenchConfig",
    "BenchRecord",
    "CgalConfig",
    "EigenPair",
    "EigenSolverError",
    "KktCertificate",
    "KktReport",
    "MatrixSource",
    "ModelInstance",
    "ModelSpec",
    "RandomizedSparsePCA",
    "RankOneInstance",
    "RatioExperiment",
    "RecoveryMetrics",
    "RoundingProbabilities",
    "SdpSolution",
    "SparseSolution",
    "SpectralConditionReport",
    "SsrReport",
    "brute_force_opt",
    "build_rank_one_instance",
    "chan",
    "chan_gap",
    "check_rank_one_conditions",
    "check_sparse_top_eigvec",
    "check_symmetric",
    "curvature_gap_check",
    "deterministic_robustness_check",
    "emit_report",
    "error_decomposition",
    "feasibility_residuals",
    "full_eigendecomposition",
    "gen_model",
    "greedy",
    "greedy_diagonal_init",
    "holder_upper_bound",
    "load_matrix",
    "local_search",
    "low_rank_spannogram",
    "matrix_norm",
    "matrix_sqrt",
    "multi_round",
    "n_star",
    "principal_submatrix",
    "project_l1_ball",
    "ratio_experiment",
    "recovery_metrics",
    "round_once",
    "rounding_probabilities",
    "run_bench",
    "sample_size_threshold",
    "sample_support",
    "save_matrix",
    "solve_spca_sdp",
    "ssr_report",
    "top_eigpair",
    "verify_kkt",
]
