"""Minimum-error discrimination of multipartite states under separable
measurements: block-positivity search, entanglement-witness detection,
dual certificates for the separable optimum, and witness-based ensemble
construction."""

__version__ = "0.1.0"

from .cones import (
    EXACT_BLOCK_POSITIVE,
    NO_VIOLATION_FOUND,
    VIOLATED,
    BlockPositivityVerdict,
    EwVerdict,
    ProductOperatorSum,
    decide_block_positivity,
    detect_ew,
    is_block_positive_rank1_shift,
    max_product_overlap,
    min_product_expectation,
    rank1_shift_decomposition,
    trace_nonneg_check,
)
from .discrimination import (
    DiscriminationResult,
    check_optimality,
    helstrom_two_state,
    solve_pg_iterative,
    success_probability,
)
from .ensembles import (
    Ensemble,
    Measurement,
    auto_lambda,
    construct_n_state,
    construct_two_state,
    example1,
    example2,
    example3,
)
from .errors import (
    CertificateMissingError,
    DimsMismatchError,
    EigensolverError,
    HermiticityError,
    PreconditionError,
    SepdiscError,
    SizeOverflowError,
    TraceMismatchError,
)
from .kernels import backend_name
from .operators import (
    Dims,
    HermitianOperator,
    ProductVector,
    StateVector,
    basis_ket,
    eig_hermitian,
    ghz_state,
    is_psd,
    min_eigenvalue,
    partial_transpose,
    product_basis_state,
    tensor,
    trace_inner,
)
from .sep_bounds import (
    DualAnalysis,
    VerificationReport,
    analyze_dual,
    certify_dominance_gap,
    certify_slackness,
    certify_strict_gap,
    check_pivot_dominance,
    probe_dominance_uniqueness,
    verify_equality_certificate,
)

__all__ = [
    "__version__",
    "BlockPositivityVerdict",
    "CertificateMissingError",
    "DimsMismatchError",
    "DiscriminationResult",
    "Dims",
    "DualAnalysis",
    "EigensolverError",
    "Ensemble",
    "EwVerdict",
    "EXACT_BLOCK_POSITIVE",
    "HermiticityError",
    "HermitianOperator",
    "Measurement",
    "NO_VIOLATION_FOUND",
    "PreconditionError",
    "ProductOperatorSum",
    "ProductVector",
    "SepdiscError",
    "SizeOverflowError",
    "StateVector",
    "TraceMismatchError",
    "VIOLATED",
    "VerificationReport",
    "analyze_dual",
    "auto_lambda",
    "backend_name",
    "basis_ket",
    "certify_dominance_gap",
    "certify_slackness",
    "certify_strict_gap",
    "check_optimality",
    "check_pivot_dominance",
    "construct_n_state",
    "construct_two_state",
    "decide_block_positivity",
    "detect_ew",
    "eig_hermitian",
    "example1",
    "example2",
    "example3",
    "ghz_state",
    "helstrom_two_state",
    "is_block_positive_rank1_shift",
    "is_psd",
    "max_product_overlap",
    "min_eigenvalue",
    "min_product_expectation",
    "partial_transpose",
    "probe_dominance_uniqueness",
    "product_basis_state",
    "rank1_shift_decomposition",
    "solve_pg_iterative",
    "success_probability",
    "tensor",
    "trace_inner",
    "trace_nonneg_check",
    "verify_equality_certificate",
]
