"""Schatten-norm inequalities for block positive semidefinite matrices.

Norm compressions, the two-block bound and its reverse, classical companion
inequalities, matrix means with the Thompson metric, the contractive
fixed-point maps of the stationarity analysis, and a seeded randomized harness.
"""
from .errors import (
    ConditioningError,
    ConvergenceError,
    DomainError,
    MatrixFormatError,
    NormCompError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    NumericalBreakdownError,
    RegularizationWarning,
    ShapeError,
    SingularMatrixError,
)
from .harness import HarnessConfig, HarnessSummary, run_harness, run_instance
from .inequalities import (
    InequalityReport,
    boundary_sweep,
    check_bhatia_kittaneh,
    check_clarkson_mccarthy,
    check_diag_sum,
    check_general,
    check_horn_mathias,
    check_king,
    check_lieb_thirring,
    check_pinching,
    check_reverse,
    check_theorem1,
    king_counterexample,
    nonsharpness_demo,
    sharpness_witness,
)
from .linalg import eig_hermitian, jacobi_eigh, matrix_power, polar_decompose, psd_decompose
from .means import geometric_mean, log_majorizes, power_mean, solve_riccati, thompson_distance
from .norms import (
    BlockMatrix,
    Partition,
    norm_compression,
    pinch_diagonal,
    schatten_norm,
    singular_values,
)
from .rng import RandomSpec, SplitMix64, derive_seed, random_block_psd, random_pd, random_psd
from .stationarity import (
    IterationTrace,
    beta,
    f_gradient,
    f_objective,
    iterate_phi,
    iterate_psi,
    maximize_over_B_check,
    phi_map,
    psi_map,
)

__version__ = "0.1.0"
