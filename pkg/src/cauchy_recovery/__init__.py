"""Recovery of Cauchy matrix parameters from exact and noisy data.

Public surface: the domain model (points, generators, the shift-free
representation), four recovery algorithms, Cauchyness measures with
error certificates, and a reproducible experiment harness.
"""

from .errors import (
    CauchyRecoveryError,
    DegenerateFit,
    DimensionMismatch,
    MatrixFormatError,
    NoConvergence,
    SeparationViolated,
    Singular,
    SizeTooLarge,
    SizeTooSmall,
    SpecInvalid,
    ZeroEntry,
)
from .linalg import norm_frobenius, norm_max, reciprocal, singular_values, solve_linear
from .model import (
    CauchyPoints,
    GeneratorPair,
    ReciprocalRep,
    SeparationFailure,
    cauchy_matrix,
    cauchy_matrix_from_pair,
    check_cauchy_points,
    difference_matrix,
    from_reciprocal_rep,
    normalize_generators,
    rep_map_matrix,
    rep_norm_identity,
    rep_vector,
    to_reciprocal_rep,
)
from .projectors import (
    BoundConstants,
    ProjectorSpec,
    bound_constants,
    centering_matrix,
    centering_operator_norms,
    oblique_project,
    preset_spec,
    recover_cross,
    recover_oblique,
    recover_orthogonal,
    spec_decreasing,
    spec_e1,
    spec_uniform,
)
from .displacement import (
    NormalEquationParts,
    apply_displacement,
    displacement_distance_sandwich,
    displacement_residual_frobenius,
    normal_equation_parts,
    recover_displacement,
)
from .diagnostics import (
    APosterioriCertificate,
    DiagnosticsReport,
    bordered_reciprocal,
    cauchy_distance_frobenius,
    cauchy_distance_max_oracle,
    cross_approximation_certificate,
    diagnostics_report,
    max_two_by_two_determinant,
    normalize_max_pivot,
    relative_error_certificate,
    third_singular_value,
    third_singular_value_sandwich,
)
from .experiments import (
    ExperimentRow,
    PerturbationModel,
    TimingRow,
    apply_perturbation,
    interlaced_points,
    power_law_fit,
    run_recovery_sweep,
    run_timing,
    sign_pattern,
    worst_case_matrix,
)

__version__ = "0.1.0"

RECOVERY_ALGORITHMS = {
    1: recover_cross,
    2: recover_orthogonal,
    3: recover_oblique,
    4: recover_displacement,
}
