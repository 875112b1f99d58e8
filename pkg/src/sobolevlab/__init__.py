"""sobolevlab: numerical laboratory for the sharp p-Sobolev inequality.

Extremal bubbles, radial quadrature norms, symmetric decreasing
rearrangement, weak Lebesgue norms, projection onto the extremal manifold,
deficit and remainder functionals, and family-wise inequality checks.
"""

from .bubble import (
    BubbleConstants,
    BubbleSpec,
    bubble_constants,
    bubble_derivative,
    bubble_profile,
    bubble_residual,
    bubble_value,
    normalization_gamma,
    tail_integral,
)
from .deficit import (
    DeficitReport,
    HypothesisError,
    ProofConstants,
    build_report,
    deficit,
    distance_cap,
    lebesgue_remainder,
    proof_constants,
    stability_functionals,
    tail_lower_bound_check,
    unit_lower_bound_crit,
    upper_expansion_bound,
    weak_norm_distance_check,
    weak_remainder,
)
from .experiments import ExperimentError, ScanSummary, SlopeFit, constant_scan, sharpness_experiment
from .families import FamilySpec, generate_family, perturbation_direction, perturbed_bubble, truncated_bubble
from .norms import grad_lp_norm, lq_norm, weak_norm, weak_norm_holder_bound, weak_to_strong
from .params import ParameterDomainError, Params, ball_volume, derive_params, sphere_measure
from .pointwise import (
    ConstantEstimate,
    EstimationFailureError,
    SingularInputError,
    VectorSample,
    estimate_quadratic_lower_const,
    estimate_taylor_upper_const,
    quadratic_lower_margin,
    scalar_lower_margin,
    taylor_upper_margin,
)
from .profiles import (
    DomainBall,
    RadialProfile,
    bump_profile,
    constant_profile,
    linear_combination,
    load_profile_csv,
    plateau_profile,
    sampled_profile,
    save_profile_csv,
)
from .projection import (
    Decomposition,
    DegeneratePerturbationError,
    ProjectionResult,
    decompose,
    decomposition_profile,
    grid_minimum,
    make_orthogonal_perturbation,
    orthogonality_residuals,
    project,
    tangent_basis,
)
from .quadrature import QuadratureError
from .rearrangement import rearrange, superlevel_measure

__all__ = [name for name in dir() if not name.startswith("_")]
