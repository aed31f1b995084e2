"""Harmonic pre-Schwarzian derivatives, hyperbolic norms and their sharpness checks.

The usual entry points::

    from harmonic_presch import harmonic_koebe, pre_schwarzian, norm_estimate
    pre_schwarzian(harmonic_koebe(), 0.0).p      # 5
    norm_estimate(harmonic_koebe()).sup_lower_bound  # about 7
"""

from .catalog import (
    Decomposed,
    DirectMap,
    analytic,
    cayley,
    disk_automorphism,
    exterior_counterexample,
    f_alpha,
    f_k_family,
    family,
    half_plane_map,
    halfplane_remark3,
    harmonic_koebe,
    k_alpha,
    reciprocal_map,
    reflect,
    slit_plane_example,
    subordination_psi,
)
from .checks import (
    CheckResult,
    MajorizationResult,
    check_boundary_distance_bound,
    check_comparison,
    check_distortion,
    check_majorization,
    check_norm_bound,
    check_norm_comparison,
    check_pointwise_disk,
    cor4_derivative,
    majorization_radius,
)
from .errors import DomainError, NotSensePreservingError, ParameterError, PreschError, SingularityError
from .hyperbolic import (
    ExteriorDisk,
    PuncturedDisk,
    RightHalfPlane,
    RiemannMapped,
    SlitPlane,
    UnitDisk,
    osgood_infimum,
)
from .norms import GridSpec, NormEstimate, divergence_witness, norm_estimate, radial_profile, weighted_modulus
from .presch import (
    PreschValue,
    affine_post,
    affine_transform_A_eps,
    compose_conformal,
    dilatation,
    family_shift_S,
    h_plus_eps_g,
    jacobian,
    koebe_transform,
    pre_schwarzian,
    subordinate,
)
from .registry import format_complex, parse_complex, parse_domain, parse_map
from .report import DEFAULT_CONFIG, run_report

__version__ = "0.1.0"
