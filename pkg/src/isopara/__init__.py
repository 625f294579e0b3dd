"""Synthesis, verification and classification of isoparametric scalar
fields: fields u on R^n whose gradient norm and Laplacian are functions of
u alone.  Every such field is, up to sign and reparametrization, either a
function of a signed distance to a hyperplane or of a distance to an
affine subspace; this package constructs both families, checks the
defining identities numerically, and recovers the geometry from point
evaluations.
"""
from .classify import (
    ClassificationReport,
    classify,
    estimate_profile,
    isoparametric_check,
    verify_reconstruction,
)
from .errors import IsoparError
from .fields import (
    CylinderField,
    GridField,
    PlaneField,
    analytic_jet,
    as_callable,
    evaluate,
    fd_jet,
    jet,
    make_cylinder,
    make_field,
    make_plane,
    operators,
    random_projection,
    sample_points,
    v_jet,
)
from .moments import MomentSystem, invert_moments, power_sums, vandermonde_jacobian
from .profile import (
    AffineProfile,
    ConstantProfile,
    PowerProfile,
    TabulatedProfile,
    TransformParams,
    ViscTransform,
    forward_map,
    harmonize_unit,
    inverse_map,
    profile_from_dict,
    profile_to_dict,
    synth_g,
    visc_transform,
)
from .spectral import (
    SpectralDecomp,
    cartan_sum,
    cartan_terms,
    frobenius_covariant,
    pseudo_inverse,
    sym_eig,
)
from .verify import (
    FlowCheck,
    flow_checks,
    harmonic_residual,
    integrate_flow,
    sign_convention,
)

__version__ = "0.1.0"

__all__ = [
    "AffineProfile",
    "ClassificationReport",
    "ConstantProfile",
    "CylinderField",
    "FlowCheck",
    "GridField",
    "IsoparError",
    "MomentSystem",
    "PlaneField",
    "PowerProfile",
    "SpectralDecomp",
    "TabulatedProfile",
    "TransformParams",
    "ViscTransform",
    "analytic_jet",
    "as_callable",
    "cartan_sum",
    "cartan_terms",
    "classify",
    "estimate_profile",
    "evaluate",
    "fd_jet",
    "flow_checks",
    "forward_map",
    "frobenius_covariant",
    "harmonic_residual",
    "harmonize_unit",
    "integrate_flow",
    "inverse_map",
    "invert_moments",
    "isoparametric_check",
    "jet",
    "make_cylinder",
    "make_field",
    "make_plane",
    "operators",
    "power_sums",
    "profile_from_dict",
    "profile_to_dict",
    "pseudo_inverse",
    "random_projection",
    "sample_points",
    "sign_convention",
    "sym_eig",
    "synth_g",
    "v_jet",
    "vandermonde_jacobian",
    "verify_reconstruction",
    "visc_transform",
]
