"""energymax: maximal energy integrals of convex bodies, stable-measure
upper bounds, and isometric spherical embeddings of snowflaked metrics."""

__version__ = "0.1.0"

from ._backend import USING_COMPILED, backend_name
from .bodies import (
    BodySpec,
    RngStream,
    body_point_set,
    dual_norm,
    mean_width_power,
    pi_p_ellipsoid,
    sample_sphere,
    sphere_lr_moment,
    width,
)
from .discrete_energy import (
    DuplicatePointsError,
    EnergyReport,
    NotMassOneMaximumError,
    SignedAtomicMeasure,
    SingularDistanceMatrixError,
    SolverError,
    distance_power_matrix,
    energy_of_measure,
    estimate_mp,
    max_energy_in_body,
    max_energy_on_points,
)
from .embedding import (
    RadiusTooSmallError,
    SphericalEmbedding,
    embed_snowflake,
    fit_power_law,
    radius_closed_form_ball,
    radius_growth_report,
    schoenberg_radius_points,
)
from .specfun import (
    MomentConstants,
    b_coeff,
    closed_form_M_ball,
    gaussian_moment,
    log_gamma,
    moment_constants,
    sphere_abs_moment,
)
from .stable import (
    StableConfig,
    c_rp,
    gub_upper_bound,
    sample_stable,
    sample_stable_scalar,
    verify_stability_identity,
)

__all__ = [
    "__version__",
    "USING_COMPILED",
    "backend_name",
    "BodySpec",
    "RngStream",
    "body_point_set",
    "dual_norm",
    "mean_width_power",
    "pi_p_ellipsoid",
    "sample_sphere",
    "sphere_lr_moment",
    "width",
    "DuplicatePointsError",
    "EnergyReport",
    "NotMassOneMaximumError",
    "SignedAtomicMeasure",
    "SingularDistanceMatrixError",
    "SolverError",
    "distance_power_matrix",
    "energy_of_measure",
    "estimate_mp",
    "max_energy_in_body",
    "max_energy_on_points",
    "RadiusTooSmallError",
    "SphericalEmbedding",
    "embed_snowflake",
    "fit_power_law",
    "radius_closed_form_ball",
    "radius_growth_report",
    "schoenberg_radius_points",
    "MomentConstants",
    "b_coeff",
    "closed_form_M_ball",
    "gaussian_moment",
    "log_gamma",
    "moment_constants",
    "sphere_abs_moment",
    "StableConfig",
    "c_rp",
    "gub_upper_bound",
    "sample_stable",
    "sample_stable_scalar",
    "verify_stability_identity",
]
