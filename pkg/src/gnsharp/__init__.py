"""Numerical verification toolkit for sharp interpolation constants and
scalar-curvature rigidity expansions on radial model manifolds."""

from .constants import (
    CCoefficients,
    CutoffJet,
    ExponentSet,
    GNParams,
    MINUS,
    PLUS,
    bp_jet,
    c_coefficients,
    exponents,
    flat_energy_constant,
    flat_mass_constant,
    j_coefficient,
    moment_ratio_assembly,
    sharp_constant,
    sigma,
    tau_star,
    zeta_chi,
)
from .expansion import (
    SeriesFit,
    L_series,
    W_series,
    fit_series,
    predict_L_coeffs,
    predict_W_coeffs,
    series_report,
    tau_slope,
    verify_DA_ratios,
)
from .functionals import (
    COMPACT,
    DECAY,
    CutoffSpec,
    RadialProfile,
    SmoothProfile,
    build_cutoff,
    conformal_invariance_check,
    dirichlet_energy,
    extremal_grid_profile,
    gn_quotient,
    h_extremal,
    mass_integral,
    profile_from_csv,
    profile_to_csv,
    yamabe_type_quotient,
)
from .geometry import (
    CurvatureAtPole,
    RadialMetric,
    conformal_factor_from_table,
    conformal_radial,
    curvature_at_pole,
    dirichlet_weight,
    euclidean,
    scalar_curvature,
    schwarzschild_factor,
    space_form,
    volume_density,
)
from .ranges import (
    CASES,
    AlphaRange,
    F_eval,
    KappaResult,
    admissible_range,
    kappa,
    quadratic_condition,
)
from .specfun import (
    MomentSpec,
    moment_closed,
    moment_quad,
    script_beta,
    unit_ball_volume,
    unit_sphere_area,
)
from .symmetrize import (
    MeasuredFunction,
    dirichlet_check,
    distribution_function,
    histogram_from_csv,
    histogram_to_csv,
    norms_check,
    rearrange,
)
from .varmin import (
    INIT_BUMP,
    INIT_EXTREMAL,
    INIT_RANDOM,
    MinimizeConfig,
    MinimizeResult,
    minimize_quotient,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaRange",
    "CASES",
    "CCoefficients",
    "COMPACT",
    "CurvatureAtPole",
    "CutoffJet",
    "CutoffSpec",
    "DECAY",
    "ExponentSet",
    "F_eval",
    "GNParams",
    "INIT_BUMP",
    "INIT_EXTREMAL",
    "INIT_RANDOM",
    "KappaResult",
    "L_series",
    "MINUS",
    "MeasuredFunction",
    "MinimizeConfig",
    "MinimizeResult",
    "MomentSpec",
    "PLUS",
    "RadialMetric",
    "RadialProfile",
    "SeriesFit",
    "SmoothProfile",
    "W_series",
    "admissible_range",
    "bp_jet",
    "build_cutoff",
    "c_coefficients",
    "conformal_factor_from_table",
    "conformal_invariance_check",
    "conformal_radial",
    "curvature_at_pole",
    "dirichlet_check",
    "dirichlet_energy",
    "dirichlet_weight",
    "distribution_function",
    "euclidean",
    "exponents",
    "extremal_grid_profile",
    "fit_series",
    "flat_energy_constant",
    "flat_mass_constant",
    "gn_quotient",
    "h_extremal",
    "histogram_from_csv",
    "histogram_to_csv",
    "j_coefficient",
    "kappa",
    "mass_integral",
    "minimize_quotient",
    "moment_closed",
    "moment_quad",
    "moment_ratio_assembly",
    "norms_check",
    "predict_L_coeffs",
    "predict_W_coeffs",
    "profile_from_csv",
    "profile_to_csv",
    "quadratic_condition",
    "rearrange",
    "scalar_curvature",
    "schwarzschild_factor",
    "script_beta",
    "series_report",
    "sharp_constant",
    "sigma",
    "space_form",
    "tau_slope",
    "tau_star",
    "unit_ball_volume",
    "unit_sphere_area",
    "verify_DA_ratios",
    "volume_density",
    "yamabe_type_quotient",
    "zeta_chi",
]
