"""Moments of Hardy's Z function over short critical-line windows.

Evaluators for Z, Z', zeta, and zeta' on and near the critical line;
zero and stationary-point location with interlacing checks; adaptive
moment integrals and the per-gap identity tying them to extrema sums;
divisor-sum and Euler-product apparatus; a large-value measure scan.
"""

from .config import DEFAULT_CONFIG, RS_MIN_T, T_FLOOR, EvalConfig
from .errors import (
    DomainError,
    GammaPoleError,
    HardyzError,
    InterlacingError,
    MissedZerosError,
    NonFiniteIntegrandError,
    PrecisionError,
    QuadratureError,
    SignAmbiguityError,
)
from .zeta_core import (
    chi,
    chi_log_deriv,
    digamma,
    log_gamma,
    rs_theta,
    rs_theta_deriv,
    zeta_deriv_em,
    zeta_em,
    zeta_with_deriv_em,
)
from .hardy import (
    HardyValue,
    hardy_z,
    hardy_z_deriv,
    hardy_z_deriv_fast,
    hardy_z_rs,
    hardy_z_vec,
    rs_error_envelope,
    rs_main_terms,
    z1,
)
from .zeros import (
    Window,
    ZeroRecord,
    ZeroSet,
    default_scan_step,
    gram_points,
    locate_zeros,
    stationary_points,
    zero_count_formula,
)
from .arith import (
    DivisorTable,
    EulerProductResult,
    cached_divisor_table,
    dirichlet_poly,
    divisor_square_sum,
    divisor_table,
    mean_square_A,
    ramachandra_constant,
    tilde_divisor,
)
from .moments import (
    ExtremaSum,
    MeasureEstimate,
    MomentEstimate,
    abs_moment_zprime_z,
    extrema_sum,
    gap_identity_check,
    integrate_adaptive,
    large_value_measure,
    measure_decay_fit,
    moment_z_deriv,
    moment_zeta,
    moment_zeta_deriv,
    moment_zprime_zk,
    normalized_Mk,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_CONFIG",
    "RS_MIN_T",
    "T_FLOOR",
    "EvalConfig",
    "HardyzError",
    "DomainError",
    "GammaPoleError",
    "PrecisionError",
    "MissedZerosError",
    "InterlacingError",
    "SignAmbiguityError",
    "QuadratureError",
    "NonFiniteIntegrandError",
    "chi",
    "chi_log_deriv",
    "digamma",
    "log_gamma",
    "rs_theta",
    "rs_theta_deriv",
    "zeta_em",
    "zeta_deriv_em",
    "zeta_with_deriv_em",
    "HardyValue",
    "hardy_z",
    "hardy_z_rs",
    "hardy_z_vec",
    "hardy_z_deriv",
    "hardy_z_deriv_fast",
    "rs_main_terms",
    "rs_error_envelope",
    "z1",
    "Window",
    "ZeroRecord",
    "ZeroSet",
    "zero_count_formula",
    "default_scan_step",
    "gram_points",
    "locate_zeros",
    "stationary_points",
    "DivisorTable",
    "EulerProductResult",
    "divisor_table",
    "cached_divisor_table",
    "tilde_divisor",
    "divisor_square_sum",
    "dirichlet_poly",
    "mean_square_A",
    "ramachandra_constant",
    "MomentEstimate",
    "ExtremaSum",
    "MeasureEstimate",
    "integrate_adaptive",
    "moment_zeta",
    "moment_zeta_deriv",
    "moment_z_deriv",
    "moment_zprime_zk",
    "abs_moment_zprime_z",
    "gap_identity_check",
    "extrema_sum",
    "normalized_Mk",
    "large_value_measure",
    "measure_decay_fit",
    "__version__",
]
