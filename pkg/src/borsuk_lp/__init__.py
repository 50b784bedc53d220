"""Certified lower bounds on Borsuk numbers of l_p^d from lifted 0/1 vectors."""

from .asymptotic import AsymptoticOptimum, emit_curve, exponent_c, limit_p_infinity, optimize_c, tau_limit
from .bounds import (
    BoundCertificate,
    Rejection,
    adjust_lambda,
    find_t1,
    integer_argmax_check,
    search_best_bound,
    theorem1_bound,
    vertex_t0,
)
from .lifting import (
    LiftedConfiguration,
    Parameters,
    QuadraticForm,
    distance_from_intersection,
    enumerate_V,
    lift,
    lp_distance,
    pair_type_counts,
    quadratic_coefficients,
)
from .numeric import binary_entropy, binomial_exact, is_prime_power, log2_binomial

__version__ = "0.1.0"
