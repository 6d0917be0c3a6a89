"""Special functions, quantiles, orthant probabilities and root solvers."""
from .backend import BACKEND, available_backends
from .core import (
    DistributionSpec,
    QuadratureConfig,
    bvn_upper_orthant,
    bvt_upper_orthant,
    central_chisq_cdf,
    central_chisq_quantile,
    central_f_quantile,
    critical_value,
    noncentral_chisq_cdf,
    noncentral_f_cdf,
    power_from_ncp,
    required_ncp,
    solve_root,
    std_normal_cdf,
    std_normal_quantile,
    t_quantile,
    upper_tail,
)

__all__ = [
    "BACKEND",
    "DistributionSpec",
    "QuadratureConfig",
    "available_backends",
    "bvn_upper_orthant",
    "bvt_upper_orthant",
    "central_chisq_cdf",
    "central_chisq_quantile",
    "central_f_quantile",
    "critical_value",
    "noncentral_chisq_cdf",
    "noncentral_f_cdf",
    "power_from_ncp",
    "required_ncp",
    "solve_root",
    "std_normal_cdf",
    "std_normal_quantile",
    "t_quantile",
    "upper_tail",
]
