"""Single 1-DF combined test for clustered data.

The statistic ``(Z1 + Z2)^2 / (2 (1 + Corr(Z1, Z2)))`` pools the two
per-outcome Wald statistics; under clustering their correlation is
``VIF12 / sqrt(VIF1 VIF2)`` whatever the allocation ratio.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from ._design import M_CAP, one_df_spec, smallest_k_for_power, solve_m
from .errors import InfeasibleDesignError, SignConstraintError
from .numerics import QuadratureConfig, power_from_ncp, required_ncp
from .params import CorrelationStructure, DesignInputs, MethodResult, ceil_count, validate, vif_set


@dataclass(frozen=True)
class ZCorrelation:
    """Correlation between the two per-outcome Z statistics."""

    value: float

    def __post_init__(self) -> None:
        if not -1.0 < self.value < 1.0:
            raise ValueError(f"Z correlation must lie in (-1, 1), got {self.value}")


def z_correlation(corr: CorrelationStructure, m: float) -> ZCorrelation:
    v = vif_set(corr, m)
    return ZCorrelation(v.vif12 / math.sqrt(v.vif1 * v.vif2))


def _check_signs(inputs: DesignInputs) -> None:
    b1, b2 = inputs.effects.beta1, inputs.effects.beta2
    if b1 * b2 < 0.0:
        raise SignConstraintError(
            f"the 1-DF combined test needs both effects in the same direction "
            f"(beta1={b1}, beta2={b2}); reverse the coding of one outcome so that "
            f"both effects share a sign")


def _lambda_at(inputs: DesignInputs, m: float, k1: float) -> float:
    # Squared per-outcome Z statistics at (m, K1), then the pooled noncentrality.
    v = vif_set(inputs.corr, m)
    e, s, a = inputs.effects, inputs.variances, inputs.alloc_factor
    z1 = math.sqrt(m * e.beta1 * e.beta1 * k1 / (a * s.sigma1_sq * v.vif1))
    z2 = math.sqrt(m * e.beta2 * e.beta2 * k1 / (a * s.sigma2_sq * v.vif2))
    rho = v.vif12 / math.sqrt(v.vif1 * v.vif2)
    return (z1 + z2) ** 2 / (2.0 * (1.0 + rho))


def single1df_lambda(inputs: DesignInputs) -> float:
    _check_signs(inputs)
    return _lambda_at(inputs, inputs.m, inputs.n_treated)


def single1df_power(inputs: DesignInputs, dist: str = "chisq",
                    config: QuadratureConfig | None = None) -> MethodResult:
    validate(inputs)
    lam = single1df_lambda(inputs)
    spec = one_df_spec(dist, inputs.n_treated, inputs.r)
    power, crit = power_from_ncp(lam, inputs.alpha, spec, config)
    rho = z_correlation(inputs.corr, inputs.m).value
    return MethodResult("single_1df", spec, power=power, lam=lam, critical_value=crit,
                        vifs=vif_set(inputs.corr, inputs.m), extras={"z_correlation": rho})


def single1df_clusters(inputs: DesignInputs, dist: str = "chisq",
                       config: QuadratureConfig | None = None) -> MethodResult:
    """Clusters for the target power; the noncentrality is linear in K."""
    validate(inputs)
    _check_signs(inputs)
    per_cluster = _lambda_at(inputs, inputs.m, 1.0)
    if per_cluster == 0.0:
        raise InfeasibleDesignError("both effects are zero; no K reaches the target")
    if dist == "chisq":
        spec = one_df_spec(dist, 0, inputs.r)
        ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
        k_real = ncp / per_cluster
        k = ceil_count(k_real)
    else:
        k = smallest_k_for_power(per_cluster, inputs.alpha, inputs.target_power, dist,
                                 inputs.r, config)
        k_real = float(k)
        spec = one_df_spec(dist, k, inputs.r)
        ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
    return MethodResult("single_1df", spec, K_required=k, K_real=k_real, lam=ncp,
                        K2_required=None if inputs.equal_allocation else ceil_count(inputs.r * k),
                        extras={"z_correlation": z_correlation(inputs.corr, inputs.m).value})


def single1df_cluster_size(inputs: DesignInputs, dist: str = "chisq",
                           config: QuadratureConfig | None = None) -> MethodResult:
    """Cluster size for the target power, solved numerically with K fixed."""
    validate(inputs)
    _check_signs(inputs)
    spec = one_df_spec(dist, inputs.n_treated, inputs.r)
    ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
    k1 = inputs.n_treated
    m_real = solve_m(lambda m: _lambda_at(inputs, m, k1) - ncp, "single 1-DF test",
                     limit=lambda: _lambda_at(inputs, M_CAP, k1))
    m = max(2, ceil_count(m_real))
    return MethodResult("single_1df", spec, m_required=m, m_real=m_real, lam=ncp,
                        extras={"z_correlation": z_correlation(inputs.corr, m_real).value})
