"""Combined-outcome design: one test on ``Y1 + Y2``.

Rejection can happen when neither outcome is affected on its own but their
sum is, so a significant result says nothing about either outcome
separately.
"""
from __future__ import annotations

from dataclasses import dataclass

from ._design import (cluster_size_real, clusters_real, one_df_spec, outcome_lambda,
                      smallest_k_for_power)
from .numerics import QuadratureConfig, power_from_ncp, required_ncp
from .params import DesignInputs, MethodResult, ceil_count, validate
from .variance import combined_icc, combined_variance

INTERPRETATION_CAVEAT = (
    "combined outcome: a rejection may be driven by the sum of the two outcomes even "
    "when neither outcome is affected on its own")


@dataclass(frozen=True)
class CombinedParameters:
    """Effect, total variance and ICC of ``Y1 + Y2``; ``derived`` flags fields not supplied."""

    beta_c: float
    sigma_c_sq: float
    rho0_c: float
    derived: tuple[str, ...] = ()


def combined_parameters(inputs: DesignInputs) -> CombinedParameters:
    """Combined-outcome parameters, taking any directly supplied override first."""
    o, v, c = inputs.combined, inputs.variances, inputs.corr
    derived = []
    beta_c = o.beta_c
    if beta_c is None:
        beta_c = inputs.effects.beta1 + inputs.effects.beta2
        derived.append("beta_c")
    sigma_c_sq = o.sigma_c_sq
    if sigma_c_sq is None:
        sigma_c_sq = combined_variance(v.sigma1_sq, v.sigma2_sq, c.rho2_12)
        derived.append("sigma_c_sq")
    rho0_c = o.rho0_c
    if rho0_c is None:
        rho0_c = combined_icc(v.sigma1_sq, v.sigma2_sq, c)
        derived.append("rho0_c")
    return CombinedParameters(beta_c, sigma_c_sq, rho0_c, tuple(derived))


def _extras(cp: CombinedParameters, vif: float) -> dict[str, float]:
    return {"beta_c": cp.beta_c, "sigma_c_sq": cp.sigma_c_sq, "rho0_c": cp.rho0_c, "vif_c": vif}


def combined_lambda(inputs: DesignInputs, cp: CombinedParameters | None = None) -> float:
    cp = combined_parameters(inputs) if cp is None else cp
    vif = 1.0 + (inputs.m - 1.0) * cp.rho0_c
    return outcome_lambda(cp.beta_c, cp.sigma_c_sq, vif, inputs.m, inputs.n_treated,
                          inputs.alloc_factor)


def combined_power(inputs: DesignInputs, dist: str = "chisq",
                   config: QuadratureConfig | None = None) -> MethodResult:
    """Power at the given (K, m); ``dist="f"`` refers the statistic to F(1, 2K - 4)."""
    validate(inputs)
    cp = combined_parameters(inputs)
    vif = 1.0 + (inputs.m - 1.0) * cp.rho0_c
    spec = one_df_spec(dist, inputs.n_treated, inputs.r)
    lam = combined_lambda(inputs, cp)
    power, crit = power_from_ncp(lam, inputs.alpha, spec, config)
    return MethodResult("combined_outcome", spec, power=power, lam=lam, critical_value=crit,
                        extras=_extras(cp, vif))


def combined_clusters(inputs: DesignInputs, dist: str = "chisq",
                      config: QuadratureConfig | None = None) -> MethodResult:
    """Clusters for the target power: closed form under chi-square, integer search under F."""
    validate(inputs)
    cp = combined_parameters(inputs)
    vif = 1.0 + (inputs.m - 1.0) * cp.rho0_c
    if dist == "chisq":
        spec = one_df_spec(dist, 0, inputs.r)
        ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
        k_real = clusters_real(ncp, cp.beta_c, cp.sigma_c_sq, vif, inputs.m, inputs.alloc_factor)
        k = ceil_count(k_real)
    else:
        per_cluster = outcome_lambda(cp.beta_c, cp.sigma_c_sq, vif, inputs.m, 1.0,
                                     inputs.alloc_factor)
        k = smallest_k_for_power(per_cluster, inputs.alpha, inputs.target_power, dist,
                                 inputs.r, config)
        k_real = float(k)
        spec = one_df_spec(dist, k, inputs.r)
        ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
    return MethodResult("combined_outcome", spec, K_required=k, K_real=k_real, lam=ncp,
                        K2_required=None if inputs.equal_allocation else ceil_count(inputs.r * k),
                        extras=_extras(cp, vif))


def combined_cluster_size(inputs: DesignInputs, dist: str = "chisq",
                          config: QuadratureConfig | None = None) -> MethodResult:
    """Cluster size for the target power with K fixed.

    Raises
    ------
    InfeasibleDesignError
        When K is too small for any cluster size.
    """
    validate(inputs)
    cp = combined_parameters(inputs)
    spec = one_df_spec(dist, inputs.n_treated, inputs.r)
    ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
    m_real = cluster_size_real(ncp, cp.beta_c, cp.sigma_c_sq, cp.rho0_c, inputs.n_treated,
                               inputs.alloc_factor)
    m = max(2, ceil_count(m_real))
    return MethodResult("combined_outcome", spec, m_required=m, m_real=m_real, lam=ncp,
                        extras=_extras(cp, 1.0 + (m_real - 1.0) * cp.rho0_c))
