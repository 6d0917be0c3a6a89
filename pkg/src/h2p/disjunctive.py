"""Disjunctive 2-DF Wald test of ``beta1 = beta2 = 0``.

Power is the chance of detecting an effect on at least one outcome. The
statistic is referred to chi-square(2) or, for a finite number of clusters,
to F(2, 2K - 4).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

from ._design import M_CAP, smallest_k, solve_m
from .errors import InfeasibleDesignError, NotSupportedError
from .numerics import DistributionSpec, QuadratureConfig, power_from_ncp, required_ncp
from .params import DesignInputs, MethodResult, ceil_count, validate, vif_set

DisjDist = Literal["chisq", "f"]
__all__ = ["OmegaEntries", "omega_entries", "disjunctive_lambda", "disjunctive_power",
           "disjunctive_clusters", "disjunctive_cluster_size", "vif_set"]


@dataclass(frozen=True)
class OmegaEntries:
    """Per-cluster covariance entries of the two effect estimators (times K)."""

    omega1_sq: float
    omega2_sq: float
    omega12: float


def omega_entries(inputs: DesignInputs, m: float | None = None) -> OmegaEntries:
    m = inputs.m if m is None else m
    v = vif_set(inputs.corr, m)
    s1, s2 = inputs.variances.sigma1_sq, inputs.variances.sigma2_sq
    return OmegaEntries(4.0 * s1 * v.vif1 / m, 4.0 * s2 * v.vif2 / m,
                        4.0 * (s1 * s2) ** 0.5 * v.vif12 / m)


def _require_equal(inputs: DesignInputs) -> None:
    if not inputs.equal_allocation:
        raise NotSupportedError(
            "the disjunctive 2-DF test is implemented for equal allocation only; "
            "give K instead of (K1, ratio)")


def _lambda_per_cluster(inputs: DesignInputs, m: float) -> float:
    v = vif_set(inputs.corr, m)
    det = v.determinant
    if not det > 0.0:
        raise InfeasibleDesignError(
            f"VIF1*VIF2 - VIF12^2 = {det:.4g} <= 0 at m={m:g}; the covariance is singular")
    b1, b2 = inputs.effects.beta1, inputs.effects.beta2
    s1, s2 = inputs.variances.sigma1_sq, inputs.variances.sigma2_sq
    num = b1 * b1 * s2 * v.vif2 - 2.0 * b1 * b2 * (s1 * s2) ** 0.5 * v.vif12 + b2 * b2 * s1 * v.vif1
    return m * num / (2.0 * s1 * s2 * det)


def disjunctive_lambda(inputs: DesignInputs) -> float:
    """Noncentrality of the 2-DF Wald statistic at the given (K, m)."""
    _require_equal(inputs)
    return inputs.K * _lambda_per_cluster(inputs, inputs.m)


def _spec(dist: DisjDist, K: int) -> DistributionSpec:
    if dist == "chisq":
        return DistributionSpec.chisq(2)
    if dist == "f":
        return DistributionSpec.f(2, 2 * K - 4)
    raise ValueError(f"dist must be 'chisq' or 'f', got {dist!r}")


def disjunctive_power(inputs: DesignInputs, dist: DisjDist = "chisq",
                      config: QuadratureConfig | None = None) -> MethodResult:
    validate(inputs)
    _require_equal(inputs)
    lam = disjunctive_lambda(inputs)
    spec = _spec(dist, inputs.K)
    if spec.df2 is not None and spec.df2 < 1:
        raise InfeasibleDesignError("the F reference needs K >= 3")
    power, crit = power_from_ncp(lam, inputs.alpha, spec, config)
    return MethodResult("disjunctive_2df", spec, power=power, lam=lam, critical_value=crit,
                        vifs=vif_set(inputs.corr, inputs.m))


def disjunctive_clusters(inputs: DesignInputs, dist: DisjDist = "chisq",
                         config: QuadratureConfig | None = None) -> MethodResult:
    """Clusters per arm for the target power.

    Closed form under chi-square; under F the smallest K >= 3 whose power
    reaches the target.
    """
    validate(inputs)
    _require_equal(inputs)
    per_cluster = _lambda_per_cluster(inputs, inputs.m)
    if per_cluster == 0.0:
        raise InfeasibleDesignError("both effects are zero; no K reaches the target")
    vifs = vif_set(inputs.corr, inputs.m)
    if dist == "chisq":
        spec = _spec(dist, 0)
        ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
        k_real = ncp / per_cluster
        return MethodResult("disjunctive_2df", spec, K_required=ceil_count(k_real),
                            K_real=k_real, lam=ncp, vifs=vifs)

    def reaches(k: int) -> bool:
        return power_from_ncp(k * per_cluster, inputs.alpha, _spec("f", k), config)[0] \
            >= inputs.target_power

    k = smallest_k(reaches, 3)
    spec = _spec("f", k)
    power, crit = power_from_ncp(k * per_cluster, inputs.alpha, spec, config)
    return MethodResult("disjunctive_2df", spec, K_required=k, K_real=float(k), power=None,
                        lam=required_ncp(inputs.alpha, inputs.target_power, spec, config),
                        critical_value=crit, vifs=vifs, extras={"power_at_K": power})


def disjunctive_cluster_size(inputs: DesignInputs, dist: DisjDist = "chisq",
                             config: QuadratureConfig | None = None) -> MethodResult:
    """Cluster size for the target power with K fixed (F df from the given K)."""
    validate(inputs)
    _require_equal(inputs)
    spec = _spec(dist, inputs.K)
    if spec.df2 is not None and spec.df2 < 1:
        raise InfeasibleDesignError("the F reference needs K >= 3", min_feasible_K=3)
    ncp = required_ncp(inputs.alpha, inputs.target_power, spec, config)
    K = inputs.K
    m_real = solve_m(lambda m: K * _lambda_per_cluster(inputs, m) - ncp, "disjunctive 2-DF test",
                     limit=lambda: K * _lambda_per_cluster(inputs, M_CAP))
    m = max(2, ceil_count(m_real))
    return MethodResult("disjunctive_2df", spec, m_required=m, m_real=m_real, lam=ncp,
                        critical_value=power_from_ncp(ncp, inputs.alpha, spec, config)[1],
                        vifs=vif_set(inputs.corr, m_real))
