"""Conjunctive intersection-union test: both outcomes must be significant.

Each outcome's one-sided Wald statistic must exceed a common critical value
``c``. Power is the upper orthant probability of the pair of statistics,
bivariate normal or noncentral bivariate t with ``2K - 4`` df.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from ._design import smallest_k, solve_m
from .errors import InfeasibleDesignError, NotSupportedError, SignConstraintError
from .numerics import (DistributionSpec, QuadratureConfig, bvn_upper_orthant, bvt_upper_orthant,
                       critical_value)
from .params import DesignInputs, MethodResult, ceil_count, validate, vif_set

ConjDist = Literal["mvn", "mvt"]


@dataclass(frozen=True)
class WaldPair:
    """Expected Wald statistics of the two outcomes and their correlation."""

    zeta1: float
    zeta2: float
    phi12: float


def _wald_at(inputs: DesignInputs, K: float, m: float) -> WaldPair:
    v = vif_set(inputs.corr, m)
    e, s = inputs.effects, inputs.variances
    z1 = e.beta1 * math.sqrt(2.0 * K) / math.sqrt(4.0 * s.sigma1_sq * v.vif1 / m)
    z2 = e.beta2 * math.sqrt(2.0 * K) / math.sqrt(4.0 * s.sigma2_sq * v.vif2 / m)
    return WaldPair(z1, z2, v.vif12 / math.sqrt(v.vif1 * v.vif2))


def _check(inputs: DesignInputs) -> None:
    if not inputs.equal_allocation:
        raise NotSupportedError(
            "the conjunctive IU test is implemented for equal allocation only; "
            "give K instead of (K1, ratio)")
    b1, b2 = inputs.effects.beta1, inputs.effects.beta2
    if b1 < 0.0 or b2 < 0.0:
        raise SignConstraintError(
            f"the conjunctive test rejects for positive effects only (beta1={b1}, "
            f"beta2={b2}); reverse the coding of any outcome with a negative effect")


def wald_pair(inputs: DesignInputs) -> WaldPair:
    _check(inputs)
    return _wald_at(inputs, inputs.K, inputs.m)


def _spec(dist: ConjDist, K: int) -> DistributionSpec:
    if dist == "mvn":
        return DistributionSpec("mvn")
    if dist == "mvt":
        if 2 * K - 4 < 1:
            raise InfeasibleDesignError("the t reference needs K >= 3", min_feasible_K=3)
        return DistributionSpec("mvt", float(2 * K - 4))
    raise ValueError(f"dist must be 'mvn' or 'mvt', got {dist!r}")


def _power(w: WaldPair, c: float, spec: DistributionSpec,
           config: QuadratureConfig | None) -> float:
    if spec.family == "mvn":
        return bvn_upper_orthant(c, c, w.zeta1, w.zeta2, w.phi12, config)
    return bvt_upper_orthant(c, c, w.zeta1, w.zeta2, w.phi12, spec.df2, config)


def conjunctive_power(inputs: DesignInputs, dist: ConjDist = "mvt",
                      config: QuadratureConfig | None = None) -> MethodResult:
    validate(inputs)
    _check(inputs)
    spec = _spec(dist, inputs.K)
    c = critical_value(inputs.alpha, spec)
    w = _wald_at(inputs, inputs.K, inputs.m)
    return MethodResult("conjunctive_iu", spec, power=_power(w, c, spec, config),
                        critical_value=c, vifs=vif_set(inputs.corr, inputs.m),
                        extras={"zeta1": w.zeta1, "zeta2": w.zeta2, "phi12": w.phi12})


def conjunctive_clusters(inputs: DesignInputs, dist: ConjDist = "mvt",
                         config: QuadratureConfig | None = None) -> MethodResult:
    """Smallest K >= 3 whose power reaches the target (c moves with K under t)."""
    validate(inputs)
    _check(inputs)
    if inputs.effects.beta1 == 0.0 or inputs.effects.beta2 == 0.0:
        raise InfeasibleDesignError("a zero effect cannot be detected with any K")

    def power_at(k: int) -> float:
        spec = _spec(dist, k)
        return _power(_wald_at(inputs, k, inputs.m), critical_value(inputs.alpha, spec), spec,
                      config)

    k = smallest_k(lambda k: power_at(k) >= inputs.target_power, 3)
    spec = _spec(dist, k)
    return MethodResult("conjunctive_iu", spec, K_required=k, K_real=float(k),
                        critical_value=critical_value(inputs.alpha, spec),
                        vifs=vif_set(inputs.corr, inputs.m), extras={"power_at_K": power_at(k)})


def conjunctive_cluster_size(inputs: DesignInputs, dist: ConjDist = "mvt",
                             config: QuadratureConfig | None = None) -> MethodResult:
    """Real cluster size at which power meets the target (K and c fixed), rounded up."""
    validate(inputs)
    _check(inputs)
    spec = _spec(dist, inputs.K)
    c = critical_value(inputs.alpha, spec)
    K = inputs.K

    def power_at(m: float) -> float:
        return _power(_wald_at(inputs, K, m), c, spec, config)

    m_real = solve_m(lambda m: power_at(m) - inputs.target_power, "conjunctive IU test")
    m = max(2, ceil_count(m_real))
    w = _wald_at(inputs, K, m_real)
    return MethodResult("conjunctive_iu", spec, m_required=m, m_real=m_real, critical_value=c,
                        vifs=vif_set(inputs.corr, m_real),
                        extras={"zeta1": w.zeta1, "zeta2": w.zeta2, "phi12": w.phi12})
