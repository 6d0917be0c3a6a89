"""P-value adjustment designs: Bonferroni, Sidak and D/AP.

Each outcome is tested on its own at an adjusted level. Power is the smaller
of the two per-outcome powers; required K and m are the larger of the two
per-outcome requirements, rounded up after taking the maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

from ._design import (cluster_size_real, clusters_real, min_k_for_f, one_df_spec,
                      outcome_lambda, smallest_k)
from .errors import InfeasibleDesignError
from .numerics import (DistributionSpec, QuadratureConfig, critical_value, required_ncp,
                       upper_tail)
from .params import (PADJUST_METHODS, DesignInputs, MethodResult, OutcomeDetail, ceil_count,
                     validate, vif_set)

AdjustMethod = Literal["bonferroni", "sidak", "dap"]
TestDist = Literal["chisq", "f"]


@dataclass(frozen=True)
class AdjustedAlpha:
    """Per-outcome significance level(s) of a p-value adjustment.

    ``levels`` holds one level per outcome; it differs from ``(value, value)``
    only for an unequal Bonferroni split. ``rho_used`` is set for D/AP.
    """

    method: AdjustMethod
    value: float
    rho_used: float | None = None
    levels: tuple[float, ...] | None = None

    def level(self, q: int) -> float:
        """Significance level applied to outcome ``q`` (0-based)."""
        return self.levels[q] if self.levels is not None else self.value


def _check_alpha(alpha: float, Q: int) -> None:
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    if not (isinstance(Q, int) and Q >= 1):
        raise ValueError(f"Q must be a positive integer, got {Q}")


def alpha_bonferroni(alpha: float, Q: int = 2,
                     split: tuple[float, ...] | None = None) -> AdjustedAlpha:
    """Bonferroni level ``alpha / Q``, or an explicit unequal split.

    Parameters
    ----------
    split
        Per-outcome levels summing to ``alpha`` (e.g. ``(0.03, 0.02)``).
        ``value`` then reports the smallest of them.
    """
    _check_alpha(alpha, Q)
    if split is None:
        return AdjustedAlpha("bonferroni", alpha / Q)
    if len(split) != Q or any(not 0.0 < w < 1.0 for w in split):
        raise ValueError(f"split must hold {Q} levels in (0, 1), got {split}")
    if not math.isclose(math.fsum(split), alpha, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError(f"split levels must sum to alpha={alpha}, got {math.fsum(split)}")
    return AdjustedAlpha("bonferroni", min(split), levels=tuple(float(w) for w in split))


def alpha_sidak(alpha: float, Q: int = 2) -> AdjustedAlpha:
    """Sidak level ``1 - (1 - alpha)^(1/Q)``."""
    _check_alpha(alpha, Q)
    return AdjustedAlpha("sidak", -math.expm1(math.log1p(-alpha) / Q))


def alpha_dap(alpha: float, rho: float, Q: int = 2) -> AdjustedAlpha:
    """Dubey/Armitage-Parmar level ``1 - (1 - alpha)^(1/M)`` with ``M = Q^(1-rho)``.

    ``rho`` is the correlation between the two outcomes measured on the same
    subject. At ``rho = 0`` this is the Sidak level; at ``rho = 1`` it is
    ``alpha`` itself.
    """
    _check_alpha(alpha, Q)
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    M = Q ** (1.0 - rho)
    return AdjustedAlpha("dap", -math.expm1(math.log1p(-alpha) / M), rho_used=rho)


def adjusted_alpha(inputs: DesignInputs, method: AdjustMethod, Q: int = 2,
                   split: tuple[float, ...] | None = None) -> AdjustedAlpha:
    if method not in PADJUST_METHODS:
        raise ValueError(f"unknown adjustment {method!r}; choose from {PADJUST_METHODS}")
    if split is not None and method != "bonferroni":
        raise ValueError("an unequal split is only defined for Bonferroni")
    if method == "bonferroni":
        return alpha_bonferroni(inputs.alpha, Q, split)
    if method == "sidak":
        return alpha_sidak(inputs.alpha, Q)
    return alpha_dap(inputs.alpha, max(0.0, inputs.corr.rho2_12), Q)


def _dist(inputs: DesignInputs, dist: TestDist, k1: float | None = None) -> DistributionSpec:
    return one_df_spec(dist, inputs.n_treated if k1 is None else k1, inputs.r)


def _outcomes(inputs: DesignInputs):
    v = vif_set(inputs.corr, inputs.m)
    e, s, c = inputs.effects, inputs.variances, inputs.corr
    return v, ((e.beta1, s.sigma1_sq, v.vif1, c.rho0_1), (e.beta2, s.sigma2_sq, v.vif2, c.rho0_2))


def _powers(inputs: DesignInputs, adj: AdjustedAlpha, dist: DistributionSpec, k1: float,
            config: QuadratureConfig | None):
    _, outs = _outcomes(inputs)
    rows, crits = [], []
    for q, (beta, s2, vif, _) in enumerate(outs):
        lam = outcome_lambda(beta, s2, vif, inputs.m, k1, inputs.alloc_factor)
        crit = critical_value(adj.level(q), dist)
        rows.append(OutcomeDetail(power=upper_tail(crit, lam, dist, config), lam=lam))
        crits.append(crit)
    return rows, crits


def padjust_power(inputs: DesignInputs, method: AdjustMethod, *, dist: TestDist = "chisq",
                  Q: int = 2, split: tuple[float, ...] | None = None,
                  config: QuadratureConfig | None = None) -> MethodResult:
    """Power at the given (K, m): the smaller per-outcome power.

    Examples
    --------
    Bonferroni on the two-outcome example (K=15, m=300) gives about 84.55%.
    """
    validate(inputs)
    adj = adjusted_alpha(inputs, method, Q, split)
    spec = _dist(inputs, dist)
    rows, crits = _powers(inputs, adj, spec, inputs.n_treated, config)
    vifs, _ = _outcomes(inputs)
    return MethodResult(method, spec, power=min(r.power for r in rows), lam=None,
                        critical_value=crits[0], adjusted_alpha=adj.value,
                        per_outcome=(rows[0], rows[1]), vifs=vifs,
                        extras={"critical_value_2": crits[1]})


def _k2(inputs: DesignInputs, k1: int) -> int | None:
    return None if inputs.equal_allocation else ceil_count(inputs.r * k1)


def padjust_clusters(inputs: DesignInputs, method: AdjustMethod, *, dist: TestDist = "chisq",
                     Q: int = 2, split: tuple[float, ...] | None = None,
                     config: QuadratureConfig | None = None) -> MethodResult:
    """Clusters per arm (treated arm under unequal allocation) for the target power.

    With ``dist="chisq"`` each outcome's K follows in closed form from the
    required noncentrality. With ``dist="f"`` the denominator df moves with
    K, so the smallest integer K meeting the target is searched for.
    """
    validate(inputs)
    adj = adjusted_alpha(inputs, method, Q, split)
    vifs, outs = _outcomes(inputs)
    target = inputs.target_power
    if dist == "chisq":
        spec = DistributionSpec.chisq(1)
        rows = []
        for q, (beta, s2, vif, _) in enumerate(outs):
            ncp = required_ncp(adj.level(q), target, spec, config)
            rows.append(OutcomeDetail(
                K_raw=clusters_real(ncp, beta, s2, vif, inputs.m, inputs.alloc_factor),
                lam=ncp))
        k_real = max(r.K_raw for r in rows)
        k = ceil_count(k_real)
        return MethodResult(method, spec, K_required=k, K_real=k_real,
                            adjusted_alpha=adj.value,
                            critical_value=critical_value(adj.level(0), spec),
                            per_outcome=(rows[0], rows[1]), vifs=vifs, K2_required=_k2(inputs, k))

    # F reference: search K directly; per-outcome K_raw is the search result for that outcome.
    k_min = min_k_for_f(inputs.r)
    per_k = []
    for q in range(2):
        def reaches(k: int, q: int = q) -> bool:
            spec_k = _dist(inputs, "f", k)
            rows_k, _ = _powers(inputs, adj, spec_k, k, config)
            return rows_k[q].power >= target
        per_k.append(smallest_k(reaches, k_min))
    k = max(per_k)
    spec = _dist(inputs, "f", k)
    rows_k, crits = _powers(inputs, adj, spec, k, config)
    rows = tuple(OutcomeDetail(power=r.power, K_raw=float(kq), lam=r.lam)
                 for r, kq in zip(rows_k, per_k))
    return MethodResult(method, spec, K_required=k, K_real=float(k), adjusted_alpha=adj.value,
                        critical_value=crits[0], per_outcome=rows, vifs=vifs,
                        K2_required=_k2(inputs, k))


def padjust_cluster_size(inputs: DesignInputs, method: AdjustMethod, *,
                         dist: TestDist = "chisq", Q: int = 2,
                         split: tuple[float, ...] | None = None,
                         config: QuadratureConfig | None = None) -> MethodResult:
    """Cluster size for the target power with K held at its given value.

    Raises
    ------
    InfeasibleDesignError
        When K is too small for any cluster size; ``min_feasible_K`` names
        the smallest K that would work.
    """
    validate(inputs)
    adj = adjusted_alpha(inputs, method, Q, split)
    spec = _dist(inputs, dist)
    vifs, outs = _outcomes(inputs)
    rows = []
    k_needed = []
    for q, (beta, s2, _, rho0) in enumerate(outs):
        ncp = required_ncp(adj.level(q), inputs.target_power, spec, config)
        try:
            m_raw = cluster_size_real(ncp, beta, s2, rho0, inputs.n_treated,
                                      inputs.alloc_factor)
        except InfeasibleDesignError as exc:
            k_needed.append(exc.min_feasible_K)
            continue
        rows.append(OutcomeDetail(m_raw=m_raw, lam=ncp))
    if k_needed:
        k_min = max(k for k in k_needed if k is not None) if any(
            k is not None for k in k_needed) else None
        raise InfeasibleDesignError(
            f"{method}: K={inputs.n_treated} cannot reach {inputs.target_power:.0%} power "
            f"at any cluster size" + (f"; need at least K={k_min}" if k_min else ""),
            min_feasible_K=k_min)
    m_real = max(r.m_raw for r in rows)
    return MethodResult(method, spec, m_required=max(2, ceil_count(m_real)), m_real=m_real,
                        adjusted_alpha=adj.value, critical_value=critical_value(adj.level(0), spec),
                        per_outcome=(rows[0], rows[1]), vifs=vifs)
