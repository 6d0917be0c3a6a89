"""Sample-size algebra and integer/real searches shared by the method engines."""
from __future__ import annotations

import math
from typing import Callable

from .errors import InfeasibleDesignError
from .numerics import DistributionSpec, QuadratureConfig, power_from_ncp, solve_root

# Upper end of the cluster-size search; beyond this the VIFs have converged.
M_CAP = 1e7
K_CAP = 10**6


def outcome_lambda(beta: float, sigma_sq: float, vif: float, m: float, k1: float,
                   alloc: float) -> float:
    """Per-outcome noncentrality ``m beta^2 K1 / ((1 + 1/r) sigma^2 VIF)``."""
    return m * beta * beta * k1 / (alloc * sigma_sq * vif)


def clusters_real(ncp: float, beta: float, sigma_sq: float, vif: float, m: float,
                  alloc: float) -> float:
    """Treated-arm clusters at which :func:`outcome_lambda` equals ``ncp``."""
    if beta == 0.0:
        raise InfeasibleDesignError("a zero effect cannot be detected with any K")
    return alloc * ncp * sigma_sq * vif / (m * beta * beta)


def cluster_size_real(ncp: float, beta: float, sigma_sq: float, rho0: float, k1: float,
                      alloc: float) -> float:
    """Cluster size at which :func:`outcome_lambda` equals ``ncp`` with ``K1`` fixed.

    Raises
    ------
    InfeasibleDesignError
        When ``K1`` is too small for any cluster size; the error carries the
        smallest feasible ``K1``.
    """
    if beta == 0.0:
        raise InfeasibleDesignError("a zero effect cannot be detected with any m")
    a = alloc * ncp * sigma_sq
    denom = k1 * beta * beta - a * rho0
    if denom <= 0.0:
        k_min = math.floor(a * rho0 / (beta * beta)) + 1
        raise InfeasibleDesignError(
            f"K={k1:g} is too small to reach the target for any cluster size; "
            f"need at least K={k_min}", min_feasible_K=k_min,
            limiting_lambda=k1 * beta * beta / (alloc * sigma_sq * rho0))
    return a * (1.0 - rho0) / denom


def smallest_k(ok: Callable[[int], bool], k_min: int, k_cap: int = K_CAP) -> int:
    """Smallest integer ``k >= k_min`` with ``ok(k)``, assuming ``ok`` is monotone.

    Doubles the step until ``ok`` holds, then bisects; same answer as an
    upward scan at logarithmic cost.
    """
    if ok(k_min):
        return k_min
    lo, step = k_min, 1
    while True:
        hi = lo + step
        if hi > k_cap:
            if ok(k_cap):
                hi = k_cap
                break
            raise InfeasibleDesignError(f"target not reached with K up to {k_cap}")
        if ok(hi):
            break
        lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def solve_m(gap: Callable[[float], float], what: str, limit: Callable[[], float] | None = None
            ) -> float:
    """Real cluster size ``m >= 2`` at which the increasing ``gap(m)`` crosses zero.

    Returns 2 when ``gap(2) >= 0``. ``limit`` reports the quantity reached at
    the search cap for the infeasibility message.
    """
    if gap(2.0) >= 0.0:
        return 2.0
    if gap(M_CAP) < 0.0:
        lam = limit() if limit is not None else None
        extra = f" (noncentrality plateaus at {lam:.4g})" if lam is not None else ""
        raise InfeasibleDesignError(
            f"{what}: target not reachable at any cluster size with this K{extra}",
            limiting_lambda=lam)
    return solve_root(gap, 2.0, M_CAP, tol=1e-9, expand="none")


def one_df_spec(dist: str, k1: float, r: float) -> DistributionSpec:
    """chi-square(1), or F(1, total clusters - 4) for a finite-sample reference."""
    if dist == "chisq":
        return DistributionSpec.chisq(1)
    if dist != "f":
        raise ValueError(f"dist must be 'chisq' or 'f', got {dist!r}")
    df2 = k1 * (1.0 + r) - 4.0
    if df2 < 1.0:
        raise InfeasibleDesignError(f"the F reference needs more clusters (df {df2:g} < 1)",
                                    min_feasible_K=min_k_for_f(r))
    return DistributionSpec.f(1, df2)


def min_k_for_f(r: float) -> int:
    """Smallest treated-arm K giving an F denominator df of at least 1."""
    return max(1, math.ceil(5.0 / (1.0 + r) - 1e-12))


def smallest_k_for_power(per_cluster_lambda: float, alpha: float, target: float, dist: str,
                         r: float, config: QuadratureConfig | None = None) -> int:
    """Smallest K with 1-DF power at least ``target`` when lambda = K * per_cluster_lambda."""

    def ok(k: int) -> bool:
        spec = one_df_spec(dist, k, r)
        return power_from_ncp(k * per_cluster_lambda, alpha, spec, config)[0] >= target

    return smallest_k(ok, min_k_for_f(r))
