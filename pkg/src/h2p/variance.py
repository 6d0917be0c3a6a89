"""Total and combined-outcome variances from investigator-facing quantities."""
from __future__ import annotations

import math

from .params import CorrelationStructure


def total_variance_binary(p: float, rho0: float) -> float:
    """Total variance of a binary outcome with prevalence ``p`` and ICC ``rho0``.

    The within-cluster variance ``p(1-p)`` is inflated by the between-cluster
    component ``rho0 * s_w / (1 - rho0)``.

    Examples
    --------
    >>> round(total_variance_binary(0.5, 0.0), 6)
    0.25
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if not 0.0 <= rho0 < 1.0:
        raise ValueError(f"rho0 must lie in [0, 1), got {rho0}")
    within = p * (1.0 - p)
    between = rho0 * within / (1.0 - rho0)
    return between + within


def combined_variance(sigma1_sq: float, sigma2_sq: float, rho2_12: float) -> float:
    """Variance of ``Y1 + Y2`` given the intra-subject correlation ``rho2_12``."""
    if sigma1_sq <= 0 or sigma2_sq <= 0:
        raise ValueError("variances must be positive")
    return sigma1_sq + sigma2_sq + 2.0 * rho2_12 * math.sqrt(sigma1_sq * sigma2_sq)


def combined_icc(sigma1_sq: float, sigma2_sq: float, corr: CorrelationStructure) -> float:
    """ICC of ``Y1 + Y2`` implied by the two-outcome correlation structure."""
    s12 = math.sqrt(sigma1_sq * sigma2_sq)
    denom = sigma1_sq + sigma2_sq + 2.0 * corr.rho2_12 * s12
    if not denom > 0:
        raise ValueError(f"combined variance must be positive, got {denom}")
    num = corr.rho0_1 * sigma1_sq + corr.rho0_2 * sigma2_sq + 2.0 * corr.rho1_12 * s12
    return num / denom
