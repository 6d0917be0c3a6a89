"""Distribution functions, quantiles, orthant probabilities and root finding.

Noncentral CDFs and orthant probabilities run on the selected kernel backend
(see :mod:`h2p.numerics.backend`). Central quantiles come from
:mod:`scipy.special`; root finding uses Brent's method behind a bracket
expander.
"""
from __future__ import annotations

import math
import os
import sys
from dataclasses import dataclass
from typing import Callable, Literal

from scipy import optimize, special

from ..errors import ConvergenceError
from .backend import kernels

Family = Literal["chisq_1df", "chisq_2df", "f_1_v", "f_2_v", "mvn", "mvt"]
_FAMILIES = ("chisq_1df", "chisq_2df", "f_1_v", "f_2_v", "mvn", "mvt")


@dataclass(frozen=True)
class DistributionSpec:
    """Reference distribution of a test statistic.

    ``df2`` is the denominator df for the F families and the df of the
    multivariate t; it is absent for the chi-square and normal families.
    """

    family: Family
    df2: float | None = None

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown distribution family {self.family!r}")
        needs_df = self.family in ("f_1_v", "f_2_v", "mvt")
        if needs_df and self.df2 is None:
            raise ValueError(f"{self.family} requires df2")
        if not needs_df and self.df2 is not None:
            raise ValueError(f"{self.family} takes no df2")
        if self.df2 is not None and not self.df2 >= 1:
            raise ValueError(f"df2 must be >= 1, got {self.df2}")

    @property
    def df1(self) -> int | None:
        """Numerator df for chi-square/F families, None for the bivariate ones."""
        if self.family in ("chisq_1df", "f_1_v"):
            return 1
        if self.family in ("chisq_2df", "f_2_v"):
            return 2
        return None

    @property
    def label(self) -> str:
        if self.family.startswith("chisq"):
            return f"chisq({self.df1})"
        if self.family.startswith("f_"):
            return f"F({self.df1},{self.df2:g})"
        if self.family == "mvn":
            return "MVN"
        return f"MVT({self.df2:g})"

    @classmethod
    def chisq(cls, df1: int) -> DistributionSpec:
        return cls("chisq_1df" if df1 == 1 else "chisq_2df")

    @classmethod
    def f(cls, df1: int, df2: float) -> DistributionSpec:
        return cls("f_1_v" if df1 == 1 else "f_2_v", float(df2))


@dataclass(frozen=True)
class QuadratureConfig:
    """Accuracy and work limits shared by the series and quadrature kernels."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_terms: int = 10_000
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        for name in ("abs_tol", "rel_tol", "max_terms", "max_subdivisions"):
            if not getattr(self, name) > 0:
                raise ValueError(f"QuadratureConfig.{name} must be positive")

    @classmethod
    def from_env(cls) -> QuadratureConfig:
        """Defaults, with ``abs_tol`` overridden by ``H2P_QUAD_TOL`` when set."""
        raw = os.environ.get("H2P_QUAD_TOL")
        if not raw:
            return cls()
        try:
            tol = float(raw)
        except ValueError:
            raise ValueError(f"H2P_QUAD_TOL must be a number, got {raw!r}") from None
        return cls(abs_tol=tol)


def _cfg(config: QuadratureConfig | None) -> QuadratureConfig:
    return config if config is not None else QuadratureConfig.from_env()


def _check_prob(p: float, name: str = "p") -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {p}")


# ----------------------------------------------------------------- normal / t

def std_normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def std_normal_quantile(p: float) -> float:
    _check_prob(p)
    return float(special.ndtri(p))


def t_quantile(p: float, df: float) -> float:
    """Quantile of Student's t; ``df=math.inf`` gives the normal quantile."""
    _check_prob(p)
    if math.isinf(df):
        return float(special.ndtri(p))
    if not df > 0:
        raise ValueError(f"df must be positive, got {df}")
    return float(special.stdtrit(df, p))


# -------------------------------------------------------------- chi-square / F

def central_chisq_cdf(x: float, df: float) -> float:
    return kernels.ncx2_cdf(float(x), float(df), 0.0, 1e-10, 1)


def noncentral_chisq_cdf(x: float, df: float, lam: float,
                         config: QuadratureConfig | None = None) -> float:
    """P(X <= x) for X ~ chi2(df, lam), as a Poisson mixture of central CDFs."""
    if not df > 0:
        raise ValueError(f"df must be positive, got {df}")
    if lam < 0:
        raise ValueError(f"noncentrality must be >= 0, got {lam}")
    c = _cfg(config)
    return kernels.ncx2_cdf(float(x), float(df), float(lam), c.abs_tol, c.max_terms)


def central_chisq_quantile(p: float, df: float) -> float:
    _check_prob(p)
    return float(special.chdtri(df, 1.0 - p))


def noncentral_f_cdf(x: float, df1: float, df2: float, lam: float,
                     config: QuadratureConfig | None = None) -> float:
    """P(X <= x) for X ~ F(df1, df2, lam), as a Poisson mixture of incomplete betas."""
    if not (df1 > 0 and df2 > 0):
        raise ValueError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if lam < 0:
        raise ValueError(f"noncentrality must be >= 0, got {lam}")
    c = _cfg(config)
    return kernels.ncf_cdf(float(x), float(df1), float(df2), float(lam), c.abs_tol,
                           c.max_terms)


def central_f_quantile(p: float, df1: float, df2: float) -> float:
    _check_prob(p)
    return float(special.fdtri(df1, df2, p))


# ------------------------------------------------------------------ orthants

def _check_rho(rho: float) -> None:
    if not -1.0 < rho < 1.0:
        raise ValueError(f"correlation must lie in (-1, 1), got {rho}")


def bvn_upper_orthant(c1: float, c2: float, mu1: float, mu2: float, rho: float,
                      config: QuadratureConfig | None = None) -> float:
    """P(W1 > c1, W2 > c2) for a unit-variance bivariate normal with means (mu1, mu2)."""
    _check_rho(rho)
    c = _cfg(config)
    return kernels.bvn_orthant(float(c1), float(c2), float(mu1), float(mu2), float(rho),
                               c.abs_tol, c.rel_tol, c.max_subdivisions)


def bvt_upper_orthant(c1: float, c2: float, mu1: float, mu2: float, rho: float,
                      df: float, config: QuadratureConfig | None = None) -> float:
    """P(T1 > c1, T2 > c2) for the noncentral bivariate t.

    ``T = (Z + mu) / sqrt(S / df)`` with ``Z`` a standard bivariate normal
    with correlation ``rho`` and ``S ~ chi2(df)`` independent of ``Z``. This
    is the noncentrality convention of the usual noncentral (multivariate)
    t, where the shift is scaled by the same chi factor as the noise.
    """
    _check_rho(rho)
    if not df > 0:
        raise ValueError(f"df must be positive, got {df}")
    c = _cfg(config)
    return kernels.bvt_orthant(float(c1), float(c2), float(mu1), float(mu2), float(rho),
                               float(df), c.abs_tol, c.rel_tol, c.max_subdivisions)


# -------------------------------------------------------------- root finding

def solve_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10,
               *, expand: Literal["up", "down", "both", "none"] = "up",
               max_expansions: int = 60) -> float:
    """Find a sign change of ``f`` and locate the root with Brent's method.

    When ``f(lo)`` and ``f(hi)`` share a sign the bracket is widened
    geometrically (the width doubles each step) in the ``expand`` direction,
    at most ``max_expansions`` times.
    """
    if not hi > lo:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    f_lo, f_hi = f(lo), f(hi)
    n = 0
    while f_lo * f_hi > 0:
        if expand == "none" or n >= max_expansions:
            raise ConvergenceError(
                f"no sign change in [{lo:g}, {hi:g}] after {n} bracket expansions")
        width = hi - lo
        if expand in ("up", "both"):
            hi = hi + width
            f_hi = f(hi)
        if expand in ("down", "both"):
            lo = lo - width
            f_lo = f(lo)
        n += 1
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    return float(optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * sys.float_info.epsilon, maxiter=500))


# ------------------------------------------------------- tests built on these

def critical_value(alpha_level: float, dist: DistributionSpec) -> float:
    """Rejection threshold at level ``alpha_level`` for the statistic's null law.

    Chi-square and F tests reject in the upper tail; the bivariate families
    return the one-sided (1 - alpha) marginal quantile shared by both
    components.
    """
    _check_prob(alpha_level, "alpha_level")
    fam = dist.family
    if fam.startswith("chisq"):
        return central_chisq_quantile(1.0 - alpha_level, dist.df1)
    if fam.startswith("f_"):
        return central_f_quantile(1.0 - alpha_level, dist.df1, dist.df2)
    if fam == "mvn":
        return std_normal_quantile(1.0 - alpha_level)
    return t_quantile(1.0 - alpha_level, dist.df2)


def upper_tail(crit: float, lam: float, dist: DistributionSpec,
               config: QuadratureConfig | None = None) -> float:
    """P(X > crit) under noncentrality ``lam`` (chi-square and F families)."""
    fam = dist.family
    if fam.startswith("chisq"):
        return 1.0 - noncentral_chisq_cdf(crit, dist.df1, lam, config)
    if fam.startswith("f_"):
        return 1.0 - noncentral_f_cdf(crit, dist.df1, dist.df2, lam, config)
    raise ValueError(f"{fam} has no scalar noncentrality")


def power_from_ncp(lam: float, alpha_level: float, dist: DistributionSpec,
                   config: QuadratureConfig | None = None) -> tuple[float, float]:
    """(power, critical value) of an upper-tail test with noncentrality ``lam``."""
    crit = critical_value(alpha_level, dist)
    return upper_tail(crit, lam, dist, config), crit


def required_ncp(alpha_level: float, power: float, dist: DistributionSpec,
                 config: QuadratureConfig | None = None) -> float:
    """Noncentrality at which the upper-tail test reaches ``power``.

    Returns 0 when ``power`` does not exceed the test's size.
    """
    _check_prob(alpha_level, "alpha_level")
    _check_prob(power, "power")
    crit = critical_value(alpha_level, dist)
    if power <= upper_tail(crit, 0.0, dist, config):
        return 0.0
    z = std_normal_quantile(1.0 - alpha_level / 2.0) + std_normal_quantile(power)
    hi = 4.0 * z * z + 20.0
    return solve_root(lambda lam: upper_tail(crit, lam, dist, config) - power,
                      0.0, hi, tol=1e-12)
