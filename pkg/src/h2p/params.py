"""Design inputs, result containers and input validation."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Literal

from .errors import ValidationError, Violation
from .numerics import DistributionSpec

MethodName = Literal["bonferroni", "sidak", "dap", "combined_outcome", "single_1df",
                     "disjunctive_2df", "conjunctive_iu"]
METHODS: tuple[str, ...] = ("bonferroni", "sidak", "dap", "combined_outcome", "single_1df",
                            "disjunctive_2df", "conjunctive_iu")
PADJUST_METHODS = ("bonferroni", "sidak", "dap")


class DesignWarning(UserWarning):
    """Inputs are usable but questionable."""


@dataclass(frozen=True)
class EffectSpec:
    """Treatment effects (difference in means or proportions) on the two outcomes."""

    beta1: float
    beta2: float


@dataclass(frozen=True)
class VarianceSpec:
    """Total outcome variances.

    ``origin="derived_from_binary"`` records that the variances were built
    from within-cluster proportions ``p1``/``p2``; use :meth:`from_binary`.
    """

    sigma1_sq: float
    sigma2_sq: float
    origin: Literal["given_total", "derived_from_binary"] = "given_total"
    p1: float | None = None
    p2: float | None = None

    @classmethod
    def from_binary(cls, p1: float, p2: float, rho0_1: float, rho0_2: float) -> VarianceSpec:
        from .variance import total_variance_binary

        return cls(total_variance_binary(p1, rho0_1), total_variance_binary(p2, rho0_2),
                   "derived_from_binary", p1, p2)


@dataclass(frozen=True)
class CorrelationStructure:
    """The four correlations of the two-outcome cluster model.

    rho0_1, rho0_2
        Endpoint-specific ICCs.
    rho1_12
        Correlation between outcome 1 and outcome 2 of two different
        subjects in the same cluster.
    rho2_12
        Correlation between the two outcomes of the same subject.
    """

    rho0_1: float
    rho0_2: float
    rho1_12: float
    rho2_12: float


@dataclass(frozen=True)
class VifSet:
    """Variance inflation factors at a given cluster size."""

    vif1: float
    vif2: float
    vif12: float

    @property
    def determinant(self) -> float:
        return self.vif1 * self.vif2 - self.vif12 * self.vif12


def vif_set(corr: CorrelationStructure, m: float) -> VifSet:
    return VifSet(1.0 + (m - 1.0) * corr.rho0_1,
                  1.0 + (m - 1.0) * corr.rho0_2,
                  corr.rho2_12 + (m - 1.0) * corr.rho1_12)


@dataclass(frozen=True)
class CombinedOverrides:
    """Directly supplied combined-outcome parameters (from pilot data).

    Any field left as None is derived from the two-outcome inputs.
    """

    beta_c: float | None = None
    sigma_c_sq: float | None = None
    rho0_c: float | None = None


@dataclass(frozen=True)
class DesignInputs:
    """Full parameter set for one design.

    Give either ``K`` (clusters per arm, equal allocation) or ``K1`` with
    ``ratio`` (treated clusters and control/treated ratio, ``K2 = ratio*K1``).
    """

    effects: EffectSpec
    variances: VarianceSpec
    corr: CorrelationStructure
    m: int
    alpha: float = 0.05
    target_power: float = 0.80
    K: int | None = None
    K1: int | None = None
    ratio: float | None = None
    combined: CombinedOverrides = field(default_factory=CombinedOverrides)

    @property
    def equal_allocation(self) -> bool:
        return self.K is not None

    @property
    def n_treated(self) -> int:
        """Clusters in the treated arm (K under equal allocation)."""
        return self.K if self.K is not None else self.K1

    @property
    def r(self) -> float:
        return 1.0 if self.K is not None else float(self.ratio)

    @property
    def alloc_factor(self) -> float:
        """1 + 1/r; equals 2 under equal allocation."""
        return 1.0 + 1.0 / self.r

    def with_clusters(self, k: int) -> DesignInputs:
        """Copy with the treated-arm cluster count replaced."""
        from dataclasses import replace

        if self.K is not None:
            return replace(self, K=k)
        return replace(self, K1=k)

    def with_cluster_size(self, m: int) -> DesignInputs:
        from dataclasses import replace

        return replace(self, m=m)


@dataclass(frozen=True)
class OutcomeDetail:
    """Per-outcome numbers behind a p-value adjustment row (before min/max)."""

    power: float | None = None
    K_raw: float | None = None
    m_raw: float | None = None
    lam: float | None = None


@dataclass(frozen=True)
class MethodResult:
    """Output of one design method.

    Power, required K and required m are filled by different operations;
    :func:`h2p.report.evaluate` merges them into one row. ``K_real`` and
    ``m_real`` are the unrounded solutions behind ``K_required`` and
    ``m_required``.
    """

    method: str
    dist: DistributionSpec
    power: float | None = None
    K_required: int | None = None
    m_required: int | None = None
    lam: float | None = None
    critical_value: float | None = None
    adjusted_alpha: float | None = None
    per_outcome: tuple[OutcomeDetail, OutcomeDetail] | None = None
    vifs: VifSet | None = None
    K_real: float | None = None
    m_real: float | None = None
    K2_required: int | None = None
    extras: dict[str, float] = field(default_factory=dict)


def ceil_count(x: float) -> int:
    """Round a real-valued sample size up, ignoring float noise just above an integer."""
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


def _finite(x: Any) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x: Any) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def check(inputs: DesignInputs) -> tuple[list[Violation], list[str]]:
    """All constraint violations and warnings for ``inputs``."""
    bad: list[Violation] = []
    notes: list[str] = []

    def need(ok: bool, name: str, constraint: str, value: Any) -> None:
        if not ok:
            bad.append(Violation(name, constraint, value))

    e, v, c = inputs.effects, inputs.variances, inputs.corr
    for name in ("beta1", "beta2"):
        x = getattr(e, name)
        need(_finite(x), f"effects.{name}", "must be a finite number", x)
    for name in ("sigma1_sq", "sigma2_sq"):
        x = getattr(v, name)
        need(_finite(x) and x > 0, f"variances.{name}", "must be finite and > 0", x)
    if v.origin == "derived_from_binary":
        from .variance import total_variance_binary

        for q, p, s in ((1, v.p1, v.sigma1_sq), (2, v.p2, v.sigma2_sq)):
            rho0 = getattr(c, f"rho0_{q}")
            try:
                expected = total_variance_binary(p, rho0)
            except (TypeError, ValueError):
                need(False, f"variances.p{q}", "must be a proportion in (0, 1)", p)
                continue
            need(s == expected, f"variances.sigma{q}_sq",
                 f"must equal the binary construction {expected!r}", s)
    elif v.origin != "given_total":
        need(False, "variances.origin", "must be 'given_total' or 'derived_from_binary'",
             v.origin)

    for name in ("rho0_1", "rho0_2"):
        x = getattr(c, name)
        need(_finite(x) and 0.0 <= x < 1.0, f"corr.{name}", "ICC must lie in [0, 1)", x)
    for name in ("rho1_12", "rho2_12"):
        x = getattr(c, name)
        need(_finite(x) and -1.0 < x < 1.0, f"corr.{name}", "must lie in (-1, 1)", x)

    has_k = inputs.K is not None
    has_unequal = inputs.K1 is not None or inputs.ratio is not None
    if has_k == has_unequal:
        need(False, "K", "give exactly one of K or (K1, ratio)",
             {"K": inputs.K, "K1": inputs.K1, "ratio": inputs.ratio})
    elif has_k:
        need(_is_int(inputs.K) and inputs.K >= 1, "K", "must be a positive integer", inputs.K)
    else:
        need(_is_int(inputs.K1) and inputs.K1 >= 1, "K1", "must be a positive integer",
             inputs.K1)
        need(_finite(inputs.ratio) and inputs.ratio > 0, "ratio", "must be > 0", inputs.ratio)

    need(_is_int(inputs.m) and inputs.m >= 2, "m",
         "cluster size must be an integer >= 2", inputs.m)
    need(_finite(inputs.alpha) and 0.0 < inputs.alpha < 1.0, "alpha", "must lie in (0, 1)",
         inputs.alpha)
    need(_finite(inputs.target_power) and 0.0 < inputs.target_power < 1.0, "target_power",
         "must lie in (0, 1)", inputs.target_power)

    o = inputs.combined
    if o.beta_c is not None:
        need(_finite(o.beta_c), "combined.beta_c", "must be a finite number", o.beta_c)
    if o.sigma_c_sq is not None:
        need(_finite(o.sigma_c_sq) and o.sigma_c_sq > 0, "combined.sigma_c_sq",
             "must be finite and > 0", o.sigma_c_sq)
    if o.rho0_c is not None:
        need(_finite(o.rho0_c) and 0.0 <= o.rho0_c < 1.0, "combined.rho0_c",
             "ICC must lie in [0, 1)", o.rho0_c)

    corr_ok = not any(x.field.startswith("corr.") for x in bad)
    if corr_ok:
        bound = math.sqrt(c.rho0_1 * c.rho0_2)
        if abs(c.rho1_12) > bound:
            msg = (f"|rho1_12| exceeds sqrt(rho0_1*rho0_2)={bound:.4g}; "
                   "the between-subject covariance model is not valid")
            if _is_int(inputs.m) and inputs.m >= 2 and vif_set(c, inputs.m).determinant <= 0:
                need(False, "corr.rho1_12",
                     msg + f" and VIF1*VIF2 - VIF12^2 <= 0 at m={inputs.m}", c.rho1_12)
            else:
                notes.append(msg)
        if _is_int(inputs.m) and inputs.m >= 2 and abs(c.rho1_12) <= bound:
            if vif_set(c, inputs.m).determinant <= 0:
                need(False, "corr", f"VIF1*VIF2 - VIF12^2 must be > 0 at m={inputs.m}", c)
    return bad, notes


def validate(inputs: DesignInputs) -> DesignInputs:
    """Return ``inputs`` unchanged if valid, else raise :class:`ValidationError`.

    Warning-level findings are emitted as :class:`DesignWarning`.
    """
    bad, notes = check(inputs)
    if bad:
        raise ValidationError(bad)
    for note in notes:
        warnings.warn(note, DesignWarning, stacklevel=2)
    return inputs
