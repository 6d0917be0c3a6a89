"""Config parsing, multi-method report assembly and text output."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
import warnings
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import combined, conjunctive, disjunctive, padjust, single_df
from .errors import ConfigError, H2PError, ValidationError
from .numerics import DistributionSpec
from .params import (METHODS, CombinedOverrides, CorrelationStructure, DesignInputs, DesignWarning,
                     EffectSpec, MethodResult, OutcomeDetail, VarianceSpec, VifSet, check,
                     validate)
from .variance import combined_variance

OPERATIONS = ("power", "clusters", "cluster_size")
METHOD_LABELS = {
    "bonferroni": "P-value adjustment: Bonferroni",
    "sidak": "P-value adjustment: Sidak",
    "dap": "P-value adjustment: D/AP",
    "combined_outcome": "Combined outcome",
    "single_1df": "Single 1-DF combined test",
    "disjunctive_2df": "Disjunctive 2-DF test",
    "conjunctive_iu": "Conjunctive IU test",
}
METHOD_ALIASES = {
    "bonf": "bonferroni", "combined": "combined_outcome", "single": "single_1df",
    "single1df": "single_1df", "disjunctive": "disjunctive_2df",
    "conjunctive": "conjunctive_iu", "d/ap": "dap",
}

_REQUIRED = ("beta1", "beta2", "rho0_1", "rho0_2", "rho1_12", "rho2_12", "m", "alpha")
_OPTIONAL = ("sigma1_sq", "sigma2_sq", "p1", "p2", "K", "K1", "ratio", "target_power",
             "beta_c", "sigma_c_sq", "rho0_c")
CONFIG_KEYS = _REQUIRED + _OPTIONAL
_INT_KEYS = ("m", "K", "K1")
BUNDLED_CONFIGS = ("circl.json", "circl_unrounded.json")


# ------------------------------------------------------------------ config

def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in pairs:
        if key in out:
            raise ConfigError(f"duplicate key {key!r}")
        out[key] = value
    return out


def _read_source(source: str | Path) -> tuple[str, str]:
    if str(source) == "-":
        return sys.stdin.read(), "<stdin>"
    path = Path(source)
    if not path.exists() and path.name in BUNDLED_CONFIGS and path.parent == Path("."):
        return resources.files("h2p.data").joinpath(path.name).read_text("utf-8"), path.name
    try:
        return path.read_text(encoding="utf-8"), str(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(source)!r}: {exc.strerror}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"{source}: not valid UTF-8 ({exc.reason})") from None


def parse_config_text(text: str, name: str = "<config>", *,
                      target_power: float | None = None) -> DesignInputs:
    """Build validated :class:`DesignInputs` from flat JSON text.

    Variances come from either ``sigma{q}_sq`` or the binary prevalence
    ``p{q}``, never both. ``target_power`` overrides the file's value.
    """
    try:
        raw = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{name}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except ConfigError as exc:
        raise ConfigError(f"{name}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{name}: top level must be an object of key/value pairs")

    problems = []
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        problems.append(f"unknown key(s): {', '.join(unknown)}")
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        problems.append(f"missing required key(s): {', '.join(missing)}")
    for key, value in raw.items():
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            problems.append(f"{key}: expected a number, got {json.dumps(value)}")
    for q in (1, 2):
        has_s, has_p = f"sigma{q}_sq" in raw, f"p{q}" in raw
        if has_s and has_p:
            problems.append(f"ambiguous variance source for outcome {q}: give sigma{q}_sq or "
                            f"p{q}, not both")
        elif not (has_s or has_p):
            problems.append(f"missing key: sigma{q}_sq (or p{q})")
    if ("p1" in raw) != ("p2" in raw):
        problems.append("give p1 and p2 together (or sigma1_sq and sigma2_sq)")
    if "K" in raw and ("K1" in raw or "ratio" in raw):
        problems.append("give K or (K1, ratio), not both")
    elif "K" not in raw and not ("K1" in raw and "ratio" in raw):
        problems.append("missing key: K (or K1 with ratio)")
    if problems:
        raise ConfigError(f"{name}: " + "; ".join(problems))

    vals = {k: (int(v) if k in _INT_KEYS and isinstance(v, float) and v.is_integer() else v)
            for k, v in raw.items()}
    corr = CorrelationStructure(vals["rho0_1"], vals["rho0_2"], vals["rho1_12"],
                                vals["rho2_12"])
    if "p1" in vals:
        try:
            variances = VarianceSpec.from_binary(vals["p1"], vals["p2"], corr.rho0_1,
                                                 corr.rho0_2)
        except ValueError as exc:
            raise ConfigError(f"{name}: {exc}") from None
    else:
        variances = VarianceSpec(vals["sigma1_sq"], vals["sigma2_sq"])
    inputs = DesignInputs(
        effects=EffectSpec(vals["beta1"], vals["beta2"]), variances=variances, corr=corr,
        m=vals["m"], alpha=vals["alpha"],
        target_power=target_power if target_power is not None else vals.get("target_power", 0.8),
        K=vals.get("K"), K1=vals.get("K1"), ratio=vals.get("ratio"),
        combined=CombinedOverrides(vals.get("beta_c"), vals.get("sigma_c_sq"), vals.get("rho0_c")))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DesignWarning)
        return validate(inputs)


def parse_config(source: str | Path, *, target_power: float | None = None) -> DesignInputs:
    """Read a config file (``"-"`` for stdin) and return validated inputs.

    The bundled ``circl.json`` and ``circl_unrounded.json`` are found even
    when they are not in the working directory.
    """
    text, name = _read_source(source)
    return parse_config_text(text, name, target_power=target_power)


def config_dict(inputs: DesignInputs) -> dict[str, Any]:
    """Flat key/value form of ``inputs``, the inverse of :func:`parse_config_text`."""
    v = inputs.variances
    out: dict[str, Any] = {"beta1": inputs.effects.beta1, "beta2": inputs.effects.beta2}
    if v.origin == "derived_from_binary":
        out.update(p1=v.p1, p2=v.p2)
    else:
        out.update(sigma1_sq=v.sigma1_sq, sigma2_sq=v.sigma2_sq)
    out.update(asdict(inputs.corr))
    if inputs.K is not None:
        out["K"] = inputs.K
    else:
        out.update(K1=inputs.K1, ratio=inputs.ratio)
    out.update(m=inputs.m, alpha=inputs.alpha, target_power=inputs.target_power)
    out.update({k: x for k, x in asdict(inputs.combined).items() if x is not None})
    return out


# ------------------------------------------------------------------ report

@dataclass(frozen=True)
class DistOptions:
    """Reference distributions: ``test`` for the chi-square/F methods, ``iu`` for the IU test."""

    test: str = "chisq"
    iu: str = "mvt"

    def __post_init__(self) -> None:
        if self.test not in ("chisq", "f"):
            raise ValueError(f"test distribution must be 'chisq' or 'f', got {self.test!r}")
        if self.iu not in ("mvn", "mvt"):
            raise ValueError(f"IU distribution must be 'mvn' or 'mvt', got {self.iu!r}")

    @classmethod
    def from_names(cls, names: Iterable[str]) -> DistOptions:
        test, iu = "chisq", "mvt"
        for name in names:
            key = name.strip().lower()
            if key in ("chisq", "f"):
                test = key
            elif key in ("mvn", "mvt"):
                iu = key
            else:
                raise ValueError(f"unknown distribution {name!r}; use chisq, f, mvn or mvt")
        return cls(test, iu)

    def for_method(self, method: str) -> str:
        return self.iu if method == "conjunctive_iu" else self.test


@dataclass
class DesignReport:
    """Rows in fixed method order, the inputs that produced them, and notes.

    ``errors`` maps ``"method/operation"`` to the message of any operation
    that could not be completed; its value in the row is left empty.
    """

    rows: list[MethodResult]
    inputs_echo: DesignInputs
    warnings: list[str] = field(default_factory=list)
    errors: dict[str, str] = field(default_factory=dict)
    operations: tuple[str, ...] = OPERATIONS

    def to_dict(self) -> dict[str, Any]:
        return {"inputs": config_dict(self.inputs_echo),
                "operations": list(self.operations),
                "rows": [result_to_dict(r) for r in self.rows],
                "warnings": list(self.warnings), "errors": dict(self.errors)}

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> DesignReport:
        inputs = parse_config_text(json.dumps(d["inputs"]), "<report>")
        return cls([result_from_dict(r) for r in d["rows"]], inputs, list(d["warnings"]),
                   dict(d["errors"]), tuple(d["operations"]))


def normalize_methods(names: Iterable[str] | None) -> list[str]:
    """Canonical method names in report order; None selects all methods."""
    if names is None:
        return list(METHODS)
    chosen = set()
    for name in names:
        key = name.strip().lower()
        if not key:
            continue
        if key == "all":
            return list(METHODS)
        key = METHOD_ALIASES.get(key, key)
        if key not in METHODS:
            raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
        chosen.add(key)
    return [m for m in METHODS if m in chosen]


def _engines(method: str, dist: str) -> dict[str, Callable[[DesignInputs], MethodResult]]:
    if method in ("bonferroni", "sidak", "dap"):
        return {"power": lambda x: padjust.padjust_power(x, method, dist=dist),
                "clusters": lambda x: padjust.padjust_clusters(x, method, dist=dist),
                "cluster_size": lambda x: padjust.padjust_cluster_size(x, method, dist=dist)}
    mod, prefix = {
        "combined_outcome": (combined, "combined"),
        "single_1df": (single_df, "single1df"),
        "disjunctive_2df": (disjunctive, "disjunctive"),
        "conjunctive_iu": (conjunctive, "conjunctive"),
    }[method]
    return {op: (lambda x, f=getattr(mod, f"{prefix}_{op}"): f(x, dist)) for op in OPERATIONS}


def _merge(method: str, parts: dict[str, MethodResult]) -> MethodResult:
    """One row from the power/K/m results; intermediates come from the power run."""
    base = parts.get("power") or parts.get("clusters") or parts.get("cluster_size")
    if base is None:
        return MethodResult(method, DistributionSpec.chisq(1))
    k, m = parts.get("clusters"), parts.get("cluster_size")
    po = base.per_outcome
    if po is not None and method in padjust.PADJUST_METHODS:
        po = tuple(OutcomeDetail(power=p.power if "power" in parts else None,
                                 K_raw=kk.K_raw if k else None,
                                 m_raw=mm.m_raw if m else None,
                                 lam=p.lam if "power" in parts else None)
                   for p, kk, mm in zip(base.per_outcome, (k or base).per_outcome,
                                        (m or base).per_outcome))
    extras = {}
    for op in OPERATIONS:
        if op in parts:
            extras.update({f"{op}.{key}": val for key, val in parts[op].extras.items()})
    return replace(base, power=parts["power"].power if "power" in parts else None,
                   K_required=k.K_required if k else None, K_real=k.K_real if k else None,
                   K2_required=k.K2_required if k else None,
                   m_required=m.m_required if m else None, m_real=m.m_real if m else None,
                   per_outcome=po, extras=extras)


def run_report(inputs: DesignInputs, methods: Iterable[str] | None = None,
               dist_options: DistOptions | None = None,
               operations: Sequence[str] = OPERATIONS) -> DesignReport:
    """Evaluate the selected methods and operations at the given inputs.

    Operations that fail for a method (for example an infeasible cluster
    size) are recorded in ``errors`` rather than aborting the report.
    """
    unknown = [op for op in operations if op not in OPERATIONS]
    if unknown:
        raise ValueError(f"unknown operation(s) {unknown}; choose from {OPERATIONS}")
    bad, notes = check(inputs)
    if bad:
        raise ValidationError(bad)
    dist_options = dist_options or DistOptions()
    report = DesignReport([], inputs, list(notes), {}, tuple(operations))
    chosen = normalize_methods(methods)
    for method in chosen:
        engines = _engines(method, dist_options.for_method(method))
        parts = {}
        for op in operations:
            try:
                parts[op] = engines[op](inputs)
            except H2PError as exc:
                report.errors[f"{method}/{op}"] = str(exc)
        report.rows.append(_merge(method, parts))
    if "combined_outcome" in chosen:
        report.warnings.append(combined.INTERPRETATION_CAVEAT)
        s_c = inputs.combined.sigma_c_sq
        derived = combined_variance(inputs.variances.sigma1_sq, inputs.variances.sigma2_sq,
                                    inputs.corr.rho2_12)
        if s_c is not None and s_c != derived:
            report.warnings.append(
                f"combined outcome uses the supplied sigma_c_sq={_fmt(s_c)}; the value implied "
                f"by the outcome variances is {_fmt(derived)}")
    return report


# ------------------------------------------------------------------ serialization

def result_to_dict(r: MethodResult) -> dict[str, Any]:
    d = {f.name: getattr(r, f.name) for f in fields(r)}
    d["dist"] = {"family": r.dist.family, "df2": r.dist.df2}
    d["per_outcome"] = None if r.per_outcome is None else [asdict(p) for p in r.per_outcome]
    d["vifs"] = None if r.vifs is None else asdict(r.vifs)
    d["extras"] = dict(r.extras)
    return d


def result_from_dict(d: Mapping[str, Any]) -> MethodResult:
    kw = dict(d)
    kw["dist"] = DistributionSpec(d["dist"]["family"], d["dist"]["df2"])
    if d["per_outcome"] is not None:
        kw["per_outcome"] = tuple(OutcomeDetail(**p) for p in d["per_outcome"])
    if d["vifs"] is not None:
        kw["vifs"] = VifSet(**d["vifs"])
    kw["extras"] = dict(d["extras"])
    return MethodResult(**kw)


def _fmt(x: float | None) -> str:
    """Four significant digits; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    if not math.isfinite(x):
        return str(x)
    return f"{x:.4g}"


def _pct(p: float | None) -> str:
    return "" if p is None else f"{100.0 * p:.2f}%"


def _int(k: int | None) -> str:
    return "" if k is None else str(k)


def _columns(ops: Sequence[str]) -> list[str]:
    cols = ["method", "distribution"]
    if "power" in ops:
        cols += ["power", "lambda", "critical_value", "adjusted_alpha"]
    if "clusters" in ops:
        cols += ["K", "K_real"]
    if "cluster_size" in ops:
        cols += ["m", "m_real"]
    return cols


def _row_cells(r: MethodResult, ops: Sequence[str], label: bool) -> dict[str, str]:
    cells = {"method": METHOD_LABELS[r.method] if label else r.method,
             "distribution": r.dist.label if r.power is not None or r.K_required is not None
             or r.m_required is not None else "",
             "power": _pct(r.power), "lambda": _fmt(r.lam),
             "critical_value": _fmt(r.critical_value), "adjusted_alpha": _fmt(r.adjusted_alpha),
             "K": _int(r.K_required), "K_real": _fmt(r.K_real),
             "m": _int(r.m_required), "m_real": _fmt(r.m_real)}
    if "power" not in ops:
        cells["lambda"] = cells["critical_value"] = ""
    return cells


def _markdown(report: DesignReport) -> str:
    ops = report.operations
    cols = _columns(ops)
    out = ["| " + " | ".join(cols) + " |", "|" + "|".join("---" for _ in cols) + "|"]
    for r in report.rows:
        cells = _row_cells(r, ops, label=True)
        out.append("| " + " | ".join(cells[c] for c in cols) + " |")
    breakdown = [r for r in report.rows if r.per_outcome is not None
                 and r.method in padjust.PADJUST_METHODS]
    if breakdown:
        out += ["", "Per-outcome breakdown (before taking min power / max K and m):", "",
                "| method | outcome | power | lambda | K_raw | m_raw |",
                "|---|---|---|---|---|---|"]
        for r in breakdown:
            for q, p in enumerate(r.per_outcome, start=1):
                out.append(f"| {r.method} | {q} | {_pct(p.power)} | {_fmt(p.lam)} | "
                           f"{_fmt(p.K_raw)} | {_fmt(p.m_raw)} |")
    if report.warnings or report.errors:
        out.append("")
        out += [f"- note: {w}" for w in report.warnings]
        out += [f"- error ({k}): {v}" for k, v in report.errors.items()]
    return "\n".join(out) + "\n"


def _csv(report: DesignReport) -> str:
    cols = _columns(report.operations)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(cols)
    for r in report.rows:
        cells = _row_cells(r, report.operations, label=False)
        writer.writerow([cells[c] for c in cols])
    return buf.getvalue()


def emit(report: DesignReport, format: str = "markdown") -> str:
    """Render ``report`` as ``markdown``, ``csv`` or ``json`` text (LF line endings).

    JSON keeps full precision and round-trips through
    :meth:`DesignReport.from_dict`.
    """
    if format == "markdown":
        return _markdown(report)
    if format == "csv":
        return _csv(report)
    if format == "json":
        return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    raise ValueError(f"unknown format {format!r}; use markdown, csv or json")


def dap_curve(alpha: float, rho_grid: Iterable[float], Q: int = 2) -> str:
    """CSV of the D/AP level against the between-outcome correlation.

    Columns: ``rho, alpha_dap, alpha_bonferroni``.
    """
    bonf = padjust.alpha_bonferroni(alpha, Q).value
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["rho", "alpha_dap", "alpha_bonferroni"])
    for rho in rho_grid:
        writer.writerow([_fmt(float(rho)), _fmt(padjust.alpha_dap(alpha, rho, Q).value),
                         _fmt(bonf)])
    return buf.getvalue()
