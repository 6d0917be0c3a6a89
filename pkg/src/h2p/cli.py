"""Command-line interface: ``h2p {power,clusters,cluster-size,report,dap-curve}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import H2PError
from .report import DistOptions, dap_curve, emit, normalize_methods, parse_config, run_report

_OPS = {"power": ("power",), "clusters": ("clusters",), "cluster-size": ("cluster_size",),
        "report": ("power", "clusters", "cluster_size")}
EXIT_OK, EXIT_ERROR = 0, 1


def _csv_list(text: str) -> list[str]:
    return [part for part in text.split(",") if part.strip()]


def _probability(text: str) -> float:
    try:
        p = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < p < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {p}")
    return p


def _rho_grid(text: str) -> list[float]:
    try:
        grid = [float(x) for x in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad correlation grid {text!r}") from None
    if any(not 0.0 <= r <= 1.0 for r in grid):
        raise argparse.ArgumentTypeError("correlations must lie in [0, 1]")
    return grid


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="h2p",
        description="Power and sample size for cluster-randomized trials with two "
                    "co-primary outcomes.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, help="write output here instead of stdout")

    design = argparse.ArgumentParser(add_help=False)
    design.add_argument("--format", choices=("markdown", "csv", "json"), default="markdown")
    design.add_argument("--config", required=True,
                        help="flat JSON parameter file, or - for stdin")
    design.add_argument("--method", type=_csv_list, action="extend", default=None,
                        help="comma-separated methods (default: all)")
    design.add_argument("--dist", type=_csv_list, action="extend", default=[],
                        help="chisq or f for methods 1-4; mvn or mvt for the IU test "
                             "(default: chisq and mvt)")
    design.add_argument("--target-power", type=_probability, default=None,
                        help="override the config's target power")

    helps = {"power": "power at the configured K and m",
             "clusters": "clusters per arm for the target power",
             "cluster-size": "cluster size for the target power",
             "report": "power, clusters and cluster size for each method"}
    for name, text in helps.items():
        sub.add_parser(name, parents=[design, common], help=text, description=text)

    curve = sub.add_parser("dap-curve", parents=[common],
                           help="D/AP significance level against the outcome correlation")
    curve.add_argument("--format", choices=("csv",), default="csv")
    curve.add_argument("--alpha", type=_probability, default=0.05)
    curve.add_argument("--rho", type=_rho_grid,
                       default=[round(0.05 * i, 2) for i in range(21)],
                       help="comma-separated correlations in [0, 1] (default 0, 0.05, ..., 1)")
    return parser


def _write(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dap-curve":
            _write(dap_curve(args.alpha, args.rho), args.out)
            return EXIT_OK
        methods = normalize_methods(args.method)
        dists = DistOptions.from_names(args.dist)
        inputs = parse_config(args.config, target_power=args.target_power)
        report = run_report(inputs, methods, dists, _OPS[args.command])
        _write(emit(report, args.format), args.out)
        if report.errors:
            for key, msg in report.errors.items():
                print(f"h2p: {key}: {msg}", file=sys.stderr)
            return EXIT_ERROR
        return EXIT_OK
    except (H2PError, ValueError, OSError) as exc:
        print(f"h2p: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
