"""Time the compiled and pure-Python kernel backends.

Run ``python benchmarks/bench_kernels.py`` from the repository root. Each
kernel is timed on a fixed batch of arguments; the last section times the
full seven-method report on the bundled example.
"""
from __future__ import annotations

import argparse
import random
import timeit

from h2p.numerics import available_backends, core
from h2p.report import parse_config, run_report


def _batches(n: int, seed: int = 0) -> dict[str, list[tuple]]:
    rng = random.Random(seed)
    return {
        "ncx2_cdf": [(rng.uniform(0.5, 20.0), rng.choice((1.0, 2.0)), rng.uniform(0.0, 40.0),
                      1e-10, 10_000) for _ in range(n)],
        "ncf_cdf": [(rng.uniform(0.5, 10.0), rng.choice((1.0, 2.0)), rng.uniform(6.0, 60.0),
                     rng.uniform(0.0, 40.0), 1e-10, 10_000) for _ in range(n)],
        "bvn_orthant": [(1.645, 1.645, rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
                         rng.uniform(-0.8, 0.9), 1e-10, 1e-10, 200) for _ in range(n)],
        "bvt_orthant": [(1.7, 1.7, rng.uniform(0.0, 4.0), rng.uniform(0.0, 4.0),
                         rng.uniform(-0.8, 0.9), float(rng.randint(2, 60)), 1e-10, 1e-10, 200)
                        for _ in range(n)],
    }


def _time(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv: list[str] | None = None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("-n", type=int, default=200, help="calls per kernel batch")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    backends = available_backends()
    batches = _batches(args.n)
    inputs = parse_config("circl.json")
    times: dict[str, dict[str, float]] = {}
    for name, mod in sorted(backends.items()):
        row = {}
        for kernel, batch in batches.items():
            fn = getattr(mod, kernel)
            row[kernel] = _time(lambda: [fn(*a) for a in batch], args.repeat)
        saved = core.kernels
        core.kernels = mod
        try:
            row["report"] = _time(lambda: run_report(inputs), args.repeat)
        finally:
            core.kernels = saved
        times[name] = row

    names = sorted(times)
    print(f"{'kernel':<12}" + "".join(f"{n:>14}" for n in names)
          + ("     speedup" if len(names) == 2 else ""))
    for kernel in list(batches) + ["report"]:
        cells = "".join(f"{times[n][kernel] * 1e3:>12.2f}ms" for n in names)
        if len(names) == 2:
            cells += f"{times['python'][kernel] / times['compiled'][kernel]:>11.1f}x"
        print(f"{kernel:<12}{cells}")
    if "compiled" not in backends:
        print("compiled backend not built; only the pure-Python kernels were timed")


if __name__ == "__main__":
    main()
