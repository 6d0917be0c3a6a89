"""Independent reference computations used only by the tests.

None of these share code with the package kernels: Monte Carlo sampling,
brute-force tensor-grid integration and plain bisection.
"""
from __future__ import annotations

import math

import numpy as np


def mc_ncx2_cdf(x: float, df: int, lam: float, n: int = 1_000_000, seed: int = 0
                ) -> tuple[float, float]:
    """Monte Carlo P(X <= x), X ~ chi2(df, lam): (estimate, standard error)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n) + math.sqrt(lam)
    s = z * z
    if df > 1:
        s = s + rng.chisquare(df - 1, n)
    p = float(np.mean(s <= x))
    return p, math.sqrt(max(p * (1.0 - p), 1e-12) / n)


def grid_bvn_upper(c1: float, c2: float, mu1: float, mu2: float, rho: float,
                   n: int = 1000, span: float = 8.0) -> float:
    """P(W1 > c1, W2 > c2) by a midpoint tensor grid in standardized coordinates.

    The rectangle [c - mu, span]^2 is split into n x n cells and the
    bivariate normal density is summed at the cell centres.
    """
    a, b = c1 - mu1, c2 - mu2
    if a >= span or b >= span:
        return 0.0
    a, b = max(a, -span), max(b, -span)
    hx, hy = (span - a) / n, (span - b) / n
    x = a + hx * (np.arange(n) + 0.5)
    y = b + hy * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(x, y, indexing="ij")
    det = 1.0 - rho * rho
    dens = np.exp(-(X * X - 2.0 * rho * X * Y + Y * Y) / (2.0 * det)) / (2.0 * math.pi
                                                                        * math.sqrt(det))
    return float(dens.sum() * hx * hy)


def mc_bvt_upper(c1: float, c2: float, mu1: float, mu2: float, rho: float, df: float,
                 n: int = 1_000_000, seed: int = 1) -> tuple[float, float]:
    """Monte Carlo P(T1 > c1, T2 > c2) for T = (Z + mu) / sqrt(S/df)."""
    rng = np.random.default_rng(seed)
    z1 = rng.standard_normal(n)
    z2 = rho * z1 + math.sqrt(1.0 - rho * rho) * rng.standard_normal(n)
    u = np.sqrt(rng.chisquare(df, n) / df) if math.isfinite(df) else 1.0
    hit = ((z1 + mu1) / u > c1) & ((z2 + mu2) / u > c2)
    p = float(np.mean(hit))
    return p, math.sqrt(max(p * (1.0 - p), 1e-12) / n)


def bisect_quantile(cdf, p: float, lo: float, hi: float, tol: float = 1e-12) -> float:
    """Plain bisection for cdf(x) = p on [lo, hi]."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cdf(mid) < p:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)
