"""Pure-Python numerical kernels.

Same algorithms, same constants and the same error signalling as the compiled
``_ckernels`` module. Used when the extension is not built, or when
``H2P_PURE_PYTHON=1`` is set.
"""
from __future__ import annotations

import math

from scipy.special import betainc, gammainc

from ..errors import ConvergenceError

# Gauss-Kronrod 7/15 nodes and weights (QUADPACK qk15).
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)

# |x| beyond which the standard normal density is treated as zero (Q(9) ~ 1e-19).
NORMAL_SPAN = 9.0
# Laurent-Massart tail exponent for the chi-square range: mass outside < 2e-20.
CHISQ_TAIL_T = 45.0
_INV_SQRT_2PI = 0.398942280401432677939946059934
_SQRT1_2 = 0.707106781186547524400844362105


def upper_normal(z: float) -> float:
    """P(Z > z) for a standard normal Z."""
    return 0.5 * math.erfc(z * _SQRT1_2)


def _poisson_mixture(h: float, term, abs_tol: float, max_terms: int) -> float:
    # sum_j Pois(j; h) * term(j), expanded outward from the mode until the
    # untouched Poisson mass drops below abs_tol.
    j0 = int(math.floor(h))
    # j0 = 0 branch avoids 0 * log(0) when h underflows
    w0 = math.exp(-h) if j0 == 0 else math.exp(-h + j0 * math.log(h) - math.lgamma(j0 + 1.0))
    total = w0 * term(j0)
    mass = w0
    up_j, up_w = j0, w0
    dn_j, dn_w = j0, w0
    n = 1
    while 1.0 - mass >= abs_tol:
        if n >= max_terms:
            raise ConvergenceError(
                f"Poisson mixture did not converge within {max_terms} terms "
                f"(noncentrality {2 * h:g}, remaining mass {1.0 - mass:.3g})")
        next_up = up_w * h / (up_j + 1.0)
        next_dn = dn_w * dn_j / h if dn_j > 0 else 0.0
        if next_up == 0.0 and next_dn == 0.0:
            break
        if next_up >= next_dn:
            up_j += 1
            up_w = next_up
            total += up_w * term(up_j)
            mass += up_w
        else:
            dn_j -= 1
            dn_w = next_dn
            total += dn_w * term(dn_j)
            mass += dn_w
        n += 1
    return total


def ncx2_cdf(x: float, df: float, lam: float, abs_tol: float, max_terms: int) -> float:
    if x <= 0.0:
        return 0.0
    half_x = 0.5 * x
    if lam <= 0.0:
        return float(gammainc(0.5 * df, half_x))
    return _poisson_mixture(0.5 * lam, lambda j: float(gammainc(0.5 * df + j, half_x)),
                            abs_tol, max_terms)


def ncf_cdf(x: float, df1: float, df2: float, lam: float, abs_tol: float,
            max_terms: int) -> float:
    if x <= 0.0:
        return 0.0
    y = df1 * x / (df1 * x + df2)
    b = 0.5 * df2
    if lam <= 0.0:
        return float(betainc(0.5 * df1, b, y))
    return _poisson_mixture(0.5 * lam, lambda j: float(betainc(0.5 * df1 + j, b, y)),
                            abs_tol, max_terms)


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = f(c)
    resk = fc * WGK[7]
    resg = fc * WG[3]
    for j in range(7):
        dx = h * XGK[j]
        pair = f(c - dx) + f(c + dx)
        resk += WGK[j] * pair
        if j % 2 == 1:
            resg += WG[j // 2] * pair
    return resk * h, abs(resk - resg) * h


def adaptive_gk(f, points: list[float], abs_tol: float, rel_tol: float,
                max_sub: int) -> float:
    """Globally adaptive G7/K15 quadrature over consecutive ``points``.

    Raises ConvergenceError when ``max_sub`` bisections do not reach
    ``max(abs_tol, rel_tol * |integral|)``.
    """
    lo: list[float] = []
    hi: list[float] = []
    res: list[float] = []
    err: list[float] = []
    for a, b in zip(points[:-1], points[1:]):
        if b > a:
            r, e = _gk15(f, a, b)
            lo.append(a)
            hi.append(b)
            res.append(r)
            err.append(e)
    n_split = 0
    while True:
        total = sum(res)
        total_err = sum(err)
        if total_err <= max(abs_tol, rel_tol * abs(total)):
            return total
        if n_split >= max_sub:
            raise ConvergenceError(
                f"adaptive quadrature hit {max_sub} subdivisions "
                f"(error estimate {total_err:.3g})")
        i = max(range(len(err)), key=err.__getitem__)
        a, b = lo[i], hi[i]
        mid = 0.5 * (a + b)
        if not (a < mid < b) or (b - a) <= 1e-14 * max(1.0, abs(mid)):
            # Interval at floating-point resolution: accept what we have.
            err[i] = 0.0
            continue
        r1, e1 = _gk15(f, a, mid)
        r2, e2 = _gk15(f, mid, b)
        hi[i], res[i], err[i] = mid, r1, e1
        lo.append(mid)
        hi.append(b)
        res.append(r2)
        err.append(e2)
        n_split += 1


def bvn_orthant(c1: float, c2: float, mu1: float, mu2: float, rho: float,
                abs_tol: float, rel_tol: float, max_sub: int) -> float:
    a = c1 - mu1
    b = c2 - mu2
    if rho == 0.0:
        return upper_normal(a) * upper_normal(b)
    if a >= NORMAL_SPAN:
        return 0.0
    s = math.sqrt((1.0 - rho) * (1.0 + rho))
    lo = max(a, -NORMAL_SPAN)
    hi = NORMAL_SPAN

    def integrand(x: float) -> float:
        return _INV_SQRT_2PI * math.exp(-0.5 * x * x) * upper_normal((b - rho * x) / s)

    points = [lo]
    kink = b / rho
    if lo < kink < hi:
        points.append(kink)
    points.append(hi)
    return adaptive_gk(integrand, points, abs_tol, rel_tol, max_sub)


def chi_scale_range(df: float) -> tuple[float, float]:
    """Bounds on u = sqrt(S/df), S ~ chi2(df), outside which the mass is negligible."""
    t = CHISQ_TAIL_T
    root = 2.0 * math.sqrt(df * t)
    s_lo = max(0.0, df - root)
    s_hi = df + root + 2.0 * t
    return math.sqrt(s_lo / df), math.sqrt(s_hi / df)


def chi_scale_logpdf(u: float, df: float) -> float:
    """Log density of u = sqrt(S/df) for S ~ chi2(df)."""
    half = 0.5 * df
    return (math.log(2.0 * df) + math.log(u) + (half - 1.0) * (math.log(df) + 2.0 * math.log(u))
            - 0.5 * df * u * u - half * math.log(2.0) - math.lgamma(half))


def bvt_orthant(c1: float, c2: float, mu1: float, mu2: float, rho: float, df: float,
                abs_tol: float, rel_tol: float, max_sub: int) -> float:
    # T_q = (Z_q + mu_q) / U with U = sqrt(S/df):
    # P(T1 > c1, T2 > c2) = E_U[ P(Z1 > c1 U - mu1, Z2 > c2 U - mu2) ].
    if math.isinf(df):
        return bvn_orthant(c1, c2, mu1, mu2, rho, abs_tol, rel_tol, max_sub)
    inner_tol = 0.1 * abs_tol

    def integrand(u: float) -> float:
        if u <= 0.0:
            return 0.0
        w = math.exp(chi_scale_logpdf(u, df))
        if w == 0.0:
            return 0.0
        return w * bvn_orthant(c1 * u, c2 * u, mu1, mu2, rho, inner_tol, rel_tol, max_sub)

    u_lo, u_hi = chi_scale_range(df)
    points = [u_lo, 1.0, u_hi] if u_lo < 1.0 < u_hi else [u_lo, u_hi]
    return adaptive_gk(integrand, points, abs_tol, rel_tol, max_sub)
