# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled numerical kernels.

Mirrors ``_pykernels`` line for line: Poisson-mixture series for the
noncentral chi-square and F CDFs, and globally adaptive Gauss-Kronrod
quadrature for bivariate normal and noncentral bivariate t orthants.
"""
from libc.math cimport exp, log, sqrt, erfc, lgamma, fabs, floor, isinf
from libc.stdlib cimport malloc, free
from scipy.special.cython_special cimport gammainc, betainc

from ..errors import ConvergenceError

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
WGK[:] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
WG[:] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

cdef double NORMAL_SPAN = 9.0
cdef double CHISQ_TAIL_T = 45.0
cdef double INV_SQRT_2PI = 0.398942280401432677939946059934
cdef double SQRT1_2 = 0.707106781186547524400844362105

# quadrature status codes
cdef enum:
    QUAD_OK = 0
    QUAD_MAXSUB = 1
    QUAD_NOMEM = 2

ctypedef double (*integrand_t)(double, void*) noexcept nogil


cdef inline double upper_normal(double z) noexcept nogil:
    return 0.5 * erfc(z * SQRT1_2)


# ---------------------------------------------------------------- series

cdef double _series_term(int kind, double a, double b, double y, int j) noexcept nogil:
    if kind == 0:
        return gammainc(a + j, y)
    return betainc(a + j, b, y)


cdef double _poisson_mixture(int kind, double a, double b, double y, double h,
                             double abs_tol, int max_terms, int* status) noexcept nogil:
    cdef int j0 = <int>floor(h)
    # j0 = 0 branch avoids 0 * log(0) when h underflows
    cdef double w0 = exp(-h) if j0 == 0 else exp(-h + j0 * log(h) - lgamma(j0 + 1.0))
    cdef double total = w0 * _series_term(kind, a, b, y, j0)
    cdef double mass = w0
    cdef int up_j = j0, dn_j = j0, n = 1
    cdef double up_w = w0, dn_w = w0, next_up, next_dn
    status[0] = 0
    while 1.0 - mass >= abs_tol:
        if n >= max_terms:
            status[0] = 1
            return 1.0 - mass
        next_up = up_w * h / (up_j + 1.0)
        next_dn = dn_w * dn_j / h if dn_j > 0 else 0.0
        if next_up == 0.0 and next_dn == 0.0:
            break
        if next_up >= next_dn:
            up_j += 1
            up_w = next_up
            total += up_w * _series_term(kind, a, b, y, up_j)
            mass += up_w
        else:
            dn_j -= 1
            dn_w = next_dn
            total += dn_w * _series_term(kind, a, b, y, dn_j)
            mass += dn_w
        n += 1
    return total


cdef double _mixture_or_raise(int kind, double a, double b, double y, double lam,
                              double abs_tol, int max_terms) except? -1.0:
    cdef int status = 0
    cdef double out
    with nogil:
        out = _poisson_mixture(kind, a, b, y, 0.5 * lam, abs_tol, max_terms, &status)
    if status:
        raise ConvergenceError(
            f"Poisson mixture did not converge within {max_terms} terms "
            f"(noncentrality {lam:g}, remaining mass {out:.3g})")
    return out


def ncx2_cdf(double x, double df, double lam, double abs_tol, int max_terms):
    if x <= 0.0:
        return 0.0
    if lam <= 0.0:
        return gammainc(0.5 * df, 0.5 * x)
    return _mixture_or_raise(0, 0.5 * df, 0.0, 0.5 * x, lam, abs_tol, max_terms)


def ncf_cdf(double x, double df1, double df2, double lam, double abs_tol, int max_terms):
    if x <= 0.0:
        return 0.0
    cdef double y = df1 * x / (df1 * x + df2)
    if lam <= 0.0:
        return betainc(0.5 * df1, 0.5 * df2, y)
    return _mixture_or_raise(1, 0.5 * df1, 0.5 * df2, y, lam, abs_tol, max_terms)


# ---------------------------------------------------------------- quadrature

cdef void _gk15(integrand_t f, void* p, double a, double b,
                double* result, double* abserr) noexcept nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fc = f(c, p)
    cdef double resk = fc * WGK[7]
    cdef double resg = fc * WG[3]
    cdef double dx, pair
    cdef int j
    for j in range(7):
        dx = h * XGK[j]
        pair = f(c - dx, p) + f(c + dx, p)
        resk += WGK[j] * pair
        if j % 2 == 1:
            resg += WG[j // 2] * pair
    result[0] = resk * h
    abserr[0] = fabs(resk - resg) * h


cdef double _adaptive_gk(integrand_t f, void* p, double* points, int npoints,
                         double abs_tol, double rel_tol, int max_sub,
                         int* status) noexcept nogil:
    cdef int cap = max_sub + npoints + 1
    cdef double* lo = <double*>malloc(cap * sizeof(double))
    cdef double* hi = <double*>malloc(cap * sizeof(double))
    cdef double* res = <double*>malloc(cap * sizeof(double))
    cdef double* err = <double*>malloc(cap * sizeof(double))
    cdef int n = 0, n_split = 0, i, k, worst
    cdef double total, total_err, a, b, mid, r1, e1, r2, e2, tol
    status[0] = QUAD_OK
    if lo == NULL or hi == NULL or res == NULL or err == NULL:
        status[0] = QUAD_NOMEM
        free(lo); free(hi); free(res); free(err)
        return 0.0
    for k in range(npoints - 1):
        if points[k + 1] > points[k]:
            lo[n] = points[k]
            hi[n] = points[k + 1]
            _gk15(f, p, lo[n], hi[n], &res[n], &err[n])
            n += 1
    while True:
        total = 0.0
        total_err = 0.0
        worst = 0
        for i in range(n):
            total += res[i]
            total_err += err[i]
            if err[i] > err[worst]:
                worst = i
        tol = rel_tol * fabs(total)
        if tol < abs_tol:
            tol = abs_tol
        if total_err <= tol:
            break
        if n_split >= max_sub:
            status[0] = QUAD_MAXSUB
            break
        a = lo[worst]
        b = hi[worst]
        mid = 0.5 * (a + b)
        if not (a < mid and mid < b) or (b - a) <= 1e-14 * (fabs(mid) if fabs(mid) > 1.0 else 1.0):
            err[worst] = 0.0
            continue
        _gk15(f, p, a, mid, &r1, &e1)
        _gk15(f, p, mid, b, &r2, &e2)
        hi[worst] = mid
        res[worst] = r1
        err[worst] = e1
        lo[n] = mid
        hi[n] = b
        res[n] = r2
        err[n] = e2
        n += 1
        n_split += 1
    free(lo); free(hi); free(res); free(err)
    return total


cdef struct BvnParams:
    double b
    double rho
    double s


cdef double _bvn_integrand(double x, void* vp) noexcept nogil:
    cdef BvnParams* p = <BvnParams*>vp
    return INV_SQRT_2PI * exp(-0.5 * x * x) * upper_normal((p.b - p.rho * x) / p.s)


cdef double _bvn_orthant(double c1, double c2, double mu1, double mu2, double rho,
                         double abs_tol, double rel_tol, int max_sub,
                         int* status) noexcept nogil:
    cdef double a = c1 - mu1
    cdef double b = c2 - mu2
    cdef BvnParams p
    cdef double points[3]
    cdef int npoints = 0
    cdef double lo, hi, kink
    status[0] = QUAD_OK
    if rho == 0.0:
        return upper_normal(a) * upper_normal(b)
    if a >= NORMAL_SPAN:
        return 0.0
    p.b = b
    p.rho = rho
    p.s = sqrt((1.0 - rho) * (1.0 + rho))
    lo = a if a > -NORMAL_SPAN else -NORMAL_SPAN
    hi = NORMAL_SPAN
    points[npoints] = lo
    npoints += 1
    kink = b / rho
    if lo < kink and kink < hi:
        points[npoints] = kink
        npoints += 1
    points[npoints] = hi
    npoints += 1
    return _adaptive_gk(_bvn_integrand, &p, points, npoints, abs_tol, rel_tol, max_sub, status)


cdef struct BvtParams:
    double c1
    double c2
    double mu1
    double mu2
    double rho
    double df
    double log_norm
    double inner_tol
    double rel_tol
    int max_sub
    int failed


cdef double _bvt_integrand(double u, void* vp) noexcept nogil:
    cdef BvtParams* p = <BvtParams*>vp
    cdef int status = 0
    cdef double half, w, inner
    if u <= 0.0:
        return 0.0
    half = 0.5 * p.df
    w = exp(p.log_norm + log(u) + (half - 1.0) * (log(p.df) + 2.0 * log(u)) - 0.5 * p.df * u * u)
    if w == 0.0:
        return 0.0
    inner = _bvn_orthant(p.c1 * u, p.c2 * u, p.mu1, p.mu2, p.rho,
                         p.inner_tol, p.rel_tol, p.max_sub, &status)
    if status != QUAD_OK:
        p.failed = status
    return w * inner


def _raise_for(int status, str what):
    if status == QUAD_MAXSUB:
        raise ConvergenceError(f"{what}: adaptive quadrature hit the subdivision limit")
    if status == QUAD_NOMEM:
        raise MemoryError(what)


def bvn_orthant(double c1, double c2, double mu1, double mu2, double rho,
                double abs_tol, double rel_tol, int max_sub):
    cdef int status = 0
    cdef double out
    with nogil:
        out = _bvn_orthant(c1, c2, mu1, mu2, rho, abs_tol, rel_tol, max_sub, &status)
    _raise_for(status, "bivariate normal orthant")
    return out


def bvt_orthant(double c1, double c2, double mu1, double mu2, double rho, double df,
                double abs_tol, double rel_tol, int max_sub):
    cdef BvtParams p
    cdef double points[3]
    cdef int npoints = 0, status = 0
    cdef double t, root, s_lo, s_hi, u_lo, u_hi, half, out
    if isinf(df):
        return bvn_orthant(c1, c2, mu1, mu2, rho, abs_tol, rel_tol, max_sub)
    half = 0.5 * df
    p.c1 = c1
    p.c2 = c2
    p.mu1 = mu1
    p.mu2 = mu2
    p.rho = rho
    p.df = df
    p.log_norm = log(2.0 * df) - half * log(2.0) - lgamma(half)
    p.inner_tol = 0.1 * abs_tol
    p.rel_tol = rel_tol
    p.max_sub = max_sub
    p.failed = 0
    t = CHISQ_TAIL_T
    root = 2.0 * sqrt(df * t)
    s_lo = df - root if df - root > 0.0 else 0.0
    s_hi = df + root + 2.0 * t
    u_lo = sqrt(s_lo / df)
    u_hi = sqrt(s_hi / df)
    points[npoints] = u_lo
    npoints += 1
    if u_lo < 1.0 and 1.0 < u_hi:
        points[npoints] = 1.0
        npoints += 1
    points[npoints] = u_hi
    npoints += 1
    with nogil:
        out = _adaptive_gk(_bvt_integrand, &p, points, npoints, abs_tol, rel_tol, max_sub, &status)
    _raise_for(p.failed, "bivariate t orthant (inner)")
    _raise_for(status, "bivariate t orthant")
    return out
