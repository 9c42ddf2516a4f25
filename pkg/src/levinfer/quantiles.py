"""Normal and Student-t distribution and quantile functions.

Implemented here rather than delegated so that golden values are stable
across platforms and library versions.  Quantiles start from a closed-form
approximation and are polished by Newton steps against the CDFs below.
"""
from __future__ import annotations

import math
from functools import lru_cache

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)

# Acklam's rational approximation to the normal quantile (rel. error 1.15e-9)
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _check_q(q):
    if not (0.0 < q < 1.0):
        raise ValueError(f"probability must lie strictly between 0 and 1, got {q!r}")


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / _SQRT2)


def normal_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / _SQRT2PI


def _acklam(q):
    if q < _P_LOW:
        s = math.sqrt(-2.0 * math.log(q))
        return ((((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5])
                / ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0))
    if q > 1.0 - _P_LOW:
        s = math.sqrt(-2.0 * math.log1p(-q))
        return -((((((_C[0] * s + _C[1]) * s + _C[2]) * s + _C[3]) * s + _C[4]) * s + _C[5])
                 / ((((_D[0] * s + _D[1]) * s + _D[2]) * s + _D[3]) * s + 1.0))
    u = q - 0.5
    t = u * u
    return (u * (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5])
            / (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0))


def normal_quantile(q: float) -> float:
    """Inverse standard normal CDF."""
    return _normal_quantile(float(q))


@lru_cache(maxsize=4096)
def _normal_quantile(q):
    _check_q(q)
    if q == 0.5:
        return 0.0
    # solve in the lower tail for accuracy, then reflect
    lower = min(q, 1.0 - q)  # 1 - q is exact for q >= 0.5
    x = _acklam(lower)
    # one Halley step against erfc
    e = normal_cdf(x) - lower
    u = e * _SQRT2PI * math.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    return x if q < 0.5 else -x


# ------------------------------------------------------------------ #
# Student t
# ------------------------------------------------------------------ #

_TINY = 1e-300
_CF_EPS = 1e-16
_CF_MAXITER = 100_000


def _betacf(a, b, x):
    """Continued fraction for the regularized incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAXITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc_reg(a: float, b: float, x: float, y: float | None = None) -> float:
    """Regularized incomplete beta ``I_x(a, b)``; ``y = 1 - x`` may be passed exactly."""
    if y is None:
        y = 1.0 - x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, y) / b


def t_cdf(t: float, dof: float) -> float:
    if t == 0.0:
        return 0.5
    t2 = t * t
    x = dof / (dof + t2)
    y = t2 / (dof + t2)
    tail = 0.5 * betainc_reg(0.5 * dof, 0.5, x, y)
    return 1.0 - tail if t > 0 else tail


def t_pdf(t: float, dof: float) -> float:
    log_c = math.lgamma(0.5 * (dof + 1.0)) - math.lgamma(0.5 * dof) - 0.5 * math.log(dof * math.pi)
    return math.exp(log_c - 0.5 * (dof + 1.0) * math.log1p(t * t / dof))


def _hill_upper(p, n):
    """Hill (1970), ACM Algorithm 396: upper two-tailed t quantile for tail area ``p``."""
    half_pi = 0.5 * math.pi
    a = 1.0 / (n - 0.5)
    b = 48.0 / (a * a)
    c = ((20700.0 * a / b - 98.0) * a - 16.0) * a + 96.36
    d = ((94.5 / (b + c) - 3.0) / b + 1.0) * math.sqrt(a * half_pi) * n
    x = d * p
    y = x ** (2.0 / n)
    if y > 0.05 + a:
        x = normal_quantile(0.5 * p)
        y = x * x
        if n < 5:
            c = c + 0.3 * (n - 4.5) * (x + 0.6)
        c = (((0.05 * d * x - 5.0) * x - 7.0) * x - 2.0) * x + b + c
        y = (((((0.4 * y + 6.3) * y + 36.0) * y + 94.5) / c - y - 3.0) / b + 1.0) * x
        y = a * y * y
        y = math.expm1(y) if y > 0.1 else ((y + 4.0) * y + 12.0) * y * y / 24.0 + y
    else:
        y = ((1.0 / (((n + 6.0) / (n * y) - 0.089 * d - 0.822) * (n + 2.0) * 3.0)
              + 0.5 / (n + 4.0)) * y - 1.0) * (n + 1.0) / (n + 2.0) + 1.0 / y
    return math.sqrt(n * y)


def t_quantile(q: float, dof: int) -> float:
    """Inverse Student-t CDF with ``dof`` degrees of freedom."""
    try:
        ok = math.isfinite(dof) and int(dof) == dof and dof >= 1
    except TypeError:
        ok = False
    if not ok:
        raise ValueError(f"dof must be a positive integer, got {dof!r}")
    return _t_quantile(float(q), int(dof))


@lru_cache(maxsize=4096)
def _t_quantile(q, dof):
    _check_q(q)
    if q == 0.5:
        return 0.0
    upper = q > 0.5
    tail = 1.0 - q if upper else q  # one-sided tail area
    if dof == 1:
        t = 1.0 / math.tan(math.pi * tail)
    elif dof == 2:
        t = math.sqrt(2.0 / (4.0 * tail * (1.0 - tail)) - 2.0)
    else:
        t = _hill_upper(2.0 * tail, dof)
        for _ in range(8):
            # target upper-tail probability; 1 - cdf via the lower tail of -t
            err = t_cdf(-t, dof) - tail
            step = err / t_pdf(t, dof)
            t += step
            if abs(step) <= 1e-14 * max(1.0, abs(t)):
                break
    return t if upper else -t
