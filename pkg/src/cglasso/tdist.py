"""Student-t tail probabilities and quantiles from the incomplete beta function.

For ``t > 0`` with ``nu`` degrees of freedom,
``P(T > t) = I_x(nu/2, 1/2) / 2`` with ``x = nu / (nu + t^2)``.
"""
import math

_TINY = 1e-300
_EPS = 1e-16


def _betacf(a, b, x):
    # modified Lentz evaluation of the incomplete beta continued fraction
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 100000):
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
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc_pair(a, b, x):
    """Return ``(I_x(a, b), 1 - I_x(a, b))``, each computed without cancellation
    on its small side."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x={x} outside [0, 1]")
    if x == 0.0:
        return 0.0, 1.0
    if x == 1.0:
        return 1.0, 0.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        lower = math.exp(log_front) * _betacf(a, b, x) / a
        return lower, 1.0 - lower
    upper = math.exp(log_front) * _betacf(b, a, 1.0 - x) / b
    return 1.0 - upper, upper


def t_sf(t, df):
    """Upper tail ``P(T > t)``."""
    x = df / (df + t * t)
    half = 0.5 * betainc_pair(0.5 * df, 0.5, x)[0]
    return half if t >= 0 else 1.0 - half


def t_pdf(t, df):
    return math.exp(math.lgamma(0.5 * (df + 1)) - math.lgamma(0.5 * df)
                    - 0.5 * math.log(df * math.pi)
                    - 0.5 * (df + 1) * math.log1p(t * t / df))


def t_isf(q, df):
    """Upper ``q`` quantile: the ``t`` with ``P(T > t) = q``.

    Brackets and bisects on ``log P(T > t)``, then polishes with Newton steps.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"q={q} outside (0, 1)")
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if q > 0.5:
        return -t_isf(1.0 - q, df)
    if q == 0.5:
        return 0.0
    target = math.log(q)
    lo, hi = 0.0, 1.0
    while t_sf(hi, df) > q:
        lo, hi = hi, 2.0 * hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if t_sf(mid, df) > q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-6 * hi:
            break
    t = 0.5 * (lo + hi)
    for _ in range(20):
        sf = t_sf(t, df)
        # Newton on log sf: d/dt log sf = -pdf / sf
        step = (math.log(sf) - target) * sf / t_pdf(t, df)
        t_new = min(max(t + step, lo), hi)
        if abs(t_new - t) <= 1e-15 * abs(t):
            t = t_new
            break
        t = t_new
    return t
