"""Validated public surface over the numeric kernels.

Every function is pure and deterministic. Argument-domain violations
raise :class:`~a4l_analytics.errors.ArgumentError`; numeric
non-convergence raises :class:`~a4l_analytics.errors.NonConvergenceError`
naming the inputs.
"""

import math

from ..errors import ArgumentError
from ._backend import kernels


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and 0 <= x <= 1."""
    if not (a > 0.0 and b > 0.0):
        raise ArgumentError(f"a and b must be positive, got a={a}, b={b}")
    if not (0.0 <= x <= 1.0):
        raise ArgumentError(f"x must lie in [0, 1], got x={x}")
    return kernels.betainc(a, b, x)


def student_t_cdf(x: float, df: float) -> float:
    """CDF of the central Student t distribution."""
    if not df > 0.0:
        raise ArgumentError(f"df must be positive, got df={df}")
    return kernels.student_t_cdf(x, df)


def normal_cdf(z: float) -> float:
    """Standard normal CDF."""
    return kernels.normal_cdf(z)


def noncentral_t_cdf(x: float, df: float, nc: float) -> float:
    """CDF of the noncentral t distribution with noncentrality nc."""
    if not df > 0.0:
        raise ArgumentError(f"df must be positive, got df={df}")
    return kernels.noncentral_t_cdf(x, df, nc)


def student_t_pdf(x: float, df: float) -> float:
    """Density of the central Student t distribution."""
    if not df > 0.0:
        raise ArgumentError(f"df must be positive, got df={df}")
    ln = (
        math.lgamma(0.5 * (df + 1.0))
        - math.lgamma(0.5 * df)
        - 0.5 * math.log(df * math.pi)
        - 0.5 * (df + 1.0) * math.log1p(x * x / df)
    )
    return math.exp(ln)


def student_t_quantile(p: float, df: float) -> float:
    """Inverse CDF of the central Student t distribution.

    Bracket-expansion plus bisection, polished with Newton steps; the
    returned t satisfies |cdf(t) - p| within a few ulps of p.
    """
    if not df > 0.0:
        raise ArgumentError(f"df must be positive, got df={df}")
    if not (0.0 < p < 1.0):
        raise ArgumentError(f"p must lie in (0, 1), got p={p}")
    if p == 0.5:
        return 0.0

    # Symmetric reduction to the upper half.
    if p < 0.5:
        return -student_t_quantile(1.0 - p, df)

    lo, hi = 0.0, 1.0
    while kernels.student_t_cdf(hi, df) < p:
        lo = hi
        hi *= 2.0
        if hi > 1e300:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if kernels.student_t_cdf(mid, df) < p:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    for _ in range(4):
        err = kernels.student_t_cdf(t, df) - p
        d = student_t_pdf(t, df)
        if d <= 0.0:
            break
        step = err / d
        t_next = t - step
        if not (lo <= t_next <= hi):
            break
        t = t_next
        if abs(step) < 1e-14 * (1.0 + abs(t)):
            break
    return t
