"""Paired significance testing and confidence intervals.

The Student t distribution is evaluated through the regularized incomplete
beta function (continued-fraction expansion), and quantiles by bisection
on that CDF, so the module has no external numeric dependencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float  # two-sided
    n: int


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    # Lentz's method for the incomplete beta continued fraction.
    max_iterations = 300
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iterations + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) for a, b > 0 and x in [0, 1]."""
    if not (a > 0 and b > 0):
        raise ValueError(f"shape parameters must be positive, got a={a}, b={b}")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    front = math.exp(
        a * math.log(x) + b * math.log1p(-x) - _log_beta(a, b)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, 1.0 - x) / b


def student_t_sf2(t: float, df: int) -> float:
    """Two-sided tail probability P(|T| >= |t|) for df degrees of freedom."""
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    if t2 > df:
        # |t| large: df/(df + t^2) is small and accurate.
        return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t2))
    # |t| small: go through the complement to avoid the cancellation in
    # df/(df + t^2) ~ 1.
    return 1.0 - regularized_incomplete_beta(0.5, df / 2.0, t2 / (df + t2))


def student_t_cdf(t: float, df: int) -> float:
    half_tail = student_t_sf2(t, df) / 2.0
    return 1.0 - half_tail if t >= 0 else half_tail


def student_t_quantile(q: float, df: int) -> float:
    """Inverse CDF by bisection; exact at q=0.5."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {q}")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -student_t_quantile(1.0 - q, df)
    lo, hi = 0.0, 1.0
    while student_t_cdf(hi, df) < q:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("t quantile bracketing failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if student_t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    n = len(values)
    if all(v == values[0] for v in values):
        # exactly constant input should be exactly degenerate
        return values[0], 0.0
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, math.sqrt(var)


def paired_t_test(a: Mapping[str, float], b: Mapping[str, float]) -> TTestResult:
    """Two-sided paired Student t-test over per-topic values.

    Both mappings must cover the same topics and at least two of them.
    Degenerate zero-variance differences use the conventions: all-zero
    differences give (t=0, p=1); a nonzero constant difference gives p=0.
    """
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))[:5]
        only_b = sorted(set(b) - set(a))[:5]
        raise ValueError(
            f"topic sets differ (only in first: {only_a}, only in second: {only_b})"
        )
    n = len(a)
    if n < 2:
        raise ValueError(f"need at least 2 paired values, got {n}")
    diffs = [a[t] - b[t] for t in sorted(a)]
    mean, sd = _mean_sd(diffs)
    df = n - 1
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(t=0.0, df=df, p=1.0, n=n)
        return TTestResult(t=math.copysign(math.inf, mean), df=df, p=0.0, n=n)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t=t, df=df, p=student_t_sf2(t, df), n=n)


def bonferroni_adjust(p: float, m: int) -> float:
    """Adjust a p-value for m simultaneous comparisons: min(1, p * m)."""
    if m < 1:
        raise ValueError(f"comparison count must be >= 1, got {m}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    return min(1.0, p * m)


def mean_ci95(samples: Sequence[float]) -> tuple[float, float]:
    """Sample mean and half-width of the 95% t confidence interval."""
    n = len(samples)
    if n < 2:
        raise ValueError(f"need at least 2 samples for a confidence interval, got {n}")
    mean, sd = _mean_sd(samples)
    if sd == 0.0:
        return mean, 0.0
    half = student_t_quantile(0.975, n - 1) * sd / math.sqrt(n)
    return mean, half
