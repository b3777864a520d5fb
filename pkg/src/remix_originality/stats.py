"""Welch two-sample t-test and the Student-t special functions behind it."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, TooFewValues, ZeroStandardError

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 100_000


@dataclass(frozen=True)
class GroupSummary:
    n: int
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise TooFewValues(self.n)
        if not math.isfinite(self.variance) or self.variance < 0:
            raise DomainError(f"variance must be finite and non-negative, got {self.variance}")

    @property
    def standard_error(self) -> float:
        return math.sqrt(self.variance / self.n)


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p_two_sided: float
    ci_low: float
    ci_high: float
    mean_a: float
    mean_b: float
    confidence: float = 0.95

    @property
    def mean_difference(self) -> float:
        return self.mean_a - self.mean_b


def summarize(values: Sequence[float] | np.ndarray) -> GroupSummary:
    """Count, mean and (n-1) sample variance with a two-pass scheme."""
    data = np.asarray(values, dtype=np.float64).reshape(-1)
    if data.size < 2:
        raise TooFewValues(int(data.size))
    mean = float(np.mean(data))
    centered = data - mean
    variance = float(np.dot(centered, centered) / (data.size - 1))
    return GroupSummary(n=int(data.size), mean=mean, variance=variance)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def _beta_continued_fraction(a: float, b: float, x: float) -> float:
    """Modified Lentz evaluation of the incomplete-beta continued fraction."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    raise ConvergenceError(f"incomplete beta continued fraction (a={a}, b={b}, x={x})")


def _betainc(a: float, b: float, x: float, y: float) -> float:
    """I_x(a, b) with ``y = 1 - x`` supplied exactly by the caller."""
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_continued_fraction(a, b, x) / a
    return 1.0 - front * _beta_continued_fraction(b, a, y) / b


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by continued fraction, switching to symmetry when x > (a+1)/(a+b+2)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"a and b must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return _betainc(a, b, x, 1.0 - x)


def _t_tail(t: float, df: float) -> float:
    """P(T > |t|) for Student t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    t2 = t * t
    x = df / (df + t2)
    y = t2 / (df + t2)
    return 0.5 * _betainc(df / 2.0, 0.5, x, y)


def t_cdf(t: float, df: float) -> float:
    if not df > 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        raise DomainError("t must not be NaN")
    tail = _t_tail(t, df)
    return 1.0 - tail if t >= 0 else tail


def t_pdf(t: float, df: float) -> float:
    if not df > 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    log_pdf = (
        math.lgamma((df + 1.0) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
        - (df + 1.0) / 2.0 * math.log1p(t * t / df)
    )
    return math.exp(log_pdf)


def t_two_sided_p(t: float, df: float) -> float:
    """2·(1 - T_cdf(|t|)), evaluated on the tail directly."""
    if not df > 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    return min(1.0, 2.0 * _t_tail(t, df))


def t_quantile(p: float, df: float) -> float:
    """Inverse of ``t_cdf`` by bracketed bisection refined with Newton steps."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not df > 0:
        raise DomainError(f"degrees of freedom must be positive, got {df}")
    if p == 0.5:
        return 0.0

    upper = p > 0.5
    target = 1.0 - p if upper else p

    lo, hi = 0.0, 1.0
    while _t_tail(hi, df) > target:
        lo, hi = hi, hi * 2.0
        if hi > 1e300:
            raise ConvergenceError(f"t quantile bracket (p={p}, df={df})")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _t_tail(mid, df) > target:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)

    for _ in range(4):
        density = t_pdf(t, df)
        if density <= 0.0:
            break
        step = (_t_tail(t, df) - target) / density
        candidate = t + step
        if not lo <= candidate <= hi:
            break
        if abs(_t_tail(candidate, df) - target) >= abs(_t_tail(t, df) - target):
            break
        t = candidate
    return t if upper else -t


# ---------------------------------------------------------------------------
# Welch test
# ---------------------------------------------------------------------------


def welch_test(a: GroupSummary, b: GroupSummary, confidence: float = 0.95) -> WelchResult:
    """Unequal-variance two-sample t-test on the mean difference a - b.

    Raises:
        ZeroStandardError: both groups have zero variance.
    """
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    va = a.variance / a.n
    vb = b.variance / b.n
    se2 = va + vb
    if se2 <= 0.0:
        raise ZeroStandardError()
    se = math.sqrt(se2)
    diff = a.mean - b.mean
    t = diff / se
    df = se2 * se2 / (va * va / (a.n - 1) + vb * vb / (b.n - 1))
    p = t_two_sided_p(t, df)
    half_width = t_quantile((1.0 + confidence) / 2.0, df) * se
    return WelchResult(
        t=t,
        df=df,
        p_two_sided=p,
        ci_low=diff - half_width,
        ci_high=diff + half_width,
        mean_a=a.mean,
        mean_b=b.mean,
        confidence=confidence,
    )


def welch_test_samples(a: Sequence[float], b: Sequence[float], confidence: float = 0.95) -> WelchResult:
    return welch_test(summarize(a), summarize(b), confidence)


def mean_interval(summary: GroupSummary, confidence: float = 0.95) -> tuple[float, float]:
    """Confidence interval of one group's mean, mean ± t·sqrt(var/n)."""
    half_width = t_quantile((1.0 + confidence) / 2.0, summary.n - 1) * summary.standard_error
    return summary.mean - half_width, summary.mean + half_width
