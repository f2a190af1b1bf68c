"""Risk difference, two-sample t-test and Monte Carlo standard errors.

The Student-t CDF is evaluated through the regularized incomplete beta
function, computed with a modified Lentz continued fraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Sequence

import numpy as np

from .errors import DomainError, EmptyArm, NonPositiveDf, TooFewValues

_CF_MAX_ITER = 300
_CF_EPS = 1e-15
_TINY = 1e-300


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b); converges fast for x < (a+1)/(a+b+2)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
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
    raise DomainError(f"incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}")


_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _stirling_remainder(z: float) -> float:
    """lgamma(z) minus its leading Stirling terms."""
    if z >= 10.0:
        r = 1.0 / z
        r2 = r * r
        return r * (1 / 12 - r2 * (1 / 360 - r2 * (1 / 1260 - r2 * (1 / 1680 - r2 * (1 / 1188 - r2 * 691 / 360360)))))
    return math.lgamma(z) - ((z - 0.5) * math.log(z) - z + _HALF_LOG_2PI)


def _log_ratio(num: float, ref: float) -> float:
    # log(num / ref), accurate when num is close to ref
    u = (num - ref) / ref
    return math.log1p(u) if abs(u) < 0.5 else math.log(num / ref)


def _log_front(a: float, b: float, x: float, y: float) -> float:
    """log of x^a y^b / B(a, b), arranged to avoid cancellation at large a, b."""
    s = a + b
    x0, y0 = a / s, b / s
    return (
        a * _log_ratio(x, x0) + b * _log_ratio(y, y0)
        + 0.5 * math.log(a * y0) - _HALF_LOG_2PI
        - (_stirling_remainder(a) + _stirling_remainder(b) - _stirling_remainder(s))
    )


def _ibeta(a: float, b: float, x: float, y: float) -> float:
    # y = 1 - x, passed separately so callers can supply it without rounding
    if x == 0.0:
        return 0.0
    if y == 0.0:
        return 1.0
    front = math.exp(_log_front(a, b, x, y))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not (a > 0 and b > 0):
        raise DomainError(f"shape parameters must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x}")
    return _ibeta(a, b, x, 1.0 - x)


def _t_tail(t: float, df: float) -> float:
    # I_{df/(df+t^2)}(df/2, 1/2), i.e. P(|T| >= |t|)
    t2 = t * t
    return _ibeta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2))


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for Student's t with ``df`` degrees of freedom."""
    if not df > 0:
        raise NonPositiveDf(f"degrees of freedom must be positive, got {df}")
    if math.isnan(t):
        return math.nan
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * _t_tail(t, df)
    return 1.0 - tail if t >= 0 else tail


def student_t_sf2(t: float, df: float) -> float:
    """Two-sided p-value P(|T| >= |t|), computed without cancellation."""
    if not df > 0:
        raise NonPositiveDf(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 0.0
    return _t_tail(t, df)


_STD_NORMAL = NormalDist()


def normal_cdf(z: float) -> float:
    return _STD_NORMAL.cdf(z)


def normal_quantile(p: float) -> float:
    return _STD_NORMAL.inv_cdf(p)


@dataclass(frozen=True)
class TTestResult:
    estimate: float
    se: float
    t_stat: float
    df: float
    p_value: float
    alpha: float

    @property
    def rejected(self) -> bool:
        return self.p_value < self.alpha


def _as_arm(values, name: str, minimum: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size < minimum:
        raise EmptyArm(f"{name} needs at least {minimum} observation(s), got {arr.size}")
    return arr


def _mean(arr: np.ndarray) -> float:
    return math.fsum(arr.tolist()) / arr.size


def risk_difference(y_treat: Sequence[int], y_control: Sequence[int]) -> float:
    t = _as_arm(y_treat, "treatment arm", 1)
    c = _as_arm(y_control, "control arm", 1)
    return _mean(t) - _mean(c)


def pooled_t_test(y_treat, y_control, alpha: float = 0.05, pooled: bool = True) -> TTestResult:
    """Two-sample t-test of the difference in means (treat minus control).

    ``pooled=False`` gives Welch's test with Satterthwaite degrees of
    freedom. A zero standard error yields t=0, p=1 when the estimate is 0
    and p=0 otherwise.
    """
    t_arr = _as_arm(y_treat, "treatment arm", 2)
    c_arr = _as_arm(y_control, "control arm", 2)
    n1, n0 = t_arr.size, c_arr.size
    m1, m0 = _mean(t_arr), _mean(c_arr)
    ss1 = math.fsum(((t_arr - m1) ** 2).tolist())
    ss0 = math.fsum(((c_arr - m0) ** 2).tolist())
    estimate = m1 - m0

    if pooled:
        df = float(n1 + n0 - 2)
        s2 = (ss1 + ss0) / df
        se = math.sqrt(s2 * (1.0 / n1 + 1.0 / n0))
    else:
        v1, v0 = ss1 / (n1 - 1) / n1, ss0 / (n0 - 1) / n0
        se = math.sqrt(v1 + v0)
        denom = v1 * v1 / (n1 - 1) + v0 * v0 / (n0 - 1)
        df = (v1 + v0) ** 2 / denom if denom > 0 else float(n1 + n0 - 2)

    if se == 0.0:
        if estimate == 0.0:
            return TTestResult(estimate, 0.0, 0.0, df, 1.0, alpha)
        return TTestResult(estimate, 0.0, math.copysign(math.inf, estimate), df, 0.0, alpha)
    t_stat = estimate / se
    p = min(1.0, max(0.0, student_t_sf2(t_stat, df)))
    return TTestResult(estimate, se, t_stat, df, p, alpha)


def sample_sd(values: Sequence[float]) -> float:
    vals = [float(v) for v in values]
    if len(vals) < 2:
        raise TooFewValues(f"need at least 2 values, got {len(vals)}")
    mean = math.fsum(vals) / len(vals)
    return math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1))


def mcse_mean(values: Sequence[float]) -> float:
    """Monte Carlo standard error of a mean over replications."""
    vals = list(values)
    return sample_sd(vals) / math.sqrt(len(vals))


def mcse_proportion(p_hat: float, n_reps: int) -> float:
    if n_reps < 1:
        raise TooFewValues(f"n_reps must be at least 1, got {n_reps}")
    if not 0.0 <= p_hat <= 1.0:
        raise DomainError(f"proportion must lie in [0, 1], got {p_hat}")
    return math.sqrt(p_hat * (1.0 - p_hat) / n_reps)
