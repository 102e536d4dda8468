"""Two-sample significance tests over per-fold metric values."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import TooFewSamplesError


@dataclass(frozen=True)
class TestResult:
    t: float
    df: float
    p_value: float
    significant: bool
    alpha: float
    zero_variance: bool = False


def t_sf(t: float, df: float) -> float:
    """Survival function P(T > t) of Student's t via the regularized incomplete beta."""
    if df <= 0:
        raise ValueError("df must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * float(special.betainc(df / 2.0, 0.5, x))
    return tail if t > 0 else 1.0 - tail


def two_sided_p(t: float, df: float) -> float:
    return min(1.0, 2.0 * t_sf(abs(t), df))


def _prepare(values, name):
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or len(arr) < 2:
        raise TooFewSamplesError(f"{name} needs at least 2 values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def welch_t_test(a, b, alpha: float = 0.05) -> TestResult:
    """Two-sample t-test without the equal-variance assumption.

    Degrees of freedom follow Welch-Satterthwaite; the two-sided p-value
    comes from the t survival function. Two constant samples are handled by
    rule: equal means give t=0, p=1; unequal means give p=0, flagged.
    """
    a = _prepare(a, "a")
    b = _prepare(b, "b")
    na, nb = len(a), len(b)
    va = float(np.var(a, ddof=1))
    vb = float(np.var(b, ddof=1))
    diff = float(np.mean(a) - np.mean(b))
    if va == 0.0 and vb == 0.0:
        if diff == 0.0:
            return TestResult(0.0, float(na + nb - 2), 1.0, False, alpha, zero_variance=True)
        t = math.inf if diff > 0 else -math.inf
        return TestResult(t, float(min(na, nb) - 1), 0.0, 0.0 < alpha, alpha, zero_variance=True)
    qa, qb = va / na, vb / nb
    se = math.sqrt(qa + qb)
    t = diff / se
    df_num = (qa + qb) ** 2
    df_den = (qa * qa) / (na - 1) + (qb * qb) / (nb - 1)
    df = df_num / df_den
    p = two_sided_p(t, df)
    return TestResult(t, df, p, p < alpha, alpha)


def paired_t_test(a, b, alpha: float = 0.05) -> TestResult:
    """Paired t-test on per-fold differences (optional alternative to Welch)."""
    a = _prepare(a, "a")
    b = _prepare(b, "b")
    if len(a) != len(b):
        raise ValueError("paired test needs equal-length samples")
    d = a - b
    n = len(d)
    vd = float(np.var(d, ddof=1))
    mean_d = float(np.mean(d))
    if vd == 0.0:
        if mean_d == 0.0:
            return TestResult(0.0, float(n - 1), 1.0, False, alpha, zero_variance=True)
        t = math.inf if mean_d > 0 else -math.inf
        return TestResult(t, float(n - 1), 0.0, 0.0 < alpha, alpha, zero_variance=True)
    t = mean_d / math.sqrt(vd / n)
    df = float(n - 1)
    p = two_sided_p(t, df)
    return TestResult(t, df, p, p < alpha, alpha)
