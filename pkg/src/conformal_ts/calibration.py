"""Nonconformity scores, empirical quantile rules, and calibration weights.

Two quantile conventions coexist on purpose and are not unified:

* :func:`split_quantile` uses the finite-sample-corrected order statistic
  at index ceil((1 - alpha) * (n + 1)), returning ``+inf`` when the index
  exceeds the sample size, and
* :func:`weighted_quantile` is the mass-based rule: the smallest observed
  score capturing at least ``1 - alpha`` of the normalized weight.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


@dataclass(frozen=True)
class ScoreSet:
    """Nonconformity scores in temporal order with their origin times."""

    scores: np.ndarray
    origin_times: np.ndarray

    def __post_init__(self) -> None:
        if len(self.scores) != len(self.origin_times):
            raise ValueError("scores and origin_times must have equal length")
        if len(self.scores) and np.min(self.scores) < 0:
            raise ValueError("nonconformity scores must be nonnegative")

    def __len__(self) -> int:
        return len(self.scores)


def abs_residual(y, yhat):
    """Absolute-residual score |y - yhat| (scalar or elementwise)."""
    return np.abs(np.asarray(y) - np.asarray(yhat))


def _as_scores(scores) -> np.ndarray:
    if isinstance(scores, ScoreSet):
        return np.asarray(scores.scores, dtype=float)
    return np.asarray(scores, dtype=float)


def level_index(alpha: float, n: int) -> int:
    """Order-statistic index ceil((1 - alpha) * (n + 1)), computed exactly.

    Exact rational arithmetic avoids float-rounding flips at integer
    boundaries.  The result may fall outside [1, n] for out-of-range alpha;
    callers interpret index > n as an unbounded set and index < 1 as empty.
    """
    frac = (1 - Fraction(alpha)) * (n + 1)
    return int(math.ceil(frac))


def split_quantile(scores, alpha: float) -> float:
    """Corrected empirical quantile of the calibration scores.

    Returns the k-th smallest score with k = ceil((1 - alpha) * (n + 1)),
    or ``+inf`` when k exceeds n (too few scores for the requested level).
    """
    s = _as_scores(scores)
    n = len(s)
    if n == 0:
        raise ValueError("split_quantile of an empty score set")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    k = level_index(alpha, n)
    if k > n:
        return math.inf
    return float(np.partition(s, k - 1)[k - 1])


def weighted_quantile_ordered(sorted_scores: np.ndarray, ordered_weights: np.ndarray, alpha: float) -> float:
    """Mass-based quantile for scores already in ascending order.

    Shared kernel for :func:`weighted_quantile` and the interval
    constructors that keep their score sets sorted across many calls.
    """
    total = ordered_weights.sum()
    if total <= 0:
        raise ValueError("weights must not all be zero")
    cum = np.cumsum(ordered_weights) / total
    j = int(np.searchsorted(cum, 1 - alpha, side="left"))
    j = min(j, len(sorted_scores) - 1)
    return float(sorted_scores[j])


def weighted_quantile(scores, weights, alpha: float) -> float:
    """Smallest observed score whose cumulative normalized weight is >= 1 - alpha.

    Weights are normalized internally, so any common positive rescaling
    leaves the result unchanged.
    """
    s = _as_scores(scores)
    w = np.asarray(weights, dtype=float)
    if len(s) == 0:
        raise ValueError("weighted_quantile of an empty score set")
    if len(w) != len(s):
        raise ValueError("weights must match scores in length")
    if np.min(w) < 0:
        raise ValueError("weights must be nonnegative")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    order = np.argsort(s, kind="stable")
    return weighted_quantile_ordered(s[order], w[order], alpha)


@dataclass(frozen=True)
class WeightScheme:
    """Fixed calibration-weight scheme: exponential decay, linear ramp, or window."""

    kind: str
    rho: float | None = None
    k: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("exponential", "linear", "window"):
            raise ValueError(f"unknown weight scheme {self.kind!r}")
        if self.kind == "exponential" and not (self.rho is not None and 0 < self.rho < 1):
            raise ValueError("exponential scheme requires rho in (0, 1)")
        if self.kind == "window" and not (self.k is not None and self.k >= 1):
            raise ValueError("window scheme requires k >= 1")

    @property
    def label(self) -> str:
        if self.kind == "exponential":
            return f"exp{self.rho:g}"
        if self.kind == "window":
            return f"window{self.k}"
        return "linear"


def exponential(rho: float = 0.99) -> WeightScheme:
    return WeightScheme("exponential", rho=rho)


def linear() -> WeightScheme:
    return WeightScheme("linear")


def window(k: int = 50) -> WeightScheme:
    return WeightScheme("window", k=k)


def make_weights(scheme: WeightScheme, cal_times, test_time: float) -> np.ndarray:
    """Unnormalized weights for each calibration time against a test time.

    exponential: rho ** (test_time - t_i); linear: temporal rank of t_i
    (1 = oldest); window(k): 1 on the k largest t_i, 0 elsewhere (k is
    clamped to the calibration size when larger).
    """
    t = np.asarray(cal_times, dtype=float)
    if len(t) and test_time <= t.max():
        raise ValueError("test_time must be later than every calibration time")
    if scheme.kind == "exponential":
        return scheme.rho ** (test_time - t)
    ranks = np.argsort(np.argsort(t, kind="stable"), kind="stable")
    if scheme.kind == "linear":
        return (ranks + 1).astype(float)
    k = min(scheme.k, len(t))
    return (ranks >= len(t) - k).astype(float)
