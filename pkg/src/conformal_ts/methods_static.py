"""Interval constructors whose calibration state is fixed during the test
block: split conformal (SCP), weighted conformal (WCP), and blocked SCP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .calibration import (
    ScoreSet,
    WeightScheme,
    abs_residual,
    make_weights,
    split_quantile,
    weighted_quantile_ordered,
)
from .dgp import SupervisedSplit
from .forecaster import LinearForecaster


@dataclass(frozen=True)
class IntervalSeries:
    """Per-test-step symmetric intervals center +- radius.

    ``radius = +inf`` marks an unbounded interval and ``radius = -inf`` an
    empty one (possible only for the adaptive level method when its
    effective level leaves (0, 1); then lower > upper by convention).
    Membership is the score inequality |y - center| <= radius, so coverage
    accounting is definitionally consistent with the quantile thresholds.
    """

    center: np.ndarray
    radius: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.center) != len(self.radius):
            raise ValueError("center and radius must have equal length")

    def __len__(self) -> int:
        return len(self.center)

    @property
    def lower(self) -> np.ndarray:
        return self.center - self.radius

    @property
    def upper(self) -> np.ndarray:
        return self.center + self.radius

    @property
    def width(self) -> np.ndarray:
        # empty intervals have width 0, unbounded ones +inf
        return np.maximum(2.0 * self.radius, 0.0)

    def covers(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape != self.center.shape:
            raise ValueError("truth values must match the interval series in length")
        return np.abs(y - self.center) <= self.radius


def calibration_scores(model: LinearForecaster, split: SupervisedSplit) -> ScoreSet:
    """Absolute residuals of the fixed model on the calibration block."""
    scores = abs_residual(split.y_cal, model.predict_batch(split.X_cal))
    return ScoreSet(scores=scores, origin_times=split.cal_times)


def scp(model: LinearForecaster, split: SupervisedSplit, alpha: float) -> IntervalSeries:
    """Split conformal prediction: one corrected quantile, constant width."""
    q = split_quantile(calibration_scores(model, split), alpha)
    center = model.predict_batch(split.X_test)
    return IntervalSeries(center=center, radius=np.full(len(center), q), method="scp", params={"alpha": alpha})


def wcp(model: LinearForecaster, split: SupervisedSplit, alpha: float, scheme: WeightScheme) -> IntervalSeries:
    """Weighted conformal prediction on the fixed calibration set.

    Weights are recomputed at every test time; with a fixed calibration set
    the normalized weights of the time-decay schemes are unchanged across
    steps, so adaptation to the test stream requires the sequential variant
    (see methods_online.wcp_online).
    """
    cal = calibration_scores(model, split)
    center = model.predict_batch(split.X_test)
    radius = np.empty(len(center))
    # the score set is fixed, so its ordering is computed once; rank-based
    # weights (linear, window) do not depend on the test time at all
    order = np.argsort(cal.scores, kind="stable")
    sorted_scores = cal.scores[order]
    fixed_w = None
    if scheme.kind != "exponential":
        fixed_w = make_weights(scheme, cal.origin_times, split.test_times[0])[order]
    for j, t in enumerate(split.test_times):
        w = fixed_w if fixed_w is not None else make_weights(scheme, cal.origin_times, t)[order]
        radius[j] = weighted_quantile_ordered(sorted_scores, w, alpha)
    return IntervalSeries(center=center, radius=radius, method="wcp", params={"alpha": alpha, "scheme": scheme.label})


def blocked_threshold(cal_scores: np.ndarray, alpha: float, block_size: int) -> float:
    """Score threshold of the blocked permutation test, in closed form.

    The calibration scores in temporal order plus one test slot are tiled
    into equal blocks of ``block_size`` (the oldest remainder scores are
    dropped), and the permutation family is the m cyclic rotations of the
    block sequence.  Rotation r >= 1 lands the last score of block r on the
    test slot, so the p-value of a candidate with score s is

        p(s) = (1 + #{r : R_r >= s}) / m,

    where the identity rotation contributes the 1.  Inverting p(s) > alpha
    gives s <= the (m - c)-th smallest rotation score with c the smallest
    integer exceeding alpha * m - 1; the interval is unbounded when c <= 0.
    """
    n_cal = len(cal_scores)
    if block_size < 1:
        raise ValueError("block size must be >= 1")
    if block_size > n_cal + 1:
        raise ValueError(f"block size {block_size} exceeds the {n_cal + 1} available positions")
    drop = (n_cal + 1) % block_size
    kept = np.asarray(cal_scores, dtype=float)[drop:]
    m = (n_cal + 1 - drop) // block_size
    # exact integer threshold count: smallest integer > alpha * m - 1
    c = int(math.floor(Fraction(alpha) * m - 1)) + 1
    if c <= 0:
        return math.inf
    rotation_scores = kept[block_size - 1 : (m - 1) * block_size : block_size]
    return float(np.sort(rotation_scores)[m - c - 1])


def blocked_scp(model: LinearForecaster, split: SupervisedSplit, alpha: float, block_size: int) -> IntervalSeries:
    """Split conformal prediction calibrated over cyclic block rotations."""
    cal = calibration_scores(model, split)
    q = blocked_threshold(cal.scores, alpha, block_size)
    center = model.predict_batch(split.X_test)
    return IntervalSeries(
        center=center,
        radius=np.full(len(center), q),
        method="scp-block",
        params={"alpha": alpha, "block_size": block_size},
    )
