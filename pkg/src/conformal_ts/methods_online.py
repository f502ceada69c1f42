"""Sequential interval constructors with evolving state.

The test block is processed one step at a time; the truth Y_t is revealed
only after the interval for step t has been emitted, and feeds back into
the method state (residual pool, effective level, or appended score set).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibration import (
    WeightScheme,
    abs_residual,
    level_index,
    weighted_quantile_ordered,
)
from .dgp import SupervisedSplit
from .forecaster import BootstrapEnsemble, LinearForecaster, oob_predict
from .methods_static import IntervalSeries, calibration_scores


class ResidualPool:
    """Fixed-capacity FIFO pool of residuals with a pending buffer.

    ``observe`` parks a freshly revealed residual; ``commit`` replaces the
    oldest pool entries with the pending ones, keeping the size constant.
    """

    def __init__(self, initial) -> None:
        self._pool = list(np.asarray(initial, dtype=float))
        if not self._pool:
            raise ValueError("residual pool must start non-empty")
        self.capacity = len(self._pool)
        self._pending: list[float] = []

    def __len__(self) -> int:
        return len(self._pool)

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self._pool)

    @property
    def pending(self) -> list[float]:
        return list(self._pending)

    def observe(self, residual: float) -> None:
        self._pending.append(float(residual))

    def commit(self) -> None:
        k = len(self._pending)
        if k == 0:
            return
        self._pool = self._pool[k:] + self._pending
        self._pool = self._pool[-self.capacity :]
        self._pending = []

    def quantile(self, alpha: float) -> float:
        """Plain (1 - alpha) empirical quantile: the ceil((1-alpha)*n)-th order statistic."""
        n = len(self._pool)
        k = max(1, min(n, math.ceil((1 - alpha) * n)))
        return float(np.partition(self._pool, k - 1)[k - 1])


def _train_oob_residuals(ensemble: BootstrapEnsemble, split: SupervisedSplit) -> np.ndarray:
    res = np.empty(split.n_train)
    for i in range(split.n_train):
        res[i] = abs(split.y_train[i] - oob_predict(ensemble, i, split.X_train[i]))
    return res


def enbpi(
    ensemble: BootstrapEnsemble,
    split: SupervisedSplit,
    alpha: float,
    refresh_period: int,
    pool_source: str = "train",
) -> IntervalSeries:
    """Ensemble batch prediction intervals with a sliding residual pool.

    The pool starts from out-of-bag residuals: on the training block
    (``pool_source="train"``, every contributing model excluded the point)
    or on the calibration block (``pool_source="cal"``, where no model saw
    the points so the aggregate is the all-model mean).  Each test step is
    centered at the all-model mean prediction with radius the plain
    (1 - alpha) pool quantile; after every ``refresh_period`` steps the
    newly observed residuals replace the oldest pool entries.
    """
    if refresh_period < 1:
        raise ValueError("refresh period must be >= 1")
    if pool_source == "train":
        initial = _train_oob_residuals(ensemble, split)
    elif pool_source == "cal":
        initial = abs_residual(split.y_cal, ensemble.mean_predict(split.X_cal))
    else:
        raise ValueError(f"unknown pool source {pool_source!r}")
    pool = ResidualPool(initial)
    center = ensemble.mean_predict(split.X_test)
    radius = np.empty(len(center))
    for j in range(len(center)):
        radius[j] = pool.quantile(alpha)
        pool.observe(abs(split.y_test[j] - center[j]))
        if (j + 1) % refresh_period == 0:
            pool.commit()
    return IntervalSeries(
        center=center,
        radius=radius,
        method="enbpi",
        params={"alpha": alpha, "refresh_period": refresh_period, "pool_source": pool_source},
    )


def aci_update(alpha_t: float, e_t: int, alpha: float, gamma: float) -> float:
    """One step of the adaptive level recursion (no clamping)."""
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if e_t not in (0, 1):
        raise ValueError("error indicator must be 0 or 1")
    return alpha_t + gamma * (alpha - e_t)


@dataclass(frozen=True)
class AciState:
    """Trajectory of the adaptive level: alpha_t used at each step, the
    error indicators, and the final (post-update) level."""

    alphas: np.ndarray
    errors: np.ndarray
    alpha_final: float

    def __len__(self) -> int:
        return len(self.alphas)


def aci(
    model: LinearForecaster,
    split: SupervisedSplit,
    alpha: float,
    gamma: float,
) -> tuple[IntervalSeries, AciState]:
    """Adaptive conformal inference over fixed calibration scores.

    At each step the corrected quantile is taken at the current effective
    level alpha_t.  The level itself is never clamped; when its quantile
    index leaves [1, n_cal] the interval degenerates to unbounded
    (index > n_cal, counts as covered) or empty (index < 1, counts as an
    error), and the recursion proceeds.
    """
    cal = calibration_scores(model, split)
    sorted_scores = np.sort(cal.scores)
    n = len(sorted_scores)
    center = model.predict_batch(split.X_test)
    n_test = len(center)
    radius = np.empty(n_test)
    alphas = np.empty(n_test)
    errors = np.empty(n_test, dtype=int)
    alpha_t = alpha
    for j in range(n_test):
        alphas[j] = alpha_t
        k = level_index(alpha_t, n)
        if k > n:
            q = math.inf
        elif k < 1:
            q = -math.inf
        else:
            q = float(sorted_scores[k - 1])
        radius[j] = q
        e = 0 if abs(split.y_test[j] - center[j]) <= q else 1
        errors[j] = e
        alpha_t = aci_update(alpha_t, e, alpha, gamma)
    intervals = IntervalSeries(center=center, radius=radius, method="aci", params={"alpha": alpha, "gamma": gamma})
    return intervals, AciState(alphas=alphas, errors=errors, alpha_final=alpha_t)


def wcp_online(
    model: LinearForecaster,
    split: SupervisedSplit,
    alpha: float,
    scheme: WeightScheme,
) -> IntervalSeries:
    """Weighted conformal prediction applied sequentially.

    Each revealed test score joins the score set with its time stamp, so
    recency weights shift onto post-change observations and the weighted
    quantile adapts.  With a window scheme the window slides over the
    combined set.

    The growing score set is kept in ascending score order (new scores are
    inserted after any ties, matching a stable sort), with the chronological
    arrival rank carried alongside, so each step costs one vectorized weight
    evaluation plus one cumulative sweep.
    """
    cal = calibration_scores(model, split)
    n0, n1 = len(cal), split.n_test
    center = model.predict_batch(split.X_test)
    radius = np.empty(n1)
    # buffers in score order; arrival ranks are 0-based chronological indices
    scores = np.empty(n0 + n1)
    arrival = np.empty(n0 + n1)
    weights = np.empty(n0 + n1)
    order0 = np.argsort(cal.scores, kind="stable")
    scores[:n0] = cal.scores[order0]
    arrival[:n0] = order0  # calibration points arrive in temporal order
    if scheme.kind == "exponential":
        # decay weights advance multiplicatively with the test clock; a new
        # score enters at weight 1 (age zero) and ages with everything else
        weights[:n0] = scheme.rho ** (float(split.test_times[0]) - np.asarray(cal.origin_times, float)[order0])
    prev_t = float(split.test_times[0])
    for j in range(n1):
        k = n0 + j
        t = float(split.test_times[j])
        if scheme.kind == "exponential":
            if t != prev_t:
                weights[:k] *= scheme.rho ** (t - prev_t)
                prev_t = t
            w = weights[:k]
        elif scheme.kind == "linear":
            w = arrival[:k] + 1.0
        else:
            w = (arrival[:k] >= k - min(scheme.k, k)).astype(float)
        radius[j] = weighted_quantile_ordered(scores[:k], w, alpha)
        new_score = abs(split.y_test[j] - center[j])
        idx = int(np.searchsorted(scores[:k], new_score, side="right"))
        for buf, value in ((scores, new_score), (arrival, float(k)), (weights, 1.0)):
            buf[idx + 1 : k + 1] = buf[idx:k].copy()
            buf[idx] = value
    return IntervalSeries(
        center=center,
        radius=radius,
        method="wcp-online",
        params={"alpha": alpha, "scheme": scheme.label},
    )
