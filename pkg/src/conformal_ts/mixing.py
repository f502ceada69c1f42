"""Finite-sample coverage slack for beta-mixing processes.

Computes the concentration terms for the calibration and test blocks and
the train/test decoupling term, then composes them into a marginal
coverage lower bound (1 - alpha - eta with eta = delta_cal + eps_cal +
eps_train) and an empirical-coverage statement (coverage >= 1 - alpha -
eps_cal - eps_test with confidence 1 - delta_cal - delta_test).

Each epsilon is an exact infimum over an integer feasible set, found by
exhaustive enumeration; the minimizing triple is reported alongside the
value so results can be re-verified by direct evaluation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: variance bound for indicator summands, used inside sigma_tilde
INDICATOR_VARIANCE = 0.25


@dataclass(frozen=True)
class MixingModel:
    """Parametric beta-mixing decay curve beta(a) for integer lags a >= 1.

    Kinds: ``iid`` (beta identically 0), ``geometric`` (c * rho**a),
    ``polynomial`` (c * a**-kappa), and ``table`` (explicit values for lags
    1..L, extended beyond L by the last tabulated value).  Values are
    clamped into [0, 1].
    """

    kind: str
    params: dict = field(default_factory=dict)
    table: tuple = ()

    def __post_init__(self) -> None:
        if self.kind not in ("iid", "geometric", "polynomial", "table"):
            raise ValueError(f"unknown mixing model kind {self.kind!r}")
        if self.kind == "geometric":
            rho = self.params.get("rho")
            if rho is None or not 0 < rho < 1:
                raise ValueError("geometric model requires rho in (0, 1)")
            if self.params.get("c", 1.0) < 0:
                raise ValueError("geometric model requires c >= 0")
        if self.kind == "polynomial":
            if self.params.get("kappa", 1.0) <= 0:
                raise ValueError("polynomial model requires kappa > 0")
            if self.params.get("c", 1.0) < 0:
                raise ValueError("polynomial model requires c >= 0")
        if self.kind == "table":
            vals = np.asarray(self.table, dtype=float)
            if len(vals) == 0:
                raise ValueError("table model requires at least one value")
            if np.any(vals < 0) or np.any(vals > 1):
                raise ValueError("table values must lie in [0, 1]")
            if np.any(np.diff(vals) > 0):
                raise ValueError("table values must be nonincreasing")

    def beta(self, a: int) -> float:
        """Mixing coefficient at integer lag a >= 1."""
        if a < 1:
            raise ValueError("mixing coefficients are defined for lags a >= 1")
        if self.kind == "iid":
            return 0.0
        if self.kind == "geometric":
            return min(1.0, self.params.get("c", 1.0) * self.params["rho"] ** a)
        if self.kind == "polynomial":
            return min(1.0, self.params.get("c", 1.0) * float(a) ** -self.params["kappa"])
        vals = self.table
        return float(vals[min(a, len(vals)) - 1])

    @property
    def label(self) -> str:
        if self.kind == "geometric":
            return f"geometric(c={self.params.get('c', 1.0):g}, rho={self.params['rho']:g})"
        if self.kind == "polynomial":
            return f"polynomial(c={self.params.get('c', 1.0):g}, kappa={self.params['kappa']:g})"
        if self.kind == "table":
            return f"table[{len(self.table)}]"
        return "iid"


def iid() -> MixingModel:
    return MixingModel("iid")


def geometric(c: float = 1.0, rho: float = 0.8) -> MixingModel:
    return MixingModel("geometric", {"c": c, "rho": rho})


def polynomial(c: float = 1.0, kappa: float = 1.0) -> MixingModel:
    return MixingModel("polynomial", {"c": c, "kappa": kappa})


def from_table(values) -> MixingModel:
    return MixingModel("table", table=tuple(float(v) for v in values))


def sigma_tilde(model: MixingModel, a: int, v: float = INDICATOR_VARIANCE) -> float:
    """Block standard-deviation proxy sqrt(v + (2/a) * sum_{k<a} (a-k) beta(k))."""
    if a < 1:
        raise ValueError("block length a must be >= 1")
    if v < 0:
        raise ValueError("variance bound v must be nonnegative")
    acc = sum((a - k) * model.beta(k) for k in range(1, a))
    return math.sqrt(v + 2.0 / a * acc)


@dataclass(frozen=True)
class EpsilonBound:
    """Result of one slack minimization: value + realizing triple, or infeasible."""

    value: float | None
    triple: tuple[int, int, int] | None
    feasible: bool
    reason: str = ""

    def __float__(self) -> float:
        if not self.feasible:
            raise ValueError(f"infeasible bound: {self.reason}")
        return self.value


def _deviation(model: MixingModel, a: int, m: int, sqrt_denom: int, slack: float, additive: float) -> float:
    log_term = math.log(4.0 / slack)
    return sigma_tilde(model, a) * math.sqrt(4.0 / sqrt_denom * log_term) + log_term / (3.0 * m) + additive


def _block_factorizations(nprime: int):
    """All (a, m) with 2 * m * a = nprime, a and m positive integers."""
    if nprime < 2 or nprime % 2:
        return
    half = nprime // 2
    for a in range(1, half + 1):
        if half % a == 0:
            yield a, half // a


def epsilon_cal(n_cal: int, delta_cal: float, model: MixingModel) -> EpsilonBound:
    """Calibration-block concentration slack.

    Exhaustive infimum over triples (a, m, r) with 2*m*a = n_cal - r + 1 and
    delta_cal > 4*(m-1)*beta(a) + beta(r); ties broken toward the
    lexicographically smallest triple.
    """
    if n_cal < 4:
        raise ValueError("n_cal must be at least 4")
    if not 0 < delta_cal < 1:
        raise ValueError("delta_cal must lie in (0, 1)")
    best: tuple[float, tuple[int, int, int]] | None = None
    for r in range(1, n_cal):
        nprime = n_cal - r + 1
        for a, m in _block_factorizations(nprime):
            slack = delta_cal - 4.0 * (m - 1) * model.beta(a) - model.beta(r)
            if slack <= 0:
                continue
            val = _deviation(model, a, m, nprime, slack, (r - 1) / n_cal)
            cand = (val, (a, m, r))
            if best is None or cand < best:
                best = cand
    if best is None:
        return EpsilonBound(None, None, False, "no (a, m, r) satisfies delta_cal > 4(m-1)beta(a) + beta(r)")
    return EpsilonBound(best[0], best[1], True)


def epsilon_test(n_test: int, n_cal: int, delta_test: float, model: MixingModel) -> EpsilonBound:
    """Test-block concentration slack.

    Exhaustive infimum over triples (a, m, s) with s + 2*m*a = n_test, s >= 0,
    and delta_test > 4*(m-1)*beta(a) + beta(n_cal).
    """
    if n_test < 2:
        raise ValueError("n_test must be at least 2")
    if not 0 < delta_test < 1:
        raise ValueError("delta_test must lie in (0, 1)")
    beta_gap = model.beta(n_cal)
    best: tuple[float, tuple[int, int, int]] | None = None
    for s in range(0, n_test - 1):
        nprime = n_test - s
        for a, m in _block_factorizations(nprime):
            slack = delta_test - 4.0 * (m - 1) * model.beta(a) - beta_gap
            if slack <= 0:
                continue
            val = _deviation(model, a, m, n_test, slack, s / n_test)
            cand = (val, (a, m, s))
            if best is None or cand < best:
                best = cand
    if best is None:
        return EpsilonBound(None, None, False, "no (a, m, s) satisfies delta_test > 4(m-1)beta(a) + beta(n_cal)")
    return EpsilonBound(best[0], best[1], True)


def epsilon_train(test_index: int, n_train: int, model: MixingModel) -> float:
    """Train/test decoupling slack: beta evaluated at the index gap."""
    gap = test_index - n_train
    if gap <= 0:
        raise ValueError(f"test index {test_index} does not lie after the training block of size {n_train}")
    return model.beta(gap)


@dataclass(frozen=True)
class SlackReport:
    """Composed finite-sample slack terms for one split geometry."""

    n_train: int
    n_cal: int
    n_test: int
    alpha: float
    delta_cal: float
    delta_test: float
    model_label: str
    first_test_index: int
    eps_cal: EpsilonBound
    eps_test: EpsilonBound
    eps_train: float

    @property
    def feasible(self) -> bool:
        return self.eps_cal.feasible and self.eps_test.feasible

    @property
    def failing_constraint(self) -> str:
        reasons = [b.reason for b in (self.eps_cal, self.eps_test) if not b.feasible]
        return "; ".join(reasons)

    @property
    def eta_marginal(self) -> float | None:
        """Slack of the marginal bound: delta_cal + eps_cal + eps_train."""
        if not self.eps_cal.feasible:
            return None
        return self.delta_cal + self.eps_cal.value + self.eps_train

    @property
    def marginal_lower_bound(self) -> float | None:
        if self.eta_marginal is None:
            return None
        return 1.0 - self.alpha - self.eta_marginal

    @property
    def eta_empirical(self) -> float | None:
        """Slack of the empirical-coverage bound: eps_cal + eps_test."""
        if not self.feasible:
            return None
        return self.eps_cal.value + self.eps_test.value

    @property
    def empirical_lower_bound(self) -> float | None:
        if self.eta_empirical is None:
            return None
        return 1.0 - self.alpha - self.eta_empirical

    @property
    def empirical_confidence(self) -> float:
        return 1.0 - self.delta_cal - self.delta_test

    def to_dict(self) -> dict:
        return {
            "n_train": self.n_train,
            "n_cal": self.n_cal,
            "n_test": self.n_test,
            "alpha": self.alpha,
            "delta_cal": self.delta_cal,
            "delta_test": self.delta_test,
            "beta_model": self.model_label,
            "first_test_index": self.first_test_index,
            "feasible": self.feasible,
            "failing_constraint": self.failing_constraint,
            "eps_cal": self.eps_cal.value,
            "eps_cal_triple": self.eps_cal.triple,
            "eps_test": self.eps_test.value,
            "eps_test_triple": self.eps_test.triple,
            "eps_train": self.eps_train,
            "eta_marginal": self.eta_marginal,
            "marginal_lower_bound": self.marginal_lower_bound,
            "eta_empirical": self.eta_empirical,
            "empirical_lower_bound": self.empirical_lower_bound,
            "empirical_confidence": self.empirical_confidence,
        }


def slack_report(
    n_train: int,
    n_cal: int,
    n_test: int,
    alpha: float,
    delta_cal: float,
    delta_test: float,
    model: MixingModel,
    first_test_index: int | None = None,
) -> SlackReport:
    """Compose the three slack terms for a train/cal/test geometry.

    ``first_test_index`` is the 1-based position of the first test point in
    the underlying sequence; it defaults to n_train + n_cal + 1 and sets the
    decoupling gap of eps_train.
    """
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if first_test_index is None:
        first_test_index = n_train + n_cal + 1
    return SlackReport(
        n_train=n_train,
        n_cal=n_cal,
        n_test=n_test,
        alpha=alpha,
        delta_cal=delta_cal,
        delta_test=delta_test,
        model_label=model.label,
        first_test_index=first_test_index,
        eps_cal=epsilon_cal(n_cal, delta_cal, model),
        eps_test=epsilon_test(n_test, n_cal, delta_test, model),
        eps_train=epsilon_train(first_test_index, n_train, model),
    )
