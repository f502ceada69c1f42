"""Fixed least-squares autoregression and the bootstrap ensemble with
out-of-bag prediction.

Models are fit once and never mutated afterwards; fitted objects are safe
to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# relative tolerance for rank decisions in the least-squares solve
RANK_RCOND = 1e-10


@dataclass(frozen=True)
class LinearForecaster:
    """Immutable linear model: prediction = <coef, x> (+ intercept if enabled)."""

    coef: np.ndarray
    intercept: float
    intercept_enabled: bool

    def predict(self, x) -> float:
        """Predict a single covariate vector."""
        x = np.asarray(x, dtype=float)
        if x.shape != self.coef.shape:
            raise ValueError(f"covariate of shape {x.shape} does not match fit dimension {self.coef.shape}")
        return float(x @ self.coef + self.intercept)

    def predict_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != len(self.coef):
            raise ValueError(f"covariates of shape {X.shape} do not match fit dimension {len(self.coef)}")
        return X @ self.coef + self.intercept


def fit_least_squares(X, y, intercept: bool = True) -> LinearForecaster:
    """Least-squares fit; rank-deficient designs get the minimum-norm solution."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    if X.shape[0] == 0:
        raise ValueError("cannot fit on an empty sample")
    if X.shape[0] != len(y):
        raise ValueError("covariates and responses must have equal length")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite values in the training sample")
    A = np.column_stack([np.ones(len(X)), X]) if intercept else X
    beta, *_ = np.linalg.lstsq(A, y, rcond=RANK_RCOND)
    if intercept:
        return LinearForecaster(coef=beta[1:], intercept=float(beta[0]), intercept_enabled=True)
    return LinearForecaster(coef=beta, intercept=0.0, intercept_enabled=False)


def predict(model: LinearForecaster, x) -> float:
    return model.predict(x)


@dataclass(frozen=True)
class BootstrapEnsemble:
    """M least-squares models fit on seeded bootstrap resamples.

    ``multisets[m]`` is the index multiset (size n_train, drawn with
    replacement) that model m was fit on; ``in_bag[i, m]`` flags whether
    training position i appears in it.
    """

    models: tuple[LinearForecaster, ...]
    multisets: tuple[np.ndarray, ...]
    in_bag: np.ndarray

    @property
    def n_models(self) -> int:
        return len(self.models)

    @property
    def n_train(self) -> int:
        return self.in_bag.shape[0]

    def mean_predict(self, X) -> np.ndarray:
        """All-model mean prediction for a batch of covariates."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return np.mean([m.predict_batch(X) for m in self.models], axis=0)


def fit_ensemble(X, y, n_models: int, intercept: bool = True, seed: int = 0) -> BootstrapEnsemble:
    """Fit ``n_models`` bootstrap models with per-member derived seeds."""
    if n_models < 1:
        raise ValueError("ensemble size must be >= 1")
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float)
    n = len(y)
    children = np.random.SeedSequence(seed).spawn(n_models)
    models = []
    multisets = []
    in_bag = np.zeros((n, n_models), dtype=bool)
    for m, child in enumerate(children):
        rng = np.random.default_rng(child)
        idx = rng.integers(0, n, size=n)
        multisets.append(idx)
        in_bag[np.unique(idx), m] = True
        models.append(fit_least_squares(X[idx], y[idx], intercept=intercept))
    return BootstrapEnsemble(models=tuple(models), multisets=tuple(multisets), in_bag=in_bag)


def oob_predict(ensemble: BootstrapEnsemble, i: int, x, aggregator: str = "mean") -> float:
    """Aggregate predictions of the models whose resample excludes position i.

    Falls back to the all-model aggregate when every model saw i.
    """
    if aggregator != "mean":
        raise ValueError(f"unsupported aggregator {aggregator!r}")
    if not 0 <= i < ensemble.n_train:
        raise ValueError(f"training position {i} out of range [0, {ensemble.n_train})")
    preds = [m.predict(x) for m, inb in zip(ensemble.models, ensemble.in_bag[i]) if not inb]
    if not preds:
        preds = [m.predict(x) for m in ensemble.models]
    return float(np.mean(preds))
