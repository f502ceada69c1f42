"""Simulated data-generating processes and lagged supervised splits.

Four univariate processes are supported:

* ``ar1``       -- Y_t = phi * Y_{t-1} + sigma * eps_t
* ``arma11``    -- Y_t = phi * Y_{t-1} + sigma * (eps_t + theta * eps_{t-1})
* ``meanshift`` -- Y_t = mu_t + sigma * eps_t with an abrupt, permanent
  level change: mu_t = mu0 for t < t_star and mu0 + shift for t >= t_star
  (t is the 1-based position in the returned series)
* ``arch``      -- Y_t = eps_t * sqrt(omega + a1 * Y_{t-1}^2)

with eps_t i.i.d. standard normal.  Generation is fully determined by
(spec, n, seed); each call builds a fresh generator so concurrent use is
reproducible regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("ar1", "arma11", "meanshift", "arch")

DEFAULT_BURN_IN = 200


@dataclass(frozen=True)
class ProcessSpec:
    """Parametric description of a simulated process.

    Parameters
    ----------
    kind : str
        One of ``ar1``, ``arma11``, ``meanshift``, ``arch``.
    params : dict
        Coefficient map; missing entries take the defaults of the
        convenience constructors below.
    burn_in : int
        Number of leading samples discarded before the series is returned.
        Must be 0 for ``meanshift`` (the break position is absolute).
    """

    kind: str
    params: dict = field(default_factory=dict)
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}; expected one of {KINDS}")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")
        p = self.params
        sigma = p.get("sigma", 1.0)
        if sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if self.kind in ("ar1", "arma11"):
            phi = p.get("phi", 0.8 if self.kind == "ar1" else 0.5)
            if abs(phi) >= 1:
                raise ValueError(f"non-stationary AR coefficient phi={phi}; require |phi| < 1")
        if self.kind == "arch":
            if p.get("omega", 0.4) <= 0:
                raise ValueError("arch requires omega > 0")
            if p.get("a1", 0.5) < 0:
                raise ValueError("arch requires a1 >= 0")
        if self.kind == "meanshift":
            if self.burn_in != 0:
                raise ValueError("meanshift uses burn_in = 0; the break time is absolute")
            if p.get("t_star", 601) < 1:
                raise ValueError("t_star must be a positive time index")

    @property
    def label(self) -> str:
        return self.kind

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "burn_in": self.burn_in}

    @classmethod
    def from_dict(cls, d: dict) -> "ProcessSpec":
        return cls(kind=d["kind"], params=dict(d.get("params", {})), burn_in=d.get("burn_in", _default_burn_in(d["kind"])))


def _default_burn_in(kind: str) -> int:
    return 0 if kind == "meanshift" else DEFAULT_BURN_IN


def ar1(phi: float = 0.8, sigma: float = 1.0, y0: float = 0.0, burn_in: int = DEFAULT_BURN_IN) -> ProcessSpec:
    return ProcessSpec("ar1", {"phi": phi, "sigma": sigma, "y0": y0}, burn_in)


def arma11(phi: float = 0.5, theta: float = 0.4, sigma: float = 1.0, y0: float = 0.0,
           burn_in: int = DEFAULT_BURN_IN) -> ProcessSpec:
    return ProcessSpec("arma11", {"phi": phi, "theta": theta, "sigma": sigma, "y0": y0}, burn_in)


def meanshift(mu0: float = 0.0, shift: float = 1.0, t_star: int = 601, sigma: float = 1.0) -> ProcessSpec:
    return ProcessSpec("meanshift", {"mu0": mu0, "shift": shift, "t_star": t_star, "sigma": sigma}, burn_in=0)


def arch(omega: float = 0.4, a1: float = 0.5, y0: float = 0.0, burn_in: int = DEFAULT_BURN_IN) -> ProcessSpec:
    return ProcessSpec("arch", {"omega": omega, "a1": a1, "y0": y0}, burn_in)


@dataclass(frozen=True)
class TimeSeries:
    """An ordered realization together with its generating spec and seed."""

    values: np.ndarray
    spec: ProcessSpec
    seed: int

    def __len__(self) -> int:
        return len(self.values)


def recurse(spec: ProcessSpec, innovations: np.ndarray) -> np.ndarray:
    """Run the process recursion on explicit innovations.

    For the recursive kinds (``ar1``, ``arma11``, ``arch``) the returned
    array starts at the initial state ``y0`` (params, default 0) and applies
    one recursion step per innovation, so its length is
    ``len(innovations) + 1``.  For ``meanshift`` every value is
    ``mu_t + sigma * eps_t`` and the length equals ``len(innovations)``.
    Exposed separately so tests can pin innovations by hand.
    """
    eps = np.asarray(innovations, dtype=float)
    p = spec.params
    sigma = p.get("sigma", 1.0)
    if spec.kind == "meanshift":
        t = np.arange(1, len(eps) + 1)
        mu = np.where(t >= p.get("t_star", 601), p.get("mu0", 0.0) + p.get("shift", 1.0), p.get("mu0", 0.0))
        return mu + sigma * eps
    y = np.empty(len(eps) + 1)
    y[0] = p.get("y0", 0.0)
    if spec.kind == "ar1":
        phi = p.get("phi", 0.8)
        for t in range(1, len(y)):
            y[t] = phi * y[t - 1] + sigma * eps[t - 1]
    elif spec.kind == "arma11":
        phi, theta = p.get("phi", 0.5), p.get("theta", 0.4)
        prev = 0.0
        for t in range(1, len(y)):
            y[t] = phi * y[t - 1] + sigma * (eps[t - 1] + theta * prev)
            prev = eps[t - 1]
    else:  # arch
        omega, a1 = p.get("omega", 0.4), p.get("a1", 0.5)
        for t in range(1, len(y)):
            y[t] = eps[t - 1] * np.sqrt(omega + a1 * y[t - 1] ** 2)
    return y


def generate(spec: ProcessSpec, n: int, seed: int) -> TimeSeries:
    """Generate ``n`` observations of ``spec`` after discarding its burn-in.

    Calling twice with identical arguments yields bit-identical series.
    """
    if n < 1:
        raise ValueError(f"requested an empty series (n={n}); need n >= 1")
    if spec.kind == "meanshift" and spec.params.get("t_star", 601) > n:
        raise ValueError(f"t_star={spec.params.get('t_star')} lies beyond the series length {n}")
    rng = np.random.default_rng(seed)
    if spec.kind == "meanshift":
        values = recurse(spec, rng.standard_normal(n))
    else:
        total = spec.burn_in + n
        values = recurse(spec, rng.standard_normal(total - 1))[spec.burn_in:]
    return TimeSeries(values=values, spec=spec, seed=seed)


@dataclass(frozen=True)
class SupervisedSplit:
    """Lagged covariate/response pairs cut into contiguous train/cal/test blocks.

    Pair ``i`` has covariate ``X[i] = (Y_{t-1}, ..., Y_{t-p})`` (most recent
    lag first) and response ``Y_t`` with ``t = times[i]`` the 1-based
    position of the response in the source series.
    """

    X: np.ndarray
    y: np.ndarray
    times: np.ndarray
    p: int
    n_train: int
    n_cal: int
    n_test: int

    @property
    def X_train(self) -> np.ndarray:
        return self.X[: self.n_train]

    @property
    def y_train(self) -> np.ndarray:
        return self.y[: self.n_train]

    @property
    def X_cal(self) -> np.ndarray:
        return self.X[self.n_train : self.n_train + self.n_cal]

    @property
    def y_cal(self) -> np.ndarray:
        return self.y[self.n_train : self.n_train + self.n_cal]

    @property
    def cal_times(self) -> np.ndarray:
        return self.times[self.n_train : self.n_train + self.n_cal]

    @property
    def X_test(self) -> np.ndarray:
        return self.X[self.n_train + self.n_cal :]

    @property
    def y_test(self) -> np.ndarray:
        return self.y[self.n_train + self.n_cal :]

    @property
    def test_times(self) -> np.ndarray:
        return self.times[self.n_train + self.n_cal :]


def make_split(series: TimeSeries, p: int, sizes: tuple[int, int, int]) -> SupervisedSplit:
    """Turn a series into lagged pairs split as (n_train, n_cal, n_test).

    The first ``p`` observations are consumed as initial lags; the three
    blocks follow contiguously in temporal order.
    """
    if p < 1:
        raise ValueError("lag order p must be >= 1")
    n_train, n_cal, n_test = sizes
    if min(sizes) < 1:
        raise ValueError("all split sizes must be >= 1")
    total = n_train + n_cal + n_test
    need = p + total
    if need > len(series.values):
        raise ValueError(
            f"series of length {len(series.values)} is too short for p={p} and "
            f"sizes {sizes}: need {need}, short by {need - len(series.values)}"
        )
    v = series.values
    X = np.column_stack([v[p - 1 - j : p - 1 - j + total] for j in range(p)])
    y = v[p : p + total]
    times = np.arange(p + 1, p + total + 1)
    return SupervisedSplit(X=X, y=y, times=times, p=p, n_train=n_train, n_cal=n_cal, n_test=n_test)
