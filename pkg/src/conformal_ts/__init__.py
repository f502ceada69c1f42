"""Conformal prediction intervals for time series.

Split conformal prediction and four robust variants (weighted, blocked,
ensemble-batch, adaptive-level), finite-sample coverage bounds under
beta-mixing, and a simulation benchmark harness.
"""

from .bench import ExperimentConfig, RunRecord, default_config, evaluate, run_experiment
from .calibration import (
    ScoreSet,
    WeightScheme,
    abs_residual,
    exponential,
    linear,
    make_weights,
    split_quantile,
    weighted_quantile,
    window,
)
from .dgp import ProcessSpec, SupervisedSplit, TimeSeries, ar1, arch, arma11, generate, make_split, meanshift
from .forecaster import BootstrapEnsemble, LinearForecaster, fit_ensemble, fit_least_squares, oob_predict
from .methods_online import AciState, ResidualPool, aci, aci_update, enbpi, wcp_online
from .methods_static import IntervalSeries, blocked_scp, scp, wcp
from .mixing import (
    MixingModel,
    SlackReport,
    epsilon_cal,
    epsilon_test,
    epsilon_train,
    geometric,
    iid,
    polynomial,
    sigma_tilde,
    slack_report,
)

__version__ = "0.1.0"

__all__ = [
    "AciState",
    "BootstrapEnsemble",
    "ExperimentConfig",
    "IntervalSeries",
    "LinearForecaster",
    "MixingModel",
    "ProcessSpec",
    "ResidualPool",
    "RunRecord",
    "ScoreSet",
    "SlackReport",
    "SupervisedSplit",
    "TimeSeries",
    "WeightScheme",
    "abs_residual",
    "aci",
    "aci_update",
    "ar1",
    "arch",
    "arma11",
    "blocked_scp",
    "default_config",
    "enbpi",
    "epsilon_cal",
    "epsilon_test",
    "epsilon_train",
    "evaluate",
    "exponential",
    "fit_ensemble",
    "fit_least_squares",
    "generate",
    "geometric",
    "iid",
    "linear",
    "make_split",
    "make_weights",
    "meanshift",
    "oob_predict",
    "polynomial",
    "run_experiment",
    "scp",
    "sigma_tilde",
    "slack_report",
    "split_quantile",
    "wcp",
    "wcp_online",
    "weighted_quantile",
    "window",
]
