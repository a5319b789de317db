"""Daily VaR and ES estimated from intraday returns."""

from ._core import (
    DataError,
    NumericalError,
    RiskPair,
    TailModel,
    __version__,
    as_tests,
    cf_cdf,
    cf_risk_pair,
    dh_risk_pair,
    ema_drift,
    fit_iid_t,
    fit_ma1_t,
    generate,
    joint_loss,
    mc_risk_pair,
    pinball_loss,
    run_estimate,
    scaling_bias,
    structure_function,
    subordinate,
)

__all__ = [
    "DataError",
    "NumericalError",
    "RiskPair",
    "TailModel",
    "__version__",
    "as_tests",
    "cf_cdf",
    "cf_risk_pair",
    "dh_risk_pair",
    "ema_drift",
    "fit_iid_t",
    "fit_ma1_t",
    "generate",
    "joint_loss",
    "mc_risk_pair",
    "pinball_loss",
    "run_estimate",
    "scaling_bias",
    "structure_function",
    "subordinate",
]
