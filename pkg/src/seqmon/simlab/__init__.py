"""Simulation lab: chi-square scenarios, synthetic strides, special functions and Monte Carlo runs."""

from .experiment import (
    SCENARIO_DF,
    AlphaYieldPoint,
    DetectorConfig,
    McSummary,
    Scenario,
    TrialOutcome,
    alpha_yield_curve,
    best_alpha,
    generate_stream,
    monte_carlo,
    report_payload,
    run_trial,
    scenario_preset,
    summarize,
)
from .gait import GaitModel, gait_mean, synthetic_strides
from .rng import PRNG_NAME, chisquare_variates, gamma_variates, make_rng
from .special import chisq_cdf, chisq_pdf, chisq_quantile, chisq_sf

__all__ = [
    "SCENARIO_DF",
    "AlphaYieldPoint",
    "DetectorConfig",
    "McSummary",
    "Scenario",
    "TrialOutcome",
    "alpha_yield_curve",
    "best_alpha",
    "generate_stream",
    "monte_carlo",
    "report_payload",
    "run_trial",
    "scenario_preset",
    "summarize",
    "GaitModel",
    "gait_mean",
    "synthetic_strides",
    "PRNG_NAME",
    "chisquare_variates",
    "gamma_variates",
    "make_rng",
    "chisq_cdf",
    "chisq_pdf",
    "chisq_quantile",
    "chisq_sf",
]
