"""Online kernel change-point detection: scan B-statistic, ARL calibration,
parametric baselines, and synthetic stream generators."""

from scanb._core import (
    ConfigError,
    DegenerateDataError,
    Detector,
    InputError,
    NumericError,
    VarianceEstimate,
    arl_approx,
    eval_kernel,
    generate,
    glr_stat,
    h_statistic,
    hotelling_t2,
    median_bandwidth,
    mmd2u,
    nu,
    threshold_for_arl,
)

__all__ = [
    "ConfigError",
    "DegenerateDataError",
    "Detector",
    "InputError",
    "NumericError",
    "VarianceEstimate",
    "arl_approx",
    "eval_kernel",
    "generate",
    "glr_stat",
    "h_statistic",
    "hotelling_t2",
    "median_bandwidth",
    "mmd2u",
    "nu",
    "threshold_for_arl",
]
