"""Penalised model selection for nonparametric logistic regression."""

from ._core import (
    DataError,
    UsageError,
    best_irregular_partition,
    contrast,
    dimension_jump,
    evaluate_penalty,
    fit_mle_indicators,
    fit_regressogram,
    generate,
    hellinger_sq,
    kl_divergence,
    run_benchmark,
    select,
    sigma_diagnostic,
    truth_eval,
)

__all__ = [
    "DataError",
    "UsageError",
    "best_irregular_partition",
    "contrast",
    "dimension_jump",
    "evaluate_penalty",
    "fit_mle_indicators",
    "fit_regressogram",
    "generate",
    "hellinger_sq",
    "kl_divergence",
    "run_benchmark",
    "select",
    "sigma_diagnostic",
    "truth_eval",
]
