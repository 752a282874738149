"""Scoring statements against posteriors, correlation and parameter fitting."""

from .experiment import Experiment, StatementSpec
from .fitting import (
    BETA_GRID,
    DegenerateDataError,
    Rating,
    RatingsDataset,
    fit_beta,
    fit_thresholds,
    mean_absolute_error,
    pearson_r,
)
from .semantics import (
    PRIOR_MODES,
    CompiledStatement,
    StatementScore,
    eval_epistemic,
    likelihood_ratio_score,
    normalized_likelihood,
    prob_of,
    score_statement,
    statement_posterior,
    statement_prior,
)

__all__ = [
    "BETA_GRID", "CompiledStatement", "DegenerateDataError", "Experiment", "PRIOR_MODES", "Rating",
    "RatingsDataset", "StatementScore", "StatementSpec", "eval_epistemic", "fit_beta", "fit_thresholds",
    "likelihood_ratio_score", "mean_absolute_error", "normalized_likelihood", "pearson_r", "prob_of",
    "score_statement", "statement_posterior", "statement_prior",
]
