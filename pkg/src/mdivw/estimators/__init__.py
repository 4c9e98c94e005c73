"""Ratio estimators for two-sample summary-data MR."""

from mdivw.estimators.moments import bias_estimate, compute_moments
from mdivw.estimators.ratio import divw, ivw, mdivw, modification_factor, tau_squared
from mdivw.estimators.registry import ESTIMATORS, parse_methods, run_estimator
from mdivw.estimators.selection import default_lambda, iv_strength, select_ivs
from mdivw.estimators.types import Estimate, Method, Moments, SelectionMask, StrengthStats
from mdivw.estimators.variance import delta_hat, divw_variance, mdivw_variance

__all__ = [
    "ESTIMATORS",
    "Estimate",
    "Method",
    "Moments",
    "SelectionMask",
    "StrengthStats",
    "bias_estimate",
    "compute_moments",
    "default_lambda",
    "delta_hat",
    "divw",
    "divw_variance",
    "iv_strength",
    "ivw",
    "mdivw",
    "mdivw_variance",
    "modification_factor",
    "parse_methods",
    "run_estimator",
    "select_ivs",
    "tau_squared",
]
