"""Weighted median estimator with a parametric bootstrap standard error."""

import logging
from typing import Optional

import numpy as np

from mdivw.config import CONFIG
from mdivw.estimators.moments import selected_columns
from mdivw.estimators.selection import iv_strength
from mdivw.estimators.types import Estimate, Method, SelectionMask
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.error_handling import InsufficientInstrumentsError, UndefinedRatioError

logger = logging.getLogger(__name__)

MIN_BOOTSTRAP_REPS = 100


def _weighted_median_rows(ratios: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Row-wise weighted median with linear interpolation in cumulative weight."""
    ratios = np.atleast_2d(ratios)
    order = np.argsort(ratios, axis=1, kind="stable")
    sorted_ratios = np.take_along_axis(ratios, order, axis=1)
    sorted_weights = weights[order] / weights.sum()
    position = np.cumsum(sorted_weights, axis=1) - 0.5 * sorted_weights

    rows = np.arange(ratios.shape[0])
    above = np.argmax(position >= 0.5, axis=1)
    below = np.maximum(above - 1, 0)

    upper = sorted_ratios[rows, above]
    lower = sorted_ratios[rows, below]
    span = position[rows, above] - position[rows, below]
    exact = (above == 0) | (position[rows, above] == 0.5)
    with np.errstate(divide="ignore", invalid="ignore"):
        interpolated = lower + (upper - lower) * (0.5 - position[rows, below]) / span
    return np.where(exact, upper, interpolated)


def weighted_median_value(ratios: np.ndarray, weights: np.ndarray) -> float:
    """50% point of the weighted empirical distribution of ``ratios``."""
    ratios = np.asarray(ratios, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if ratios.shape != weights.shape or ratios.ndim != 1:
        raise ValueError("ratios and weights must be 1-d arrays of equal length")
    if np.any(weights < 0) or not weights.sum() > 0:
        raise ValueError("weights must be nonnegative with a positive sum")
    return float(_weighted_median_rows(ratios, weights)[0])


def weighted_median(
    dataset: SummaryDataset,
    mask: SelectionMask,
    bootstrap_reps: Optional[int] = None,
    seed: Optional[int] = None,
    z: Optional[float] = None,
) -> Estimate:
    """
    Weighted median of the Wald ratios Gamma_hat / gamma_hat.

    Weights are se_Gamma^-2 gamma_hat^2. The SE is the standard deviation of
    the weighted median over parametric resamples gamma ~ N(gamma_hat, se_gamma^2),
    Gamma ~ N(Gamma_hat, se_Gamma^2), with the weights held fixed.
    """
    bootstrap_reps = CONFIG["BOOTSTRAP_REPS"] if bootstrap_reps is None else bootstrap_reps
    seed = CONFIG["DEFAULT_SEED"] if seed is None else seed
    if bootstrap_reps < MIN_BOOTSTRAP_REPS:
        raise ValueError(f"bootstrap_reps must be at least {MIN_BOOTSTRAP_REPS}, got {bootstrap_reps}")

    g, sg, G, sG = selected_columns(dataset, mask)
    p_used = int(g.size)
    if p_used < 2:
        raise InsufficientInstrumentsError(f"Weighted median needs at least 2 SNPs, got {p_used}")
    if np.any(g == 0):
        raise UndefinedRatioError("gamma_hat is zero for a selected SNP; its Wald ratio is undefined")

    weights = g**2 / sG**2
    beta = weighted_median_value(G / g, weights)

    rng = np.random.default_rng(seed)
    g_boot = rng.normal(loc=g, scale=sg, size=(bootstrap_reps, p_used))
    G_boot = rng.normal(loc=G, scale=sG, size=(bootstrap_reps, p_used))
    with np.errstate(divide="ignore", invalid="ignore"):
        boot = _weighted_median_rows(G_boot / g_boot, weights)
    se = float(np.std(boot[np.isfinite(boot)], ddof=1))

    logger.debug(f"Weighted median {beta:.5g}, bootstrap SE {se:.4g} over {bootstrap_reps} resamples")
    return Estimate.build(
        Method.WEIGHTED_MEDIAN,
        beta=beta,
        se=se,
        strength=iv_strength(dataset, mask),
        p_used=p_used,
        z=z,
    )
