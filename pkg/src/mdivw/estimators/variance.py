"""Variance estimators for the debiased ratio estimators."""

import logging

import numpy as np

from mdivw.estimators.moments import selected_columns, v1_terms
from mdivw.estimators.types import Moments, SelectionMask
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.utils import stable_sum

logger = logging.getLogger(__name__)


def divw_variance(
    dataset: SummaryDataset,
    mask: SelectionMask,
    theta2: float,
    beta: float,
    tau2: float = 0.0,
) -> float:
    """
    theta2^-2 * sum{ w g^2 (1 + w tau2) + beta^2 w^2 sg^2 (g^2 + sg^2) }, w = sG^-2.

    With tau2 = 0 this is the usual dIVW variance; the mdIVW variance uses
    it as its leading term.
    """
    g, sg, _, sG = selected_columns(dataset, mask)
    w = 1.0 / sG**2
    terms = w * g**2 * (1.0 + w * tau2) + beta**2 * w**2 * sg**2 * (g**2 + sg**2)
    return stable_sum(terms) / theta2**2


def delta_hat(
    dataset: SummaryDataset,
    mask: SelectionMask,
    moments: Moments,
    beta: float,
    tau2: float = 0.0,
) -> float:
    """
    Estimated variance reduction term Delta_hat (Delta_hat_tau when tau2 > 0).

    Under pleiotropy v1 is replaced by its tau-inflated version and the
    beta^-2 sum picks up the factor (1 + sG^-2 tau2); at tau2 = 0 both
    reduce to the plain estimate term for term.
    """
    g, sg, G, sG = selected_columns(dataset, mask)
    w = 1.0 / sG**2
    v1 = stable_sum(v1_terms(g, sg, G, sG, tau2)) if tau2 else moments.v1
    v2, v12, t2 = moments.v2, moments.v12, moments.theta2

    cubic = stable_sum(w**3 * sg**4 * (6.0 * g**2 + 2.0 * sg**2))
    weak = stable_sum(w**2 * sg**2 * g**2 * (1.0 + w * tau2))
    return (
        v1 * v2 / beta**2
        - 6.0 * v12 * v2 / beta
        + 2.0 * v12**2 / beta**2
        + 3.0 * v2**2
        - t2 * cubic
        - 2.0 * t2 * weak / beta**2
    )


def mdivw_variance(
    dataset: SummaryDataset,
    mask: SelectionMask,
    moments: Moments,
    beta: float,
    tau2: float = 0.0,
) -> tuple[float, float]:
    """Return (V_hat, Delta_hat) for the mdIVW estimate ``beta``."""
    leading = divw_variance(dataset, mask, moments.theta2, beta, tau2)
    delta = delta_hat(dataset, mask, moments, beta, tau2)
    variance = leading - 2.0 * beta**2 * delta / moments.theta2**4
    return variance, delta
