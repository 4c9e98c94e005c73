"""
Weighted moment sums behind the ratio estimators.

All sums run over the selected SNPs only and use correctly rounded
summation in dataset order, so results do not drift with p and equal the
unselected sums exactly when every SNP is selected.
"""

import logging
from typing import Tuple

import numpy as np

from mdivw.estimators.selection import check_mask
from mdivw.estimators.types import Moments, SelectionMask
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.utils import stable_sum

logger = logging.getLogger(__name__)

Columns = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def selected_columns(dataset: SummaryDataset, mask: SelectionMask) -> Columns:
    """(gamma_hat, se_gamma, Gamma_hat, se_Gamma) restricted to the mask."""
    check_mask(dataset, mask)
    s = mask.included
    return dataset.gamma_hat[s], dataset.se_gamma[s], dataset.Gamma_hat[s], dataset.se_Gamma[s]


def v1_terms(g: np.ndarray, sg: np.ndarray, G: np.ndarray, sG: np.ndarray, tau2: float = 0.0) -> np.ndarray:
    """Summands of Var(theta1_hat); tau2 > 0 gives the balanced-pleiotropy version."""
    outcome_var = sG**2 + tau2
    return (sg**2 * G**2 + outcome_var * g**2 - outcome_var * sg**2) / sG**4


def compute_moments(dataset: SummaryDataset, mask: SelectionMask) -> Moments:
    """theta1, theta2 and the (co)variance estimates v1, v2, v12 over the selection."""
    g, sg, G, sG = selected_columns(dataset, mask)
    w = 1.0 / sG**2

    moments = Moments(
        theta1=stable_sum(w * g * G),
        theta2=stable_sum(w * (g**2 - sg**2)),
        v1=stable_sum(v1_terms(g, sg, G, sG)),
        v2=stable_sum(w**2 * (4.0 * sg**2 * g**2 - 2.0 * sg**4)),
        v12=2.0 * stable_sum(w**2 * sg**2 * g * G),
        p_used=int(g.size),
    )
    logger.debug(f"Moments over {moments.p_used} SNPs: {moments}")
    return moments


def bias_estimate(moments: Moments) -> float:
    """First-order bias of the dIVW ratio: theta1 v2 / theta2^3 - v12 / theta2^2."""
    t1, t2 = moments.theta1, moments.theta2
    return t1 * moments.v2 / t2**3 - moments.v12 / t2**2
