import logging
import math

import numpy as np

from mdivw.estimators.types import SelectionMask, StrengthStats
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.error_handling import EmptySelectionError, MissingSelectionDataError
from mdivw.utils.utils import stable_sum

logger = logging.getLogger(__name__)


def default_lambda(p: int) -> float:
    """Recommended screening threshold sqrt(2 log p); 0 for a single SNP."""
    if p < 1:
        raise ValueError(f"p must be at least 1, got {p}")
    return math.sqrt(2.0 * math.log(p))


def select_ivs(dataset: SummaryDataset, threshold: float) -> SelectionMask:
    """
    Screen instruments on the independent selection GWAS.

    A SNP is kept iff |gamma*_j| / se*_j > threshold (ties are dropped).
    threshold = 0 keeps every SNP and needs no selection data.
    """
    if threshold < 0:
        raise ValueError(f"Selection threshold must be nonnegative, got {threshold}")
    if threshold == 0:
        return SelectionMask(threshold=0.0, included=np.ones(dataset.p, dtype=bool))
    if not dataset.has_selection:
        raise MissingSelectionDataError(
            f"Threshold {threshold:g} needs selection-dataset columns (gamma_star, se_gamma_star)"
        )

    z_star = np.abs(dataset.gamma_star) / dataset.se_gamma_star
    included = z_star > threshold
    included.setflags(write=False)
    mask = SelectionMask(threshold=float(threshold), included=included)
    logger.debug(f"Selection at threshold {threshold:.4f} kept {mask.p_lambda_hat}/{dataset.p} SNPs")
    return mask


def check_mask(dataset: SummaryDataset, mask: SelectionMask) -> None:
    if len(mask) != dataset.p:
        raise ValueError(f"Mask covers {len(mask)} SNPs, dataset has {dataset.p}")
    if mask.p_lambda_hat == 0:
        raise EmptySelectionError(f"No SNP passes the selection threshold {mask.threshold:g}")


def iv_strength(dataset: SummaryDataset, mask: SelectionMask) -> StrengthStats:
    """kappa_hat = mean of gamma_hat^2 / se_gamma^2 over selected SNPs, minus 1."""
    check_mask(dataset, mask)
    s = mask.included
    p_selected = mask.p_lambda_hat
    kappa_hat = stable_sum(dataset.gamma_hat[s] ** 2 / dataset.se_gamma[s] ** 2) / p_selected - 1.0
    return StrengthStats.from_kappa(kappa_hat, p_selected, mask.threshold)
