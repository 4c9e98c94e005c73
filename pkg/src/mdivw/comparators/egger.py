"""MR-Egger regression."""

import logging
import math
from typing import Optional

import numpy as np
import statsmodels.api as sm
from pydantic import BaseModel, ConfigDict
from scipy.stats import t

from mdivw.estimators.moments import selected_columns
from mdivw.estimators.selection import iv_strength
from mdivw.estimators.types import Estimate, Method, SelectionMask
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.error_handling import InsufficientInstrumentsError, SingularDesignError

logger = logging.getLogger(__name__)


class EggerFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    intercept: float
    slope: float
    se_intercept: float
    se_slope: float
    residual_scale: float
    intercept_p_value: float
    p_used: int


def egger_fit(dataset: SummaryDataset, mask: SelectionMask, orient: bool = True) -> EggerFit:
    """
    Weighted regression of Gamma_hat on gamma_hat with an intercept.

    Weights are se_Gamma^-2. SNPs are first oriented so gamma_hat >= 0. Standard
    errors are the fixed-effect ones scaled by max(1, residual SD)
    (multiplicative random effects, never deflated).
    """
    g, _, G, sG = selected_columns(dataset, mask)
    p_used = int(g.size)
    if p_used < 3:
        raise InsufficientInstrumentsError(f"MR-Egger needs at least 3 SNPs, got {p_used}")

    if orient:
        sign = np.where(g < 0, -1.0, 1.0)
        g, G = g * sign, G * sign
    if np.ptp(g) == 0:
        raise SingularDesignError("All gamma_hat values are equal; slope and intercept are not identified")

    design = sm.add_constant(g, has_constant="add")
    model = sm.WLS(G, design, weights=1.0 / sG**2).fit()

    residual_scale = max(1.0, math.sqrt(max(model.mse_resid, 0.0)))
    fixed_se = np.sqrt(np.diag(model.normalized_cov_params))
    se_intercept, se_slope = (fixed_se * residual_scale).tolist()
    intercept, slope = (float(v) for v in model.params)

    logger.debug(f"Egger fit: slope={slope:.5g}, intercept={intercept:.5g}, scale={residual_scale:.3g}")
    return EggerFit(
        intercept=intercept,
        slope=slope,
        se_intercept=se_intercept,
        se_slope=se_slope,
        residual_scale=residual_scale,
        intercept_p_value=float(2 * t.sf(abs(intercept / se_intercept), p_used - 2)),
        p_used=p_used,
    )


def egger(dataset: SummaryDataset, mask: SelectionMask, z: Optional[float] = None) -> Estimate:
    """MR-Egger slope as a causal estimate."""
    fit = egger_fit(dataset, mask)
    return Estimate.build(
        Method.EGGER,
        beta=fit.slope,
        se=fit.se_slope,
        strength=iv_strength(dataset, mask),
        p_used=fit.p_used,
        z=z,
    )
