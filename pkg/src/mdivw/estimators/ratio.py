"""IVW, debiased IVW and modified debiased IVW estimators."""

import logging
import math
from typing import Optional

from mdivw.estimators.moments import compute_moments, selected_columns
from mdivw.estimators.selection import iv_strength
from mdivw.estimators.types import Estimate, Method, Moments, SelectionMask, StrengthStats
from mdivw.estimators.variance import divw_variance, mdivw_variance
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.error_handling import (
    DegenerateDenominatorError,
    VarianceDegeneracyError,
    WeakInstrumentError,
    ZeroNumeratorError,
)
from mdivw.utils.utils import stable_sum

logger = logging.getLogger(__name__)


def ivw(dataset: SummaryDataset, mask: SelectionMask, z: Optional[float] = None) -> Estimate:
    """
    Fixed-effect IVW estimate sum(w g G) / sum(w g^2), w = sG^-2.

    The standard error is the first-order sqrt(1 / sum(w g^2)).
    """
    g, _, G, sG = selected_columns(dataset, mask)
    w = 1.0 / sG**2
    denominator = stable_sum(w * g**2)
    if not denominator > 0:
        raise DegenerateDenominatorError(f"IVW denominator is {denominator:g}")

    beta = stable_sum(w * g * G) / denominator
    return Estimate.build(
        Method.IVW,
        beta=beta,
        se=math.sqrt(1.0 / denominator),
        strength=iv_strength(dataset, mask),
        p_used=int(g.size),
        z=z,
    )


def _check_theta2(moments: Moments, strength: StrengthStats) -> None:
    if not moments.theta2 > 0:
        raise WeakInstrumentError(moments.theta2, strength.psi_hat)


def divw(dataset: SummaryDataset, mask: SelectionMask, z: Optional[float] = None) -> Estimate:
    """Debiased IVW: theta1 / theta2, with gamma_hat^2 - se_gamma^2 in the denominator."""
    moments = compute_moments(dataset, mask)
    strength = iv_strength(dataset, mask)
    _check_theta2(moments, strength)

    beta = moments.theta1 / moments.theta2
    variance = divw_variance(dataset, mask, moments.theta2, beta)
    return Estimate.build(
        Method.DIVW,
        beta=beta,
        se=math.sqrt(variance),
        strength=strength,
        p_used=moments.p_used,
        z=z,
    )


def modification_factor(moments: Moments) -> float:
    """1 - v2 / theta2^2 + v12 / (theta1 theta2)."""
    t1, t2 = moments.theta1, moments.theta2
    return 1.0 - moments.v2 / t2**2 + moments.v12 / (t1 * t2)


def tau_squared(dataset: SummaryDataset, mask: SelectionMask, beta: float) -> float:
    """
    Raw balanced-pleiotropy variance estimate; may be negative.

    sum{ ((G - beta g)^2 - sG^2 - beta^2 sg^2) w } / sum(w), w = sG^-2.
    """
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta}")
    g, sg, G, sG = selected_columns(dataset, mask)
    w = 1.0 / sG**2
    excess = ((G - beta * g) ** 2 - sG**2 - beta**2 * sg**2) * w
    return stable_sum(excess) / stable_sum(w)


def mdivw(
    dataset: SummaryDataset,
    mask: SelectionMask,
    pleiotropy: bool = False,
    z: Optional[float] = None,
    variance_fallback: bool = True,
) -> Estimate:
    """
    Modified debiased IVW estimate.

    beta = (1 - v2/theta2^2 + v12/(theta1 theta2)) * theta1/theta2, i.e. the
    dIVW ratio minus its estimated first-order bias. With ``pleiotropy`` the
    variance uses tau^2 (clamped at 0) and the raw tau^2 is reported.

    When the estimated variance is not positive (tiny psi_hat, Delta_hat
    dominating) the dIVW variance formula at the mdIVW beta is used instead
    and the estimate is flagged; pass ``variance_fallback=False`` to raise
    VarianceDegeneracyError instead.
    """
    moments = compute_moments(dataset, mask)
    strength = iv_strength(dataset, mask)
    if moments.theta1 == 0:
        raise ZeroNumeratorError("theta1 is zero; the modification factor is undefined")
    _check_theta2(moments, strength)

    beta = modification_factor(moments) * (moments.theta1 / moments.theta2)

    tau2_raw = tau_squared(dataset, mask, beta) if pleiotropy else None
    tau2 = max(0.0, tau2_raw) if tau2_raw is not None else 0.0

    fallback = False
    if beta == 0:
        variance, delta = 0.0, float("nan")
    else:
        variance, delta = mdivw_variance(dataset, mask, moments, beta, tau2)
    if not variance > 0:
        if not variance_fallback:
            raise VarianceDegeneracyError(variance, delta)
        logger.warning(
            f"mdIVW variance {variance:.4g} not positive (delta_hat={delta:.4g}, "
            f"psi_hat={strength.psi_hat:.3g}); using the dIVW variance formula"
        )
        variance = divw_variance(dataset, mask, moments.theta2, beta, tau2)
        fallback = True

    return Estimate.build(
        Method.MDIVW,
        beta=beta,
        se=math.sqrt(variance),
        strength=strength,
        p_used=moments.p_used,
        tau2=tau2_raw,
        variance_fallback=fallback,
        z=z,
    )
