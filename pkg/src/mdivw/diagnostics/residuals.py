"""Standardized residuals and normal Q-Q coordinates."""

import io
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict
from scipy.stats import norm

from mdivw.estimators.moments import selected_columns
from mdivw.estimators.types import SelectionMask
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.utils.utils import provenance_header, stable_sum, write_report

logger = logging.getLogger(__name__)


class ResidualSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    p: int
    mean: float
    variance: float


class ResidualSet(BaseModel):
    """Residuals sorted ascending, paired with normal quantiles at (r - 0.5) / n."""

    model_config = ConfigDict(frozen=True)

    snp_ids: Tuple[str, ...]
    residual: Tuple[float, ...]
    theoretical_quantile: Tuple[float, ...]
    beta: float
    tau2: float = 0.0

    def __len__(self) -> int:
        return len(self.residual)

    def summary(self) -> ResidualSummary:
        n = len(self.residual)
        mean = stable_sum(self.residual) / n
        variance = stable_sum([(r - mean) ** 2 for r in self.residual]) / (n - 1) if n > 1 else 0.0
        return ResidualSummary(p=n, mean=mean, variance=variance)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "snp_id": list(self.snp_ids),
                "residual": list(self.residual),
                "theoretical_quantile": list(self.theoretical_quantile),
            }
        )

    def to_csv(self, path: Optional[Path] = None, provenance: Optional[Dict[str, Any]] = None) -> str:
        """CSV text (optionally preceded by ``#`` provenance lines), written to ``path`` if given."""
        buffer = io.StringIO()
        buffer.write(provenance_header(provenance or {}))
        self.to_frame().to_csv(buffer, index=False, float_format="%.17g")
        return write_report(buffer.getvalue(), path)


def standardized_residuals(
    dataset: SummaryDataset,
    mask: SelectionMask,
    beta: float,
    tau2: float = 0.0,
) -> ResidualSet:
    """
    (Gamma_hat - beta gamma_hat) / sqrt(se_Gamma^2 + beta^2 se_gamma^2 [+ tau2]).

    ``tau2`` adds balanced-pleiotropy variance to the denominator; it is off
    by default.
    """
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta}")
    if tau2 < 0:
        raise ValueError(f"tau2 must be nonnegative, got {tau2}")

    g, sg, G, sG = selected_columns(dataset, mask)
    ids = np.asarray(dataset.snp_ids, dtype=object)[mask.included]
    residual = (G - beta * g) / np.sqrt(sG**2 + beta**2 * sg**2 + tau2)

    order = np.argsort(residual, kind="stable")
    n = residual.size
    positions = (np.arange(1, n + 1) - 0.5) / n
    logger.debug(f"Computed {n} standardized residuals at beta={beta:.5g}")
    return ResidualSet(
        snp_ids=tuple(ids[order].tolist()),
        residual=tuple(residual[order].tolist()),
        theoretical_quantile=tuple(norm.ppf(positions).tolist()),
        beta=beta,
        tau2=tau2,
    )
