"""Value types shared by the estimators."""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator
from scipy.stats import norm

from mdivw.config import CONFIG


class Method(str, Enum):
    IVW = "IVW"
    DIVW = "dIVW"
    MDIVW = "mdIVW"
    EGGER = "Egger"
    WEIGHTED_MEDIAN = "WeightedMedian"


@dataclass(frozen=True)
class SelectionMask:
    """s_{lambda,j}: which SNPs pass |gamma*_j| / se*_j > threshold."""

    threshold: float
    included: np.ndarray = field(repr=False)

    @property
    def p_lambda_hat(self) -> int:
        return int(np.count_nonzero(self.included))

    def __len__(self) -> int:
        return int(self.included.size)


@dataclass(frozen=True)
class Moments:
    theta1: float
    theta2: float
    v1: float
    v2: float
    v12: float
    p_used: int


class StrengthStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa_hat: float
    p_selected: int
    psi_hat: float
    threshold: float = 0.0

    @classmethod
    def from_kappa(cls, kappa_hat: float, p_selected: int, threshold: float) -> "StrengthStats":
        return cls(
            kappa_hat=kappa_hat,
            p_selected=p_selected,
            psi_hat=kappa_hat * math.sqrt(p_selected),
            threshold=threshold,
        )


class Estimate(BaseModel):
    """A causal-effect estimate with its normal-theory interval."""

    model_config = ConfigDict(frozen=True)

    method: Method
    beta: float
    se: float
    ci_lower: float
    ci_upper: float
    p_value: float
    strength: StrengthStats
    p_used: int
    tau2: Optional[float] = None
    variance_fallback: bool = False

    @field_validator("se")
    @classmethod
    def _positive_se(cls, value: float) -> float:
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"standard error must be finite and positive, got {value}")
        return value

    @classmethod
    def build(
        cls,
        method: Method,
        beta: float,
        se: float,
        strength: StrengthStats,
        p_used: int,
        tau2: Optional[float] = None,
        variance_fallback: bool = False,
        z: Optional[float] = None,
    ) -> "Estimate":
        z = CONFIG["Z_CRITICAL"] if z is None else z
        return cls(
            method=method,
            beta=beta,
            se=se,
            ci_lower=beta - z * se,
            ci_upper=beta + z * se,
            p_value=float(2 * norm.sf(abs(beta / se))) if se > 0 else float("nan"),
            strength=strength,
            p_used=p_used,
            tau2=tau2,
            variance_fallback=variance_fallback,
        )

    def covers(self, value: float) -> bool:
        return self.ci_lower <= value <= self.ci_upper

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "psi_hat": self.strength.psi_hat,
            "lambda": self.strength.threshold,
            "beta": self.beta,
            "se": self.se,
            "ci_lower": self.ci_lower,
            "ci_upper": self.ci_upper,
            "p_value": self.p_value,
            "tau2": self.tau2,
            "p_used": self.p_used,
            "variance_fallback": self.variance_fallback,
        }
