"""Simulation scenario definition."""

import logging
from typing import Any, Dict

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mdivw.config import CONFIG
from mdivw.utils.error_handling import SimulationConfigError

logger = logging.getLogger(__name__)


class SimConfig(BaseModel):
    """
    One data-generating scenario plus its Monte Carlo settings.

    ``lambda`` is a Python keyword, so the field is ``lambda_`` and is read
    and written as ``lambda`` in files.
    """

    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    p: int = 1000
    s: int = 100
    sigma2: float = 5e-4
    beta0: float = 0.5
    tau0: float = 0.0
    n_x: int = 150000
    n_y: int = 75000
    selection_fraction: float = 0.5
    lambda_: float = Field(0.0, alias="lambda")
    reps: int = 1000
    seed: int = Field(default_factory=lambda: CONFIG["DEFAULT_SEED"])
    var_u: float = 2.0
    var_ex: float = 2.0
    var_ey: float = 2.0
    bootstrap_reps: int = 200

    @model_validator(mode="after")
    def _check(self) -> "SimConfig":
        problems = []
        if self.p < 1:
            problems.append(f"p must be at least 1 (got {self.p})")
        if not 0 <= self.s <= self.p:
            problems.append(f"s must lie in [0, p] (got s={self.s}, p={self.p})")
        if self.reps < 1:
            problems.append(f"reps must be at least 1 (got {self.reps})")
        if not self.sigma2 > 0:
            problems.append("sigma2 must be positive")
        if self.tau0 < 0:
            problems.append("tau0 must be nonnegative")
        if self.n_x < 1 or self.n_y < 1:
            problems.append("n_x and n_y must be positive")
        if not 0 < self.selection_fraction <= 1:
            problems.append("selection_fraction must lie in (0, 1]")
        if self.lambda_ < 0:
            problems.append("lambda must be nonnegative")
        if min(self.var_u, self.var_ex, self.var_ey) <= 0:
            problems.append("var_u, var_ex and var_ey must be positive")
        if self.bootstrap_reps < 100:
            problems.append("bootstrap_reps must be at least 100")
        if problems:
            raise SimulationConfigError("; ".join(problems))
        return self

    @property
    def n_x_star(self) -> float:
        """Size of the selection GWAS implied by selection_fraction."""
        return self.n_x * self.selection_fraction

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)
