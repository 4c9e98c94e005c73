"""
Population quantities for a simulation scenario.

Exposure and outcome follow X = sum(gamma_j Z_j) + U + E_X and
Y = beta0 X + sum(alpha_j Z_j) + U + E_Y, with genotype variance
Var(Z_j) = 2 MAF_j (1 - MAF_j). Only the implied summary-statistic
variances are used; no individual-level data is drawn.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.stats import norm

from mdivw.simulation.scenario import SimConfig
from mdivw.utils.error_handling import SimulationConfigError
from mdivw.utils.utils import stable_sum

logger = logging.getLogger(__name__)

MAF_RANGE = (0.1, 0.5)


@dataclass(frozen=True)
class SimTruth:
    snp_ids: Tuple[str, ...] = field(repr=False)
    gamma: np.ndarray = field(repr=False)
    alpha: np.ndarray = field(repr=False)
    maf: np.ndarray = field(repr=False)
    var_z: np.ndarray = field(repr=False)
    se_gamma: np.ndarray = field(repr=False)
    se_Gamma: np.ndarray = field(repr=False)
    q_lambda: np.ndarray = field(repr=False)
    var_x: float
    var_y: float
    kappa: float
    psi: float
    p_lambda: float
    kappa_lambda: float
    omega: float
    psi_lambda: float
    theta1: float
    theta2: float
    v1: float
    v2: float
    v12: float
    delta: float

    @property
    def p(self) -> int:
        return int(self.gamma.size)

    @property
    def psi_lambda_undeflated(self) -> float:
        """kappa_lambda sqrt(p_lambda): the quantity psi_hat estimates, without the max(1, omega) deflator."""
        return self.kappa_lambda * math.sqrt(self.p_lambda)

    @property
    def ivw_relative_bias_pct(self) -> float:
        """
        Attenuation of IVW in percent of beta0, from the ratio of expectations.

        E[sum w gamma_hat^2] adds sum q w se_gamma^2 to theta2, so IVW tends to
        beta0 theta2 / (theta2 + sum q w se_gamma^2).
        """
        noise = stable_sum(self.q_lambda * self.se_gamma**2 / self.se_Gamma**2)
        if self.theta2 + noise == 0:
            return float("nan")
        return 100.0 * (self.theta2 / (self.theta2 + noise) - 1.0)

    @property
    def divw_bias(self) -> float:
        """Leading-order bias of the dIVW ratio around beta0."""
        if self.theta2 == 0:
            return float("nan")
        return self.theta1 * self.v2 / self.theta2**3 - self.v12 / self.theta2**2


def selection_probabilities(gamma: np.ndarray, se_star: np.ndarray, threshold: float) -> np.ndarray:
    """P(|gamma*_j| / se*_j > threshold) for gamma*_j ~ N(gamma_j, se*_j^2)."""
    if threshold == 0:
        return np.ones_like(gamma, dtype=float)
    mu = gamma / se_star
    return norm.sf(threshold - mu) + norm.cdf(-threshold - mu)


def population_moments(
    gamma: np.ndarray,
    se_gamma: np.ndarray,
    se_Gamma: np.ndarray,
    q: np.ndarray,
    beta0: float,
    tau2: float = 0.0,
) -> Tuple[float, float, float, float, float, float]:
    """(theta1, theta2, v1, v2, v12, Delta) weighted by selection probabilities q."""
    w = 1.0 / se_Gamma**2
    sg2 = se_gamma**2
    outcome_var = se_Gamma**2 + tau2

    theta2 = stable_sum(q * w * gamma**2)
    theta1 = beta0 * theta2
    v1 = stable_sum(q * w**2 * (beta0**2 * sg2 * gamma**2 + outcome_var * gamma**2 + sg2 * outcome_var))
    v2 = stable_sum(q * w**2 * (4.0 * sg2 * gamma**2 + 2.0 * sg2**2))
    v12 = 2.0 * beta0 * stable_sum(q * w**2 * sg2 * gamma**2)

    if beta0 == 0:
        delta = float("nan")
    else:
        tail = stable_sum(
            q * (w**3 * sg2**2 * (6.0 * gamma**2 + 8.0 * sg2) + 2.0 * w**2 * sg2 * (gamma**2 + sg2) / beta0**2)
        )
        delta = (
            v1 * v2 / beta0**2
            - 6.0 * v12 * v2 / beta0
            + 2.0 * v12**2 / beta0**2
            + 3.0 * v2**2
            - theta2 * tail
        )
    return theta1, theta2, v1, v2, v12, delta


def build_truth(config: SimConfig, rng: np.random.Generator) -> SimTruth:
    """
    Draw the fixed per-SNP truth for a scenario.

    gamma_j ~ N(0, sigma2) for the first s SNPs and 0 otherwise, MAF_j ~ U(0.1, 0.5)
    and alpha_j ~ N(0, tau0^2). The SE formulas follow from the variance of
    single-SNP regressions of X and Y on Z_j; Var(Y) includes the
    2 beta0 Var(U) term from U entering both X and Y.
    """
    p, s = config.p, config.s
    gamma = np.zeros(p)
    gamma[:s] = rng.normal(0.0, math.sqrt(config.sigma2), size=s)
    maf = rng.uniform(*MAF_RANGE, size=p)
    alpha = rng.normal(0.0, config.tau0, size=p) if config.tau0 > 0 else np.zeros(p)
    var_z = 2.0 * maf * (1.0 - maf)

    var_x = stable_sum(gamma**2 * var_z) + config.var_u + config.var_ex
    var_y = (
        config.beta0**2 * var_x
        + 2.0 * config.beta0 * config.var_u
        + stable_sum(alpha**2 * var_z)
        + config.var_u
        + config.var_ey
    )

    sg2 = (var_x - gamma**2 * var_z) / (config.n_x * var_z)
    sG2 = (var_y - config.beta0**2 * gamma**2 * var_z) / (config.n_y * var_z)
    snp_ids = tuple(f"snp{j + 1}" for j in range(p))
    for name, values in (("se_gamma^2", sg2), ("se_Gamma^2", sG2)):
        bad = np.flatnonzero(~(values > 0))
        if bad.size:
            raise SimulationConfigError(
                f"Derived {name} is not positive for {snp_ids[bad[0]]} ({values[bad[0]]:.4g}); "
                "the scenario explains too much variance"
            )
    se_gamma, se_Gamma = np.sqrt(sg2), np.sqrt(sG2)

    ratio = gamma**2 / sg2
    kappa = stable_sum(ratio) / p
    psi = kappa * math.sqrt(p)

    q = selection_probabilities(gamma, se_gamma / math.sqrt(config.selection_fraction), config.lambda_)
    p_lambda = stable_sum(q)
    kappa_lambda = stable_sum(ratio * q) / p_lambda if p_lambda > 0 else 0.0
    omega = math.sqrt(stable_sum(gamma**4 / sG2**2 * q * (1.0 - q)) / p_lambda) if p_lambda > 0 else 0.0
    psi_lambda = kappa_lambda * math.sqrt(p_lambda) / max(1.0, omega)

    theta1, theta2, v1, v2, v12, delta = population_moments(
        gamma, se_gamma, se_Gamma, q, config.beta0, config.tau0**2
    )

    truth = SimTruth(
        snp_ids=snp_ids,
        gamma=gamma,
        alpha=alpha,
        maf=maf,
        var_z=var_z,
        se_gamma=se_gamma,
        se_Gamma=se_Gamma,
        q_lambda=q,
        var_x=var_x,
        var_y=var_y,
        kappa=kappa,
        psi=psi,
        p_lambda=p_lambda,
        kappa_lambda=kappa_lambda,
        omega=omega,
        psi_lambda=psi_lambda,
        theta1=theta1,
        theta2=theta2,
        v1=v1,
        v2=v2,
        v12=v12,
        delta=delta,
    )
    logger.debug(f"Truth: psi={psi:.3f}, psi_lambda={psi_lambda:.3f}, p_lambda={p_lambda:.1f}")
    return truth
