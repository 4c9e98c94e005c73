import logging
import math

import numpy as np

from mdivw.simulation.scenario import SimConfig
from mdivw.simulation.truth import SimTruth
from mdivw.summary_data.dataset import SummaryDataset

logger = logging.getLogger(__name__)


def draw_dataset(truth: SimTruth, config: SimConfig, rng: np.random.Generator) -> SummaryDataset:
    """
    One replication of exposure, outcome and selection summary statistics.

    alpha is redrawn here (random-effect pleiotropy). The selection GWAS is
    independent of the exposure GWAS and has variance se_gamma^2 / selection_fraction.
    Draw order is fixed so a given generator state always yields the same dataset.
    """
    p = truth.p
    alpha = rng.normal(0.0, config.tau0, size=p) if config.tau0 > 0 else np.zeros(p)
    se_star = truth.se_gamma / math.sqrt(config.selection_fraction)

    gamma_hat = rng.normal(truth.gamma, truth.se_gamma)
    Gamma_hat = rng.normal(config.beta0 * truth.gamma + alpha, truth.se_Gamma)
    gamma_star = rng.normal(truth.gamma, se_star)

    return SummaryDataset(
        snp_ids=truth.snp_ids,
        gamma_hat=gamma_hat,
        se_gamma=truth.se_gamma,
        Gamma_hat=Gamma_hat,
        se_Gamma=truth.se_Gamma,
        gamma_star=gamma_star,
        se_gamma_star=se_star,
    )
