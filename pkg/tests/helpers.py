"""Dataset builders shared by the test modules."""

from pathlib import Path
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from mdivw.summary_data.dataset import SummaryDataset


def build_dataset(
    gamma_hat: Sequence[float],
    se_gamma: Sequence[float],
    Gamma_hat: Sequence[float],
    se_Gamma: Sequence[float],
    gamma_star: Optional[Sequence[float]] = None,
    se_gamma_star: Optional[Sequence[float]] = None,
) -> SummaryDataset:
    return SummaryDataset(
        snp_ids=[f"rs{j + 1}" for j in range(len(gamma_hat))],
        gamma_hat=gamma_hat,
        se_gamma=se_gamma,
        Gamma_hat=Gamma_hat,
        se_Gamma=se_Gamma,
        gamma_star=gamma_star,
        se_gamma_star=se_gamma_star,
    )


def random_dataset(rng: np.random.Generator, p: int, with_selection: bool = False) -> SummaryDataset:
    """
    Well-conditioned random data: |gamma_hat| in [0.5, 1.5], beta in [0.3, 1] and
    Gamma_hat sharing the sign of gamma_hat, so no sum cancels.
    """
    gamma_hat = rng.uniform(0.5, 1.5, p) * rng.choice([-1.0, 1.0], p)
    se_gamma = rng.uniform(0.05, 0.2, p)
    beta = rng.uniform(0.3, 1.0)
    se_Gamma = rng.uniform(0.05, 0.3, p)
    Gamma_hat = beta * gamma_hat * rng.uniform(0.5, 1.5, p)
    selection = {}
    if with_selection:
        selection = {"gamma_star": gamma_hat + rng.normal(0.0, 0.1, p), "se_gamma_star": se_gamma * np.sqrt(2)}
    return build_dataset(gamma_hat, se_gamma, Gamma_hat, se_Gamma, **selection)


def write_gwas_files(dataset: SummaryDataset, directory: Path, delimiter: str = "\t") -> Dict[str, Path]:
    """Split a dataset into exposure/outcome(/selection) GWAS exports with SNP, beta, se columns."""
    directory.mkdir(parents=True, exist_ok=True)
    ids = list(dataset.snp_ids)
    files = {
        "exposure": (dataset.gamma_hat, dataset.se_gamma),
        "outcome": (dataset.Gamma_hat, dataset.se_Gamma),
    }
    if dataset.has_selection:
        files["selection"] = (dataset.gamma_star, dataset.se_gamma_star)

    paths = {}
    suffix = ".tsv" if delimiter == "\t" else ".csv"
    for label, (beta, se) in files.items():
        path = directory / f"{label}{suffix}"
        pd.DataFrame({"SNP": ids, "beta": beta, "se": se}).to_csv(
            path, sep=delimiter, index=False, float_format="%.17g"
        )
        paths[label] = path
    return paths
