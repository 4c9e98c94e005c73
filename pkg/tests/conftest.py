"""
Pytest configuration and fixtures for mdivw tests.
"""

import os
import sys
from pathlib import Path
from typing import Callable, Dict
from unittest.mock import patch

import numpy as np
import pytest

# Add project root and src to path
project_root = os.path.join(os.path.dirname(__file__), "..")
sys.path.insert(0, project_root)
sys.path.insert(0, os.path.join(project_root, "src"))

from mdivw.summary_data.dataset import SummaryDataset  # noqa: E402
from tests.helpers import build_dataset, write_gwas_files  # noqa: E402


# Mock configuration for testing
@pytest.fixture(scope="session")
def mock_config():
    """Mock configuration for testing."""
    return {
        "Z_CRITICAL": 1.959964,
        "BOOTSTRAP_REPS": 200,
        "DEFAULT_SEED": 20240101,
        "WORKERS": 1,
        "LOG_LEVEL": "INFO",
        "VARIANCE_RATIO_BOUNDS": (1e-6, 1e6),
    }


@pytest.fixture(autouse=True)
def mock_env_vars(mock_config):
    """Mock environment variables for all tests."""
    with patch.dict(
        os.environ,
        {
            "MDIVW_SEED": str(mock_config["DEFAULT_SEED"]),
            "MDIVW_WORKERS": str(mock_config["WORKERS"]),
            "MDIVW_BOOTSTRAP_REPS": str(mock_config["BOOTSTRAP_REPS"]),
            "MDIVW_LOG_LEVEL": mock_config["LOG_LEVEL"],
        },
    ):
        yield


@pytest.fixture(autouse=True)
def mock_config_module(mock_config):
    """Mock the config module for all tests."""
    with patch.dict("mdivw.config.CONFIG", mock_config):
        yield


@pytest.fixture
def make_dataset() -> Callable[..., SummaryDataset]:
    """Factory building a dataset with ids rs1, rs2, ..."""
    return build_dataset


@pytest.fixture
def three_snp_dataset() -> SummaryDataset:
    """Hand-checkable dataset: theta1=7, theta2=13.25, v2=13.625, v12=3.5."""
    return build_dataset(
        gamma_hat=[0.2, 0.1, 0.3],
        se_gamma=[0.05, 0.05, 0.05],
        Gamma_hat=[0.1, 0.05, 0.15],
        se_Gamma=[0.1, 0.1, 0.1],
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def simulated_dataset() -> SummaryDataset:
    """One replication of the default scenario (p=1000, s=100)."""
    from mdivw.simulation import SimConfig, build_truth, draw_dataset

    config = SimConfig(reps=1, seed=7)
    children = np.random.SeedSequence(config.seed).spawn(2)
    truth = build_truth(config, np.random.default_rng(children[0]))
    return draw_dataset(truth, config, np.random.default_rng(children[1]))


@pytest.fixture
def gwas_files(tmp_path, simulated_dataset) -> Dict[str, Path]:
    return write_gwas_files(simulated_dataset, tmp_path / "gwas")
