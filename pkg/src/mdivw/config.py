import logging
import os

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _get_float_env(key: str, default: float) -> float:
    try:
        return float(os.getenv(key, str(default)))
    except ValueError:
        logger.warning(f"Invalid float value for {key}, using default {default}")
        return default


def _get_int_env(key: str, default: int) -> int:
    try:
        return int(os.getenv(key, str(default)))
    except ValueError:
        logger.warning(f"Invalid integer value for {key}, using default {default}")
        return default


CONFIG = {
    # Two-sided 95% normal critical value
    "Z_CRITICAL": _get_float_env("MDIVW_Z_CRITICAL", 1.959964),
    "BOOTSTRAP_REPS": _get_int_env("MDIVW_BOOTSTRAP_REPS", 1000),
    "DEFAULT_SEED": _get_int_env("MDIVW_SEED", 20240101),
    "WORKERS": _get_int_env("MDIVW_WORKERS", 1),
    "LOG_LEVEL": os.getenv("MDIVW_LOG_LEVEL", "INFO").upper(),
    # sigma_gamma^2 / sigma_Gamma^2 outside this range is flagged by validate()
    "VARIANCE_RATIO_BOUNDS": (1e-6, 1e6),
}
