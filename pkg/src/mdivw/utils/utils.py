import json
import logging
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

import numpy as np

logger = logging.getLogger(__name__)


def stable_sum(values: Iterable[float]) -> float:
    """Correctly rounded sum in index order (error-free transformation)."""
    return math.fsum(np.asarray(values, dtype=float).ravel().tolist())


def provenance_header(provenance: Mapping[str, Any]) -> str:
    """``# key: <json>`` lines; skipped by ``pd.read_csv(comment="#")``."""
    return "".join(
        f"# {key}: {json.dumps(value, sort_keys=True, default=str)}\n" for key, value in provenance.items()
    )


def write_report(text: str, path: Optional[Path]) -> str:
    """Write ``text`` to ``path`` when one is given and return it unchanged."""
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Wrote {path}")
    return text
