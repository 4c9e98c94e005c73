"""Preset and file-defined scenario grids."""

import itertools
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List

import yaml

from mdivw.estimators.selection import default_lambda
from mdivw.simulation.scenario import SimConfig
from mdivw.utils.error_handling import SimulationConfigError

logger = logging.getLogger(__name__)


def table1_grid(**overrides: Any) -> List[SimConfig]:
    """No selection, n_X = 2 n_Y = 150000, s in {50, 100, 150}."""
    return [SimConfig(**{**overrides, "s": s}) for s in (50, 100, 150)]


def table2_grid(**overrides: Any) -> List[SimConfig]:
    """s = 150 with selection at sqrt(2 log p) on a GWAS of 75000, 100000 or 150000."""
    base = SimConfig(**{**overrides, "s": 150})
    threshold = default_lambda(base.p)
    return [
        SimConfig(**{**base.echo(), "selection_fraction": n_star / base.n_x, "lambda": threshold})
        for n_star in (75000, 100000, 150000)
    ]


def dominance_grid(**overrides: Any) -> List[SimConfig]:
    """27 points: s x sigma2 x n_X, with n_Y = n_X / 2."""
    return [
        SimConfig(**{**overrides, "s": s, "sigma2": sigma2, "n_x": n_x, "n_y": n_x // 2})
        for s, sigma2, n_x in itertools.product((50, 100, 150), (2.5e-4, 5e-4, 1e-3), (100000, 150000, 200000))
    ]


PRESETS: Dict[str, Callable[..., List[SimConfig]]] = {
    "table1": table1_grid,
    "table2": table2_grid,
    "dominance": dominance_grid,
}


def load_grid(path: Path, **overrides: Any) -> List[SimConfig]:
    """
    Read a YAML grid.

    Either ``scenarios:`` (a list of mappings) or ``base:`` plus ``vary:``
    (a mapping of lists expanded as a cartesian product). ``overrides`` fill
    keys the file leaves unset.
    """
    with open(path, "r") as file:
        document = yaml.safe_load(file) or {}
    if not isinstance(document, dict):
        raise SimulationConfigError(f"Grid file {path} must contain a mapping")

    if "scenarios" in document:
        points = list(document["scenarios"] or [])
    else:
        base = document.get("base") or {}
        vary = document.get("vary") or {}
        keys = list(vary)
        points = [{**base, **dict(zip(keys, combo))} for combo in itertools.product(*(vary[k] for k in keys))]
    if not points:
        raise SimulationConfigError(f"Grid file {path} defines no scenarios")

    grid = [SimConfig(**{**overrides, **point}) for point in points]
    logger.info(f"Loaded {len(grid)} scenario(s) from {path}")
    return grid


def resolve_grid(name_or_path: str, **overrides: Any) -> List[SimConfig]:
    if name_or_path in PRESETS:
        return PRESETS[name_or_path](**overrides)
    return load_grid(Path(name_or_path), **overrides)
