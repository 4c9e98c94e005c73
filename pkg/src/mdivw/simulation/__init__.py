"""Data-generating process and Monte Carlo benchmarking."""

from mdivw.simulation.draw import draw_dataset
from mdivw.simulation.grids import PRESETS, dominance_grid, load_grid, resolve_grid, table1_grid, table2_grid
from mdivw.simulation.monte_carlo import (
    DominanceReport,
    MethodMetrics,
    MetricsTable,
    check_dominance,
    long_format,
    long_format_csv,
    run_monte_carlo,
    scenario_truth,
    sweep,
)
from mdivw.simulation.scenario import SimConfig
from mdivw.simulation.truth import SimTruth, build_truth, population_moments, selection_probabilities

__all__ = [
    "PRESETS",
    "DominanceReport",
    "MethodMetrics",
    "MetricsTable",
    "SimConfig",
    "SimTruth",
    "build_truth",
    "check_dominance",
    "dominance_grid",
    "draw_dataset",
    "load_grid",
    "long_format",
    "long_format_csv",
    "population_moments",
    "resolve_grid",
    "run_monte_carlo",
    "scenario_truth",
    "selection_probabilities",
    "sweep",
    "table1_grid",
    "table2_grid",
]
