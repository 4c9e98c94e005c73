"""Monte Carlo driver: replicate a scenario and summarise estimator performance."""

import functools
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from mdivw.config import CONFIG
from mdivw.estimators.registry import parse_methods, run_estimator
from mdivw.estimators.selection import iv_strength, select_ivs
from mdivw.simulation.draw import draw_dataset
from mdivw.simulation.scenario import SimConfig
from mdivw.simulation.truth import SimTruth, build_truth
from mdivw.utils.error_handling import (
    MethodFailureError,
    MRError,
    SelectionError,
    handle_estimation_errors,
)
from mdivw.utils.utils import provenance_header, stable_sum, write_report

logger = logging.getLogger(__name__)

METRIC_COLUMNS = (
    "mean_psi_hat",
    "relative_bias_pct",
    "empirical_se",
    "mean_estimated_se",
    "mse",
    "coverage_probability",
    "n_used",
    "n_failed",
)


class MethodMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    method: str
    mean_psi_hat: float
    relative_bias_pct: float
    empirical_se: float
    mean_estimated_se: float
    mse: float
    coverage_probability: float
    n_used: int
    n_failed: int
    error: Optional[str] = None


class MetricsTable(BaseModel):
    """Per-method Monte Carlo summary for one scenario."""

    model_config = ConfigDict(frozen=True)

    scenario: SimConfig
    rows: List[MethodMetrics] = []
    # kappa_lambda sqrt(p_lambda), the target of mean_psi_hat
    population_psi: Optional[float] = None
    # psi_lambda with the max(1, omega) deflator; only set under selection
    population_psi_deflated: Optional[float] = None
    error: Optional[str] = None

    def row(self, method: str) -> MethodMetrics:
        for row in self.rows:
            if row.method == method:
                return row
        raise KeyError(method)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [row.model_dump() for row in self.rows],
            columns=["method", *METRIC_COLUMNS, "error"],
        )

    def provenance(self) -> Dict[str, Any]:
        return {
            "scenario": self.scenario.echo(),
            "population_psi": self.population_psi,
            "population_psi_deflated": self.population_psi_deflated,
        }

    def to_csv(self, path: Optional[Path] = None) -> str:
        """CSV preceded by ``#`` lines carrying the resolved scenario; written to ``path`` if given."""
        buffer = io.StringIO()
        buffer.write(provenance_header(self.provenance()))
        self.to_frame().to_csv(buffer, index=False, float_format="%.10g")
        return write_report(buffer.getvalue(), path)

    def to_json(self, path: Optional[Path] = None) -> str:
        """JSON document; non-finite metrics are written as null."""
        rows = [{k: _finite_or_none(v) for k, v in row.model_dump().items()} for row in self.rows]
        document = {**self.provenance(), "error": self.error, "rows": rows}
        return write_report(json.dumps(document, indent=2, allow_nan=False) + "\n", path)


def _finite_or_none(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@handle_estimation_errors
def _estimate(method: str, dataset, mask, bootstrap_reps: int, seed: int):
    return run_estimator(method, dataset, mask, bootstrap_reps=bootstrap_reps, seed=seed)


def replicate(
    seed_seq: np.random.SeedSequence,
    truth: SimTruth,
    config: SimConfig,
    methods: Sequence[str],
) -> Dict[str, Any]:
    """
    Run one replication.

    Returns {"psi_hat": float, "results": {method: (beta, se, covers) | error code}}.
    """
    rng = np.random.default_rng(seed_seq)
    dataset = draw_dataset(truth, config, rng)
    bootstrap_seed = int(seed_seq.generate_state(1)[0])

    try:
        mask = select_ivs(dataset, config.lambda_)
        psi_hat = iv_strength(dataset, mask).psi_hat
    except SelectionError as e:
        logger.debug(f"Replication skipped: {e}")
        return {"psi_hat": float("nan"), "results": {m: e.code for m in methods}}

    results: Dict[str, Any] = {}
    for method in methods:
        outcome = _estimate(method, dataset, mask, config.bootstrap_reps, bootstrap_seed)
        if isinstance(outcome, dict):
            results[method] = outcome["code"]
        else:
            results[method] = (outcome.beta, outcome.se, outcome.covers(config.beta0))
    return {"psi_hat": psi_hat, "results": results}


def _mean(values: Sequence[float]) -> float:
    return stable_sum(values) / len(values)


def summarise(config: SimConfig, method: str, replications: Sequence[Dict[str, Any]]) -> MethodMetrics:
    """Aggregate one method's replications; failed ones are excluded and counted."""
    used = [(r["psi_hat"], *r["results"][method]) for r in replications if isinstance(r["results"][method], tuple)]
    n_failed = len(replications) - len(used)
    if not used:
        codes = sorted({r["results"][method] for r in replications})
        error = MethodFailureError(f"all {len(replications)} replications failed ({', '.join(codes)})")
        logger.warning(f"{method}: {error}")
        nan = float("nan")
        return MethodMetrics(
            method=method,
            mean_psi_hat=nan,
            relative_bias_pct=nan,
            empirical_se=nan,
            mean_estimated_se=nan,
            mse=nan,
            coverage_probability=nan,
            n_used=0,
            n_failed=n_failed,
            error=f"{error.code}: {error}",
        )
    if n_failed:
        logger.info(f"{method}: {n_failed}/{len(replications)} replications failed and were excluded")

    psi_hat, beta, se, covers = (np.array(column) for column in zip(*used))
    beta0 = config.beta0
    mean_beta = _mean(beta)
    return MethodMetrics(
        method=method,
        mean_psi_hat=_mean(psi_hat),
        relative_bias_pct=100.0 * (mean_beta - beta0) / beta0 if beta0 != 0 else float("nan"),
        empirical_se=float(np.std(beta, ddof=1)) if beta.size > 1 else 0.0,
        mean_estimated_se=_mean(se),
        mse=_mean((beta - beta0) ** 2),
        coverage_probability=_mean(covers.astype(float)),
        n_used=int(beta.size),
        n_failed=n_failed,
    )


def scenario_truth(config: SimConfig) -> SimTruth:
    """The truth :func:`run_monte_carlo` draws for ``config``, from the first seed child."""
    child = np.random.SeedSequence(config.seed).spawn(1)[0]
    return build_truth(config, np.random.default_rng(child))


def run_monte_carlo(
    config: SimConfig,
    methods: Sequence[str] | str,
    workers: Optional[int] = None,
) -> MetricsTable:
    """
    Replicate ``config`` and report bias, SE, MSE and coverage per method.

    The master seed is split with SeedSequence.spawn: the first child draws
    the truth, child r + 1 drives replication r. Results do not depend on
    ``workers``.
    """
    methods = parse_methods(methods)
    workers = CONFIG["WORKERS"] if workers is None else workers
    children = np.random.SeedSequence(config.seed).spawn(config.reps + 1)
    truth = scenario_truth(config)
    task = functools.partial(replicate, truth=truth, config=config, methods=methods)

    logger.info(
        f"Running {config.reps} replications (p={config.p}, s={config.s}, lambda={config.lambda_:.4g}, "
        f"population psi={truth.psi:.3f}) with {workers} worker(s)"
    )
    if workers > 1:
        chunksize = max(1, config.reps // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            replications = list(executor.map(task, children[1:], chunksize=chunksize))
    else:
        replications = [task(child) for child in children[1:]]

    rows = [summarise(config, method, replications) for method in methods]
    if config.lambda_ > 0:
        return MetricsTable(
            scenario=config,
            rows=rows,
            population_psi=truth.psi_lambda_undeflated,
            population_psi_deflated=truth.psi_lambda,
        )
    return MetricsTable(scenario=config, rows=rows, population_psi=truth.psi)


def sweep(
    grid: Sequence[SimConfig],
    methods: Sequence[str] | str,
    out: Optional[Path] = None,
    workers: Optional[int] = None,
    provenance: Optional[Dict[str, Any]] = None,
) -> List[MetricsTable]:
    """
    Run every scenario; a failing scenario yields a table with ``error`` set.

    With ``out`` the long-format table is written there, preceded by
    ``provenance`` as ``#`` lines.
    """
    if not grid:
        raise ValueError("The sweep grid is empty")
    methods = parse_methods(methods)

    tables = []
    for i, config in enumerate(grid, start=1):
        logger.info(f"Sweep scenario {i}/{len(grid)}")
        try:
            tables.append(run_monte_carlo(config, methods, workers=workers))
        except MRError as e:
            logger.error(f"Scenario {i} failed ({e.code}): {e}")
            tables.append(MetricsTable(scenario=config, error=f"{e.code}: {e}"))

    if out is not None:
        write_report(long_format_csv(tables, provenance), out)
    return tables


def long_format(tables: Sequence[MetricsTable]) -> pd.DataFrame:
    """One row per (scenario, method, metric) for external plotting."""
    records = []
    for table in tables:
        params = table.scenario.echo()
        for row in table.rows:
            for metric in METRIC_COLUMNS:
                records.append({**params, "method": row.method, "metric": metric, "value": getattr(row, metric)})
    return pd.DataFrame(records)


def long_format_csv(tables: Sequence[MetricsTable], provenance: Optional[Dict[str, Any]] = None) -> str:
    buffer = io.StringIO()
    buffer.write(provenance_header(provenance or {}))
    long_format(tables).to_csv(buffer, index=False, float_format="%.10g")
    return buffer.getvalue()


class DominanceReport(BaseModel):
    n_scenarios: int
    bias_wins: int
    variance_wins: int
    details: List[Dict[str, Any]]


def check_dominance(tables: Sequence[MetricsTable], challenger: str = "mdivw", baseline: str = "divw") -> DominanceReport:
    """Count scenarios where ``challenger`` has smaller |bias| and smaller empirical variance."""
    details = []
    for table in tables:
        try:
            ours, theirs = table.row(challenger), table.row(baseline)
        except KeyError:
            continue
        if ours.error or theirs.error:
            continue
        details.append(
            {
                "scenario": table.scenario.echo(),
                "bias_win": abs(ours.relative_bias_pct) < abs(theirs.relative_bias_pct),
                "variance_win": ours.empirical_se < theirs.empirical_se,
            }
        )
    return DominanceReport(
        n_scenarios=len(details),
        bias_wins=sum(d["bias_win"] for d in details),
        variance_wins=sum(d["variance_win"] for d in details),
        details=details,
    )
