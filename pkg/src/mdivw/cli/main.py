#!/usr/bin/env python3
"""Command-line front end for mdivw."""

import io
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
import pandas as pd

from mdivw.cli.configuration_manager import ConfigurationManager, RunConfig
from mdivw.config import CONFIG
from mdivw.diagnostics.residuals import standardized_residuals
from mdivw.estimators.ratio import tau_squared
from mdivw.estimators.registry import ESTIMATORS, run_estimator
from mdivw.estimators.selection import select_ivs
from mdivw.estimators.types import Estimate
from mdivw.simulation.grids import PRESETS, resolve_grid
from mdivw.simulation.monte_carlo import check_dominance, long_format_csv, run_monte_carlo, sweep as run_sweep
from mdivw.simulation.scenario import SimConfig
from mdivw.summary_data.dataset import SummaryDataset
from mdivw.summary_data.loader import LoadSummary, load_dataset
from mdivw.utils.error_handling import (
    ConfigFileError,
    MissingSelectionDataError,
    MRError,
    handle_estimation_errors,
    setup_error_handling,
)
from mdivw.utils.utils import provenance_header, write_report

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [
    "tag",
    "method",
    "lambda",
    "psi_hat",
    "beta",
    "se",
    "ci_lower",
    "ci_upper",
    "p_value",
    "tau2",
    "p_used",
    "variance_fallback",
    "error",
    "code",
]


def input_options(func):
    """Options shared by commands that read summary statistics."""
    options = [
        click.option("--exposure", "-e", type=click.Path(exists=True, dir_okay=False), help="Exposure GWAS file"),
        click.option("--outcome", "-o", type=click.Path(exists=True, dir_okay=False), help="Outcome GWAS file"),
        click.option(
            "--selection", type=click.Path(exists=True, dir_okay=False), help="Independent selection GWAS file"
        ),
        click.option("--schema", help="Column mapping, e.g. snp_id=rsid,beta=b,se=se_b"),
        click.option("--lambda", "lambda_", help="Selection threshold (number or 'auto')"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def output_options(func):
    options = [
        click.option("--out", type=click.Path(dir_okay=False), help="Output file (stdout if omitted)"),
        click.option("--format", "format_", type=click.Choice(["csv", "json"]), help="Output format"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _resolve(ctx: click.Context, command: str, flags: Dict[str, Any]) -> RunConfig:
    flags = dict(flags)
    if "format_" in flags:
        flags["format"] = flags.pop("format_")
    try:
        return ctx.obj["config_manager"].resolve(command, flags)
    except (MRError, ValueError) as e:
        click.echo(f"Error: invalid configuration: {e}", err=True)
        ctx.exit(2)


def _load(config: RunConfig) -> tuple[SummaryDataset, LoadSummary]:
    if config.exposure is None or config.outcome is None:
        raise click.UsageError("--exposure and --outcome are required")
    return load_dataset(config.exposure, config.outcome, config.selection, schema=config.schema_)


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        click.echo(text, nl=False)
        return
    write_report(text, out)


def _render_rows(rows: Sequence[Dict[str, Any]], provenance: Dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({**provenance, "results": list(rows)}, indent=2, default=str) + "\n"
    buffer = io.StringIO()
    buffer.write(provenance_header(provenance))
    pd.DataFrame(list(rows), columns=RESULT_COLUMNS).to_csv(buffer, index=False, float_format="%.10g")
    return buffer.getvalue()


@handle_estimation_errors
def _estimate_at(method: str, dataset: SummaryDataset, threshold: float, config: RunConfig) -> Estimate:
    mask = select_ivs(dataset, threshold)
    return run_estimator(method, dataset, mask, bootstrap_reps=config.bootstrap_reps, seed=config.seed)


def analysis_thresholds(dataset: SummaryDataset, config: RunConfig) -> List[float]:
    """λ = 0 always; the requested λ as well when selection data is present."""
    if config.lambda_ == "auto" or float(config.lambda_) > 0:
        if not dataset.has_selection:
            raise MissingSelectionDataError(
                f"lambda={config.lambda_} needs a --selection file with independent selection statistics"
            )
    requested = config.resolve_lambda(dataset.p)
    return [0.0] if requested == 0 else [0.0, requested]


def analyze_dataset(dataset: SummaryDataset, config: RunConfig) -> List[Dict[str, Any]]:
    """One row per (threshold, method); failures become rows with an error code."""
    tags = ["mdivw_tau" if config.pleiotropy and tag == "mdivw" else tag for tag in config.methods]
    rows = []
    for threshold in analysis_thresholds(dataset, config):
        for tag in dict.fromkeys(tags):
            outcome = _estimate_at(tag, dataset, threshold, config)
            if isinstance(outcome, dict):
                rows.append({"tag": tag, "lambda": threshold, **outcome})
            else:
                rows.append({"tag": tag, **outcome.to_dict()})
    return rows


@click.group()
@click.option("--config", "-c", type=click.Path(exists=True), help="YAML configuration file")
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
@click.pass_context
def cli(ctx, config, verbose):
    """Modified debiased IVW estimation for two-sample summary-data MR."""
    setup_error_handling(CONFIG["LOG_LEVEL"])
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    config_manager = ConfigurationManager()
    if config:
        try:
            config_manager.load_yaml_config(config)
        except ConfigFileError as e:
            click.echo(f"Error: {e.code}: {e}", err=True)
            ctx.exit(2)
    ctx.obj = {"config_manager": config_manager}


@cli.command()
@input_options
@output_options
@click.option("--methods", "-m", help=f"Comma-separated methods: {','.join(ESTIMATORS)}")
@click.option("--pleiotropy/--no-pleiotropy", default=None, help="Use the pleiotropy-adjusted mdIVW")
@click.option("--seed", type=int, help="Seed for bootstrap standard errors")
@click.option("--bootstrap-reps", type=int, help="Bootstrap resamples for the weighted median")
@click.pass_context
def analyze(ctx, exposure, outcome, selection, schema, lambda_, out, format_, methods, pleiotropy, seed, bootstrap_reps):
    """Estimate the causal effect from summary statistics."""
    flags = dict(exposure=exposure, outcome=outcome, selection=selection, schema=schema, lambda_=lambda_, out=out,
                 format_=format_, methods=methods, pleiotropy=pleiotropy, seed=seed, bootstrap_reps=bootstrap_reps)
    config = _resolve(ctx, "analyze", flags)
    try:
        dataset, summary = _load(config)
        rows = analyze_dataset(dataset, config)
    except MRError as e:
        click.echo(f"Error ({e.code}): {e}", err=True)
        logger.error(f"Analysis failed: {e}")
        ctx.exit(1)

    provenance = {
        "config": config.echo(),
        "load_summary": {"rows": summary.rows, "joined": summary.joined, "dropped": summary.n_dropped},
    }
    _emit(_render_rows(rows, provenance, config.format), config.out)

    produced = sum("error" not in row for row in rows)
    logger.info(f"{produced}/{len(rows)} estimates produced")
    ctx.exit(0 if produced else 1)


@cli.command()
@output_options
@click.option("--methods", "-m", help=f"Comma-separated methods: {','.join(ESTIMATORS)}")
@click.option("--lambda", "lambda_", help="Selection threshold (number or 'auto')")
@click.option("--reps", "-r", type=int, help="Monte Carlo replications")
@click.option("--seed", type=int, help="Master seed")
@click.option("--workers", "-w", type=int, help="Worker processes")
@click.option("--bootstrap-reps", type=int, help="Bootstrap resamples for the weighted median")
@click.option("--p", "p", type=int, help="Number of SNPs")
@click.option("--s", "s", type=int, help="Number of SNPs with nonzero effect")
@click.option("--sigma2", type=float, help="Variance of the true SNP-exposure effects")
@click.option("--beta0", type=float, help="True causal effect")
@click.option("--tau0", type=float, help="Pleiotropy standard deviation")
@click.option("--n-x", "n_x", type=int, help="Exposure GWAS sample size")
@click.option("--n-y", "n_y", type=int, help="Outcome GWAS sample size")
@click.option("--selection-fraction", type=float, help="Selection GWAS size as a fraction of n_x")
@click.pass_context
def simulate(
    ctx, out, format_, methods, lambda_, reps, seed, workers, bootstrap_reps,
    p, s, sigma2, beta0, tau0, n_x, n_y, selection_fraction,
):
    """Run a Monte Carlo scenario and report bias, SE, MSE and coverage."""
    scenario = {
        k: v
        for k, v in dict(
            p=p, s=s, sigma2=sigma2, beta0=beta0, tau0=tau0, n_x=n_x, n_y=n_y, selection_fraction=selection_fraction
        ).items()
        if v is not None
    }
    flags = dict(out=out, format_=format_, methods=methods, lambda_=lambda_, reps=reps, seed=seed,
                 workers=workers, bootstrap_reps=bootstrap_reps, scenario=scenario)
    config = _resolve(ctx, "simulate", flags)
    try:
        sim_config = scenario_config(config)
        table = run_monte_carlo(sim_config, config.methods, workers=config.workers)
    except MRError as e:
        click.echo(f"Error ({e.code}): {e}", err=True)
        ctx.exit(1)

    text = table.to_json(config.out) if config.format == "json" else table.to_csv(config.out)
    if config.out is None:
        click.echo(text, nl=False)
    ctx.exit(0 if any(row.error is None for row in table.rows) else 1)


def scenario_config(config: RunConfig) -> SimConfig:
    """SimConfig from the run's scenario section, reps, seed and threshold."""
    values = {
        **config.scenario,
        "reps": config.reps,
        "seed": config.seed,
        "bootstrap_reps": config.bootstrap_reps,
    }
    base = SimConfig(**{k: v for k, v in values.items() if k != "lambda"})
    values["lambda"] = config.resolve_lambda(base.p)
    return SimConfig(**values)


@cli.command()
@click.option("--grid", "-g", help=f"Preset ({', '.join(PRESETS)}) or YAML grid file")
@click.option("--methods", "-m", help=f"Comma-separated methods: {','.join(ESTIMATORS)}")
@click.option("--reps", "-r", type=int, help="Monte Carlo replications per scenario")
@click.option("--seed", type=int, help="Master seed")
@click.option("--workers", "-w", type=int, help="Worker processes")
@click.option("--bootstrap-reps", type=int, help="Bootstrap resamples for the weighted median")
@click.option("--out", type=click.Path(dir_okay=False), help="Long-format CSV output")
@click.pass_context
def sweep(ctx, grid, methods, reps, seed, workers, bootstrap_reps, out):
    """Run a grid of scenarios and write long-format results."""
    flags = dict(grid=grid, methods=methods, reps=reps, seed=seed, workers=workers,
                 bootstrap_reps=bootstrap_reps, out=out)
    config = _resolve(ctx, "sweep", flags)
    if not config.grid:
        raise click.UsageError("--grid is required")
    try:
        scenarios = resolve_grid(
            config.grid,
            **{**config.scenario, "reps": config.reps, "seed": config.seed, "bootstrap_reps": config.bootstrap_reps},
        )
    except (MRError, OSError) as e:
        click.echo(f"Error: {e}", err=True)
        ctx.exit(1)

    provenance = {"config": config.echo()}
    tables = run_sweep(scenarios, config.methods, out=config.out, workers=config.workers, provenance=provenance)
    if config.out is None:
        click.echo(long_format_csv(tables, provenance), nl=False)

    if {"mdivw", "divw"} <= set(config.methods):
        report = check_dominance(tables)
        click.echo(
            f"mdIVW vs dIVW over {report.n_scenarios} scenario(s): smaller |bias| in {report.bias_wins}, "
            f"smaller empirical SE in {report.variance_wins}",
            err=True,
        )
    ctx.exit(0 if any(row.error is None for t in tables for row in t.rows) else 1)


@cli.command()
@input_options
@click.option("--method", default=None, help="Method supplying beta (default mdivw)")
@click.option("--beta", type=float, help="Explicit beta; overrides --method")
@click.option("--tau-in-residuals/--no-tau-in-residuals", default=None, help="Add tau^2 to the denominator")
@click.option("--out", type=click.Path(dir_okay=False), help="Residual CSV (stdout if omitted)")
@click.pass_context
def diagnose(ctx, exposure, outcome, selection, schema, lambda_, method, beta, tau_in_residuals, out):
    """Standardized residuals and Q-Q coordinates."""
    flags = dict(exposure=exposure, outcome=outcome, selection=selection, schema=schema, lambda_=lambda_,
                 methods=[method] if method else None, beta=beta, tau_in_residuals=tau_in_residuals, out=out)
    flags["methods"] = flags["methods"] or ["mdivw"]
    config = _resolve(ctx, "diagnose", flags)
    try:
        dataset, _ = _load(config)
        threshold = config.resolve_lambda(dataset.p)
        mask = select_ivs(dataset, threshold)
        if config.beta is not None:
            beta_hat = config.beta
        else:
            beta_hat = run_estimator(
                config.methods[0], dataset, mask, bootstrap_reps=config.bootstrap_reps, seed=config.seed
            ).beta
        tau2 = max(0.0, tau_squared(dataset, mask, beta_hat)) if config.tau_in_residuals else 0.0
        residuals = standardized_residuals(dataset, mask, beta_hat, tau2=tau2)
    except MRError as e:
        click.echo(f"Error ({e.code}): {e}", err=True)
        ctx.exit(1)

    text = residuals.to_csv(
        config.out, provenance={"config": config.echo(), "lambda": threshold, "beta": beta_hat, "tau2": tau2}
    )
    if config.out is None:
        click.echo(text, nl=False)

    summary = residuals.summary()
    click.echo(f"residuals: p={summary.p} mean={summary.mean:.4f} variance={summary.variance:.4f}", err=True)
    ctx.exit(0)


if __name__ == "__main__":
    cli()
