"""Reading and writing summary statistics files."""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel

from mdivw.summary_data.dataset import SELECTION_FIELDS, SummaryDataset
from mdivw.summary_data.schema import ColumnSchema
from mdivw.utils.error_handling import (
    DuplicateSnpError,
    EmptyJoinError,
    ParseError,
    SchemaError,
)

logger = logging.getLogger(__name__)

CANONICAL_COLUMNS = ["snp_id", "gamma_hat", "se_gamma", "Gamma_hat", "se_Gamma"]


class DroppedSnp(BaseModel):
    snp_id: str
    source: str
    reason: str


class LoadSummary(BaseModel):
    """What happened while joining the input files."""

    rows: Dict[str, int] = {}
    joined: int = 0
    dropped: List[DroppedSnp] = []

    @property
    def n_dropped(self) -> int:
        return len(self.dropped)

    def to_json(self) -> str:
        payload = self.model_dump()
        payload["n_dropped"] = self.n_dropped
        return json.dumps(payload, indent=2)


def detect_delimiter(path: Path) -> str:
    """Tab or comma, decided from the header line."""
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline()
    if "\t" in header:
        return "\t"
    if "," in header:
        return ","
    raise SchemaError(f"Cannot detect a tab or comma delimiter in header of {path}")


def _read_table(path: Path) -> pd.DataFrame:
    if not path.exists():
        raise FileNotFoundError(f"Summary statistics file not found: {path}")
    return pd.read_csv(
        path,
        sep=detect_delimiter(path),
        dtype=str,
        keep_default_na=False,
        skipinitialspace=True,
    )


def _parse_numeric(frame: pd.DataFrame, ids: pd.Series, column: str, positive: bool) -> np.ndarray:
    raw = frame[column].str.strip()
    values = pd.to_numeric(raw, errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if positive:
        bad |= ~(values > 0)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        reason = "non-positive value" if np.isfinite(values[i]) else "non-numeric value"
        raise ParseError(f"{reason} '{raw.iloc[i]}'", row=ids.iloc[i], column=column)
    return values


def read_summary_file(path: Path, schema: ColumnSchema, label: str) -> pd.DataFrame:
    """
    Read one GWAS export into a frame with columns snp_id, beta, se.

    Raises:
        SchemaError: a mapped column is missing.
        ParseError: a beta/se cell is non-numeric or an se is not positive.
        DuplicateSnpError: an snp_id appears twice in the file.
    """
    path = Path(path)
    frame = _read_table(path)
    frame.columns = [str(c).strip() for c in frame.columns]

    missing = [col for col in schema.columns().values() if col not in frame.columns]
    if missing:
        raise SchemaError(f"{label} file {path} lacks mapped columns {missing}")

    ids = frame[schema.snp_id].str.strip()
    duplicated = ids[ids.duplicated()]
    if not duplicated.empty:
        raise DuplicateSnpError(
            f"{label} file {path} repeats snp_id values: {sorted(set(duplicated))[:10]}"
        )

    parsed = pd.DataFrame(
        {
            "snp_id": ids.to_numpy(),
            "beta": _parse_numeric(frame, ids, schema.beta, positive=False),
            "se": _parse_numeric(frame, ids, schema.se, positive=True),
        }
    )
    logger.debug(f"Read {len(parsed)} rows from {label} file {path}")
    return parsed


def _drop(summary: LoadSummary, snps, source: str, reason: str) -> None:
    for snp in snps:
        summary.dropped.append(DroppedSnp(snp_id=snp, source=source, reason=reason))


def load_dataset(
    exposure_path: Path,
    outcome_path: Path,
    selection_path: Optional[Path] = None,
    schema: Optional[ColumnSchema] = None,
    outcome_schema: Optional[ColumnSchema] = None,
    selection_schema: Optional[ColumnSchema] = None,
) -> tuple[SummaryDataset, LoadSummary]:
    """
    Join exposure, outcome and optional selection files on snp_id.

    Only SNPs present in every file are kept, in exposure-file order. Every
    other SNP is listed in the returned :class:`LoadSummary` with the reason it
    was dropped. Alleles are assumed to be harmonised already.
    """
    schema = schema or ColumnSchema()
    exposure = read_summary_file(exposure_path, schema, "exposure")
    outcome = read_summary_file(outcome_path, outcome_schema or schema, "outcome")
    selection = (
        read_summary_file(selection_path, selection_schema or schema, "selection")
        if selection_path is not None
        else None
    )

    summary = LoadSummary(rows={"exposure": len(exposure), "outcome": len(outcome)})
    exposure_ids = set(exposure["snp_id"])
    keep = set(exposure_ids)
    outcome_ids = set(outcome["snp_id"])
    _drop(summary, [s for s in exposure["snp_id"] if s not in outcome_ids], "exposure", "missing_in_outcome")
    _drop(summary, [s for s in outcome["snp_id"] if s not in exposure_ids], "outcome", "missing_in_exposure")
    keep &= outcome_ids

    if selection is not None:
        summary.rows["selection"] = len(selection)
        selection_ids = set(selection["snp_id"])
        _drop(
            summary,
            [s for s in exposure["snp_id"] if s in keep and s not in selection_ids],
            "exposure",
            "missing_in_selection",
        )
        _drop(
            summary,
            [s for s in selection["snp_id"] if s not in exposure_ids],
            "selection",
            "missing_in_exposure",
        )
        keep &= selection_ids

    if not keep:
        raise EmptyJoinError("No SNP is present in all input files")

    joined = exposure[exposure["snp_id"].isin(keep)].reset_index(drop=True)
    outcome_by_id = outcome.set_index("snp_id").loc[joined["snp_id"]]
    columns = {
        "snp_ids": joined["snp_id"].tolist(),
        "gamma_hat": joined["beta"].to_numpy(),
        "se_gamma": joined["se"].to_numpy(),
        "Gamma_hat": outcome_by_id["beta"].to_numpy(),
        "se_Gamma": outcome_by_id["se"].to_numpy(),
    }
    if selection is not None:
        selection_by_id = selection.set_index("snp_id").loc[joined["snp_id"]]
        columns["gamma_star"] = selection_by_id["beta"].to_numpy()
        columns["se_gamma_star"] = selection_by_id["se"].to_numpy()

    dataset = SummaryDataset(**columns)
    summary.joined = dataset.p
    logger.info(f"Loaded {dataset.p} joined SNPs, dropped {summary.n_dropped}")
    return dataset, summary


def write_dataset(dataset: SummaryDataset, path: Path, delimiter: str = "\t") -> Path:
    """Write the canonical file; floats are written with round-trip precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    dataset.to_frame().to_csv(path, sep=delimiter, index=False, float_format="%.17g")
    logger.debug(f"Wrote {dataset.p} SNPs to {path}")
    return path


def read_canonical(path: Path) -> SummaryDataset:
    """Read a file produced by :func:`write_dataset`."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Summary statistics file not found: {path}")
    frame = pd.read_csv(
        path,
        sep=detect_delimiter(path),
        dtype={"snp_id": str},
        float_precision="round_trip",
    )
    required = CANONICAL_COLUMNS + [c for c in SELECTION_FIELDS if c in frame.columns]
    missing = [c for c in CANONICAL_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaError(f"Canonical file {path} lacks columns {missing}")
    return SummaryDataset.from_frame(frame[required])
