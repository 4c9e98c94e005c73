"""In-memory summary statistics for two-sample MR."""

import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator

from mdivw.config import CONFIG
from mdivw.utils.error_handling import DuplicateSnpError, SummaryDataError

logger = logging.getLogger(__name__)

NUMERIC_FIELDS = ("gamma_hat", "se_gamma", "Gamma_hat", "se_Gamma")
SELECTION_FIELDS = ("gamma_star", "se_gamma_star")
SE_FIELDS = ("se_gamma", "se_Gamma", "se_gamma_star")


class SnpRecord(BaseModel):
    """One instrument: exposure, outcome and optional selection coefficients."""

    model_config = ConfigDict(frozen=True)

    snp_id: str
    gamma_hat: float
    se_gamma: float
    Gamma_hat: float
    se_Gamma: float
    gamma_star: Optional[float] = None
    se_gamma_star: Optional[float] = None

    @model_validator(mode="after")
    def _check_invariants(self) -> "SnpRecord":
        problems = record_problems(self.model_dump())
        if problems:
            raise ValueError(f"SNP {self.snp_id}: {'; '.join(problems)}")
        return self

    @property
    def has_selection(self) -> bool:
        return self.gamma_star is not None


def record_problems(values: Dict[str, Optional[float]]) -> List[str]:
    """Invariant violations of a single record, as readable strings."""
    problems = []
    for field in NUMERIC_FIELDS + SELECTION_FIELDS:
        value = values.get(field)
        if value is None:
            continue
        if not np.isfinite(value):
            problems.append(f"{field} is not finite")
        elif field in SE_FIELDS and value <= 0:
            problems.append(f"{field} must be positive")
    if (values.get("gamma_star") is None) != (values.get("se_gamma_star") is None):
        problems.append("gamma_star and se_gamma_star must be given together")
    return problems


def _frozen(values: Sequence[float]) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


class SummaryDataset:
    """
    Ordered, immutable collection of SNP summary statistics.

    Columns are held as read-only numpy arrays so estimators can work on them
    directly; ``records`` materialises :class:`SnpRecord` views on demand.
    Numeric invariants (finite values, positive SEs) are enforced by the
    loader and reported by ``validate``; the constructor only checks structure.
    """

    def __init__(
        self,
        snp_ids: Sequence[str],
        gamma_hat: Sequence[float],
        se_gamma: Sequence[float],
        Gamma_hat: Sequence[float],
        se_Gamma: Sequence[float],
        gamma_star: Optional[Sequence[float]] = None,
        se_gamma_star: Optional[Sequence[float]] = None,
    ):
        ids = [str(snp) for snp in snp_ids]
        if not ids:
            raise SummaryDataError("A summary dataset needs at least one SNP")
        if len(set(ids)) != len(ids):
            seen, duplicates = set(), []
            for snp in ids:
                if snp in seen:
                    duplicates.append(snp)
                seen.add(snp)
            raise DuplicateSnpError(f"Duplicate snp_id values: {sorted(set(duplicates))[:10]}")
        if (gamma_star is None) != (se_gamma_star is None):
            raise SummaryDataError("gamma_star and se_gamma_star must be given together")

        self._snp_ids = tuple(ids)
        self._gamma_hat = _frozen(gamma_hat)
        self._se_gamma = _frozen(se_gamma)
        self._Gamma_hat = _frozen(Gamma_hat)
        self._se_Gamma = _frozen(se_Gamma)
        self._gamma_star = None if gamma_star is None else _frozen(gamma_star)
        self._se_gamma_star = None if se_gamma_star is None else _frozen(se_gamma_star)

        for name, column in self._columns().items():
            if column.shape != (len(ids),):
                raise SummaryDataError(
                    f"Column {name} has length {column.size}, expected {len(ids)}"
                )

    @classmethod
    def from_records(cls, records: Sequence[SnpRecord]) -> "SummaryDataset":
        records = list(records)
        with_selection = [record.has_selection for record in records]
        has_selection = bool(records) and all(with_selection)
        if any(with_selection) and not has_selection:
            raise SummaryDataError("Selection fields must be present on every record or none")
        return cls(
            snp_ids=[r.snp_id for r in records],
            gamma_hat=[r.gamma_hat for r in records],
            se_gamma=[r.se_gamma for r in records],
            Gamma_hat=[r.Gamma_hat for r in records],
            se_Gamma=[r.se_Gamma for r in records],
            gamma_star=[r.gamma_star for r in records] if has_selection else None,
            se_gamma_star=[r.se_gamma_star for r in records] if has_selection else None,
        )

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "SummaryDataset":
        has_selection = all(field in frame.columns for field in SELECTION_FIELDS)
        return cls(
            snp_ids=frame["snp_id"].astype(str).tolist(),
            gamma_hat=frame["gamma_hat"].to_numpy(dtype=float),
            se_gamma=frame["se_gamma"].to_numpy(dtype=float),
            Gamma_hat=frame["Gamma_hat"].to_numpy(dtype=float),
            se_Gamma=frame["se_Gamma"].to_numpy(dtype=float),
            gamma_star=frame["gamma_star"].to_numpy(dtype=float) if has_selection else None,
            se_gamma_star=frame["se_gamma_star"].to_numpy(dtype=float) if has_selection else None,
        )

    def _columns(self) -> Dict[str, np.ndarray]:
        columns = {
            "gamma_hat": self._gamma_hat,
            "se_gamma": self._se_gamma,
            "Gamma_hat": self._Gamma_hat,
            "se_Gamma": self._se_Gamma,
        }
        if self.has_selection:
            columns["gamma_star"] = self._gamma_star
            columns["se_gamma_star"] = self._se_gamma_star
        return columns

    @property
    def snp_ids(self) -> tuple:
        return self._snp_ids

    @property
    def gamma_hat(self) -> np.ndarray:
        return self._gamma_hat

    @property
    def se_gamma(self) -> np.ndarray:
        return self._se_gamma

    @property
    def Gamma_hat(self) -> np.ndarray:
        return self._Gamma_hat

    @property
    def se_Gamma(self) -> np.ndarray:
        return self._se_Gamma

    @property
    def gamma_star(self) -> Optional[np.ndarray]:
        return self._gamma_star

    @property
    def se_gamma_star(self) -> Optional[np.ndarray]:
        return self._se_gamma_star

    @property
    def has_selection(self) -> bool:
        return self._gamma_star is not None

    @property
    def p(self) -> int:
        return len(self._snp_ids)

    def __len__(self) -> int:
        return self.p

    @property
    def records(self) -> List[SnpRecord]:
        """Record views; not re-validated, so invalid rows still materialise."""
        columns = self._columns()
        return [
            SnpRecord.model_construct(
                snp_id=snp,
                **{name: float(column[i]) for name, column in columns.items()},
            )
            for i, snp in enumerate(self._snp_ids)
        ]

    def subset(self, included: np.ndarray) -> "SummaryDataset":
        """Dataset restricted to the SNPs flagged in a boolean array."""
        included = np.asarray(included, dtype=bool)
        ids = [snp for snp, keep in zip(self._snp_ids, included) if keep]
        return SummaryDataset(
            snp_ids=ids,
            gamma_hat=self._gamma_hat[included],
            se_gamma=self._se_gamma[included],
            Gamma_hat=self._Gamma_hat[included],
            se_Gamma=self._se_Gamma[included],
            gamma_star=None if self._gamma_star is None else self._gamma_star[included],
            se_gamma_star=None if self._se_gamma_star is None else self._se_gamma_star[included],
        )

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({"snp_id": list(self._snp_ids)})
        for name, column in self._columns().items():
            frame[name] = column
        return frame

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SummaryDataset):
            return NotImplemented
        mine, theirs = self._columns(), other._columns()
        return (
            self._snp_ids == other._snp_ids
            and mine.keys() == theirs.keys()
            and all(np.array_equal(mine[k], theirs[k], equal_nan=True) for k in mine)
        )

    def __repr__(self) -> str:
        return f"SummaryDataset(p={self.p}, has_selection={self.has_selection})"


class ValidationIssue(BaseModel):
    snp_id: str
    field: str
    message: str


class ValidationReport(BaseModel):
    violations: List[ValidationIssue] = []
    warnings: List[ValidationIssue] = []

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(dataset: SummaryDataset) -> ValidationReport:
    """
    Report per-record invariant violations and extreme variance ratios.

    The dataset is not modified. A ratio sigma_gamma^2 / sigma_Gamma^2 outside
    ``CONFIG["VARIANCE_RATIO_BOUNDS"]`` strains the bounded-ratio assumption
    and is reported as a warning.
    """
    low, high = CONFIG["VARIANCE_RATIO_BOUNDS"]
    report = ValidationReport()

    for record in dataset.records:
        values = record.model_dump()
        for field in NUMERIC_FIELDS + SELECTION_FIELDS:
            value = values.get(field)
            if value is None:
                continue
            if not np.isfinite(value):
                report.violations.append(
                    ValidationIssue(snp_id=record.snp_id, field=field, message="not finite")
                )
            elif field in SE_FIELDS and value <= 0:
                report.violations.append(
                    ValidationIssue(snp_id=record.snp_id, field=field, message="must be positive")
                )

        if record.se_gamma > 0 and record.se_Gamma > 0:
            ratio = record.se_gamma**2 / record.se_Gamma**2
            if np.isfinite(ratio) and not low <= ratio <= high:
                report.warnings.append(
                    ValidationIssue(
                        snp_id=record.snp_id,
                        field="variance_ratio",
                        message=f"sigma_gamma^2/sigma_Gamma^2 = {ratio:.3g} outside [{low:g}, {high:g}]",
                    )
                )

    if report.violations:
        logger.warning(f"Validation found {len(report.violations)} invariant violations")
    if report.warnings:
        logger.info(f"Validation raised {len(report.warnings)} variance-ratio warnings")
    return report
