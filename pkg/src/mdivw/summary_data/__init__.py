"""Loading, validating and writing GWAS summary statistics."""

from .dataset import SnpRecord, SummaryDataset, ValidationIssue, ValidationReport, validate
from .loader import LoadSummary, load_dataset, read_canonical, write_dataset
from .schema import ColumnSchema

__all__ = [
    "ColumnSchema",
    "LoadSummary",
    "SnpRecord",
    "SummaryDataset",
    "ValidationIssue",
    "ValidationReport",
    "load_dataset",
    "read_canonical",
    "validate",
    "write_dataset",
]
