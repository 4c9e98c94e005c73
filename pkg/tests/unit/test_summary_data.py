import json
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from mdivw.summary_data import (
    ColumnSchema,
    SnpRecord,
    SummaryDataset,
    load_dataset,
    read_canonical,
    validate,
    write_dataset,
)
from mdivw.summary_data.loader import detect_delimiter
from mdivw.utils.error_handling import (
    DuplicateSnpError,
    EmptyJoinError,
    ParseError,
    SchemaError,
    SummaryDataError,
)


def _write(path, rows, header=("SNP", "beta", "se"), sep="\t"):
    lines = [sep.join(header)] + [sep.join(str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.mark.unit
class TestSnpRecord:
    """Test cases for SnpRecord."""

    def test_valid_record(self):
        """Test a record with positive SEs and no selection fields."""
        record = SnpRecord(snp_id="rs1", gamma_hat=0.1, se_gamma=0.01, Gamma_hat=0.05, se_Gamma=0.02)
        assert record.has_selection is False

    def test_rejects_non_positive_se(self):
        """Test that a zero standard error is rejected."""
        with pytest.raises(ValidationError, match="se_Gamma must be positive"):
            SnpRecord(snp_id="rs1", gamma_hat=0.1, se_gamma=0.01, Gamma_hat=0.05, se_Gamma=0.0)

    def test_rejects_non_finite_value(self):
        """Test that NaN coefficients are rejected."""
        with pytest.raises(ValidationError, match="gamma_hat is not finite"):
            SnpRecord(snp_id="rs1", gamma_hat=float("nan"), se_gamma=0.01, Gamma_hat=0.05, se_Gamma=0.02)

    def test_selection_fields_together(self):
        """Test that gamma_star without its SE is rejected."""
        with pytest.raises(ValidationError, match="given together"):
            SnpRecord(
                snp_id="rs1", gamma_hat=0.1, se_gamma=0.01, Gamma_hat=0.05, se_Gamma=0.02, gamma_star=0.2
            )


@pytest.mark.unit
class TestSummaryDataset:
    """Test cases for SummaryDataset."""

    def test_columns_are_read_only(self, three_snp_dataset):
        """Test that column arrays cannot be modified in place."""
        with pytest.raises(ValueError):
            three_snp_dataset.gamma_hat[0] = 1.0

    def test_duplicate_ids_rejected(self):
        """Test that repeated snp_id values raise DuplicateSnpError."""
        with pytest.raises(DuplicateSnpError, match="rs1"):
            SummaryDataset(["rs1", "rs1"], [0.1, 0.2], [0.01, 0.01], [0.1, 0.2], [0.1, 0.1])

    def test_empty_dataset_rejected(self):
        """Test that a dataset needs at least one SNP."""
        with pytest.raises(SummaryDataError):
            SummaryDataset([], [], [], [], [])

    def test_length_mismatch_rejected(self):
        """Test that columns must all have one entry per SNP."""
        with pytest.raises(SummaryDataError, match="length"):
            SummaryDataset(["rs1", "rs2"], [0.1], [0.01, 0.01], [0.1, 0.2], [0.1, 0.1])

    def test_records_round_trip(self, three_snp_dataset):
        """Test that records rebuild an equal dataset."""
        rebuilt = SummaryDataset.from_records(three_snp_dataset.records)
        assert rebuilt == three_snp_dataset

    def test_subset_keeps_order(self, three_snp_dataset):
        """Test that subset keeps flagged SNPs in order."""
        sub = three_snp_dataset.subset(np.array([True, False, True]))
        assert sub.snp_ids == ("rs1", "rs3")
        assert sub.gamma_hat.tolist() == [0.2, 0.3]

    def test_frame_round_trip(self, make_dataset):
        """Test conversion to and from a pandas frame."""
        dataset = make_dataset([0.1, 0.2], [0.01, 0.02], [0.3, 0.4], [0.05, 0.06], [0.1, 0.3], [0.02, 0.02])
        frame = dataset.to_frame()
        assert list(frame.columns) == [
            "snp_id", "gamma_hat", "se_gamma", "Gamma_hat", "se_Gamma", "gamma_star", "se_gamma_star",
        ]
        assert SummaryDataset.from_frame(frame) == dataset


@pytest.mark.unit
class TestValidate:
    """Test cases for validate."""

    def test_clean_dataset(self, three_snp_dataset):
        """Test that valid data produces no violations."""
        report = validate(three_snp_dataset)
        assert report.ok
        assert report.warnings == []

    def test_reports_violations_without_modifying(self, make_dataset):
        """Test that invalid rows are reported and the dataset is untouched."""
        dataset = make_dataset([0.1, float("inf")], [0.01, 0.01], [0.1, 0.2], [0.1, -0.1])
        report = validate(dataset)
        assert not report.ok
        fields = {(v.snp_id, v.field) for v in report.violations}
        assert fields == {("rs2", "gamma_hat"), ("rs2", "se_Gamma")}
        assert np.isinf(dataset.gamma_hat[1])

    def test_extreme_variance_ratio_warns(self, make_dataset):
        """Test that a variance ratio outside the bounds is a warning only."""
        dataset = make_dataset([0.1], [10.0], [0.1], [1e-3])
        report = validate(dataset)
        assert report.ok
        assert [w.field for w in report.warnings] == ["variance_ratio"]


@pytest.mark.unit
class TestColumnSchema:
    """Test cases for ColumnSchema."""

    def test_default_columns(self):
        """Test the default SNP/beta/se mapping."""
        assert ColumnSchema.from_mapping(None).columns() == {"snp_id": "SNP", "beta": "beta", "se": "se"}

    def test_from_cli_string(self):
        """Test parsing the key=column form."""
        schema = ColumnSchema.from_mapping("snp_id=rsid, beta=b")
        assert schema.snp_id == "rsid"
        assert schema.beta == "b"
        assert schema.se == "se"

    def test_unknown_key(self):
        """Test that unknown roles raise SchemaError."""
        with pytest.raises(SchemaError, match="pval"):
            ColumnSchema.from_mapping({"pval": "p"})

    def test_malformed_entry(self):
        """Test that an entry without '=' raises SchemaError."""
        with pytest.raises(SchemaError):
            ColumnSchema.from_mapping("snp_id")


@pytest.mark.unit
class TestLoadDataset:
    """Test cases for load_dataset."""

    def test_join_keeps_exposure_order_and_reports_drops(self, tmp_path):
        """Test the inner join, its order and the dropped-SNP list."""
        exposure = _write(tmp_path / "exp.tsv", [("rs3", 0.3, 0.01), ("rs1", 0.1, 0.01), ("rs2", 0.2, 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.05, 0.02), ("rs3", 0.15, 0.02), ("rs9", 0.1, 0.02)])

        dataset, summary = load_dataset(exposure, outcome)

        assert dataset.snp_ids == ("rs3", "rs1")
        assert dataset.Gamma_hat.tolist() == [0.15, 0.05]
        assert dataset.has_selection is False
        assert summary.rows == {"exposure": 3, "outcome": 3}
        assert summary.joined == 2
        reasons = {(d.snp_id, d.reason) for d in summary.dropped}
        assert reasons == {("rs2", "missing_in_outcome"), ("rs9", "missing_in_exposure")}
        assert json.loads(summary.to_json())["n_dropped"] == 2

    def test_single_snp_maps_to_record(self, tmp_path):
        """Test that one matched comma-separated row becomes one SnpRecord."""
        exposure = _write(tmp_path / "exp.csv", [("rs1", 0.02, 0.005)], sep=",")
        outcome = _write(tmp_path / "out.csv", [("rs1", 0.01, 0.004)], sep=",")

        dataset, summary = load_dataset(exposure, outcome)

        assert isinstance(dataset, SummaryDataset)
        assert summary.joined == 1
        record = dataset.records[0]
        assert record.snp_id == "rs1"
        assert (record.gamma_hat, record.se_gamma) == (0.02, 0.005)
        assert (record.Gamma_hat, record.se_Gamma) == (0.01, 0.004)

    def test_selection_file_and_schema(self, tmp_path):
        """Test a comma-separated selection file with a custom schema."""
        header = ("rsid", "b", "se_b")
        exposure = _write(tmp_path / "exp.csv", [("rs1", 0.1, 0.01), ("rs2", 0.2, 0.01)], header, sep=",")
        outcome = _write(tmp_path / "out.csv", [("rs1", 0.05, 0.02), ("rs2", 0.1, 0.02)], header, sep=",")
        selection = _write(tmp_path / "sel.csv", [("rs2", 0.25, 0.015)], header, sep=",")
        schema = ColumnSchema.from_mapping("snp_id=rsid,beta=b,se=se_b")

        dataset, summary = load_dataset(exposure, outcome, selection, schema=schema)

        assert dataset.snp_ids == ("rs2",)
        assert dataset.gamma_star.tolist() == [0.25]
        assert dataset.se_gamma_star.tolist() == [0.015]
        assert [(d.snp_id, d.reason) for d in summary.dropped] == [("rs1", "missing_in_selection")]

    def test_empty_join(self, tmp_path):
        """Test that disjoint files raise EmptyJoinError."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", 0.1, 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs2", 0.1, 0.01)])
        with pytest.raises(EmptyJoinError):
            load_dataset(exposure, outcome)

    def test_non_numeric_cell(self, tmp_path):
        """Test that a non-numeric beta reports its row and column."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", "abc", 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.1, 0.01)])
        with pytest.raises(ParseError) as excinfo:
            load_dataset(exposure, outcome)
        assert excinfo.value.row == "rs1"
        assert excinfo.value.column == "beta"

    def test_zero_se(self, tmp_path):
        """Test that a zero SE is a parse error."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", 0.1, 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.1, 0)])
        with pytest.raises(ParseError, match="non-positive"):
            load_dataset(exposure, outcome)

    def test_missing_column(self, tmp_path):
        """Test that a missing mapped column is a schema error."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", 0.1)], header=("SNP", "beta"))
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.1, 0.01)])
        with pytest.raises(SchemaError, match="se"):
            load_dataset(exposure, outcome)

    def test_duplicate_snp_in_file(self, tmp_path):
        """Test that a repeated snp_id inside one file is rejected."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", 0.1, 0.01), ("rs1", 0.2, 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.1, 0.01)])
        with pytest.raises(DuplicateSnpError):
            load_dataset(exposure, outcome)

    def test_logs_load_summary(self, tmp_path):
        """Test that the join result is logged."""
        exposure = _write(tmp_path / "exp.tsv", [("rs1", 0.1, 0.01)])
        outcome = _write(tmp_path / "out.tsv", [("rs1", 0.1, 0.01)])
        with patch("mdivw.summary_data.loader.logger") as mock_logger:
            load_dataset(exposure, outcome)
            mock_logger.info.assert_called()

    def test_undetectable_delimiter(self, tmp_path):
        """Test that a header without tab or comma is rejected."""
        path = tmp_path / "bad.txt"
        path.write_text("SNP beta se\n")
        with pytest.raises(SchemaError):
            detect_delimiter(path)


@pytest.mark.unit
class TestCanonicalFiles:
    """Test cases for write_dataset and read_canonical."""

    def test_round_trip_is_bit_exact(self, tmp_path, simulated_dataset):
        """Test that the canonical writer preserves every float bit."""
        path = write_dataset(simulated_dataset, tmp_path / "canonical.tsv")
        assert read_canonical(path) == simulated_dataset

    def test_round_trip_without_selection(self, tmp_path, three_snp_dataset):
        """Test the canonical file without selection columns."""
        path = write_dataset(three_snp_dataset, tmp_path / "canonical.csv", delimiter=",")
        frame = pd.read_csv(path)
        assert "gamma_star" not in frame.columns
        assert read_canonical(path) == three_snp_dataset

    def test_missing_canonical_column(self, tmp_path):
        """Test that a non-canonical file is rejected."""
        path = _write(tmp_path / "x.tsv", [("rs1", 0.1, 0.01)])
        with pytest.raises(SchemaError):
            read_canonical(path)
