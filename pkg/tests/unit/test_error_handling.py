import logging
import sys
from unittest.mock import MagicMock, patch

import pytest

from mdivw.utils.error_handling import (
    EmptySelectionError,
    EstimationError,
    MRError,
    ParseError,
    SummaryDataError,
    VarianceDegeneracyError,
    WeakInstrumentError,
    error_record,
    handle_estimation_errors,
    setup_error_handling,
)


class TestErrorHandling:
    """Test error handling functionality."""

    def test_estimation_error_becomes_record(self):
        """Test that estimation failures are returned as error records."""

        @handle_estimation_errors
        def estimate(method):
            raise WeakInstrumentError(-0.5, 0.2)

        with patch("mdivw.utils.error_handling.logger") as mock_logger:
            result = estimate("divw")

            assert result["method"] == "divw"
            assert result["code"] == "weak_instrument"
            assert "theta2=-0.5" in result["error"]
            mock_logger.warning.assert_called()

    def test_selection_error_becomes_record(self):
        """Test that an empty selection is also reported, not raised."""

        @handle_estimation_errors
        def estimate(method):
            raise EmptySelectionError("nothing selected")

        assert estimate("mdivw") == {"method": "mdivw", "error": "nothing selected", "code": "empty_selection"}

    def test_other_errors_still_raised(self):
        """Test that unexpected errors propagate after logging."""

        @handle_estimation_errors
        def estimate(method):
            raise RuntimeError("disk on fire")

        with patch("mdivw.utils.error_handling.logger") as mock_logger:
            with pytest.raises(RuntimeError, match="disk on fire"):
                estimate("ivw")
            mock_logger.error.assert_called()

    def test_data_errors_still_raised(self):
        """Test that input problems are not swallowed as estimation failures."""

        @handle_estimation_errors
        def estimate(method):
            raise SummaryDataError("bad file")

        with pytest.raises(SummaryDataError):
            estimate("ivw")

    def test_successful_call_passes_through(self):
        """Test that return values are untouched."""

        @handle_estimation_errors
        def estimate(method, value):
            return value * 2

        assert estimate("ivw", 21) == 42

    def test_setup_error_handling(self):
        """Test that error handling setup works correctly."""
        with patch("mdivw.utils.error_handling.logging.getLogger") as mock_get_logger:
            mock_logger = MagicMock()
            mock_get_logger.return_value = mock_logger

            setup_error_handling("DEBUG")

            mock_get_logger.assert_called()
            mock_logger.setLevel.assert_called_with(logging.WARNING)

    def test_excepthook_passes_keyboard_interrupt(self):
        """Test that KeyboardInterrupt goes to the default hook."""
        original = sys.excepthook
        try:
            setup_error_handling()
            with patch("sys.__excepthook__") as default_hook:
                sys.excepthook(KeyboardInterrupt, KeyboardInterrupt(), None)
                default_hook.assert_called_once()
            with patch("mdivw.utils.error_handling.logger") as mock_logger:
                sys.excepthook(ValueError, ValueError("boom"), None)
                mock_logger.error.assert_called_once()
        finally:
            sys.excepthook = original


class TestErrorTypes:
    """Test the error hierarchy and its codes."""

    def test_hierarchy(self):
        """Test that every error is an MRError with a code."""
        assert issubclass(WeakInstrumentError, EstimationError)
        assert issubclass(EstimationError, MRError)
        assert VarianceDegeneracyError(-1.0, 2.0).code == "variance_degeneracy"

    def test_parse_error_location(self):
        """Test that a parse error names its row and column."""
        error = ParseError("not a number", row="rs7", column="se")
        assert error.row == "rs7"
        assert str(error) == "not a number (row rs7, column se)"

    def test_error_record(self):
        """Test flattening an error for reports."""
        record = error_record("egger", EmptySelectionError("none"))
        assert record == {"method": "egger", "error": "none", "code": "empty_selection"}
