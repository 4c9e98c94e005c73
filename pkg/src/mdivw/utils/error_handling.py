import functools
import logging
import sys
import traceback
from typing import Any, Callable, Dict, Optional

logger = logging.getLogger(__name__)


class MRError(Exception):
    """Base class for all errors raised by mdivw."""

    code = "mr_error"


# Summary data


class SummaryDataError(MRError):
    code = "summary_data_error"


class SchemaError(SummaryDataError):
    code = "schema_error"


class ParseError(SummaryDataError):
    """A cell could not be parsed or violates a record invariant."""

    code = "parse_error"

    def __init__(self, message: str, row: Optional[str] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        location = ", ".join(
            part for part in (f"row {row}" if row else "", f"column {column}" if column else "") if part
        )
        super().__init__(f"{message} ({location})" if location else message)


class EmptyJoinError(SummaryDataError):
    code = "empty_join"


class DuplicateSnpError(SummaryDataError):
    code = "duplicate_snp"


# IV selection


class SelectionError(MRError):
    code = "selection_error"


class EmptySelectionError(SelectionError):
    code = "empty_selection"


class MissingSelectionDataError(SelectionError):
    code = "missing_selection_data"


# Estimation


class EstimationError(MRError):
    code = "estimation_error"


class DegenerateDenominatorError(EstimationError):
    code = "degenerate_denominator"


class WeakInstrumentError(EstimationError):
    """theta2 is not positive, so the debiased denominators are unusable."""

    code = "weak_instrument"

    def __init__(self, theta2: float, psi_hat: float):
        self.theta2 = theta2
        self.psi_hat = psi_hat
        super().__init__(
            f"Debiased denominator theta2={theta2:.6g} is not positive "
            f"(psi_hat={psi_hat:.4g}); instruments are too weak"
        )


class ZeroNumeratorError(EstimationError):
    code = "zero_numerator"


class VarianceDegeneracyError(EstimationError):
    code = "variance_degeneracy"

    def __init__(self, variance: float, delta_hat: float):
        self.variance = variance
        self.delta_hat = delta_hat
        super().__init__(
            f"Estimated variance {variance:.6g} is not positive (delta_hat={delta_hat:.6g})"
        )


class InsufficientInstrumentsError(EstimationError):
    code = "insufficient_instruments"


class SingularDesignError(EstimationError):
    code = "singular_design"


class UndefinedRatioError(EstimationError):
    code = "undefined_ratio"


# Simulation


class SimulationConfigError(MRError):
    code = "config_error"


class ConfigFileError(MRError):
    """A YAML run file is missing, unreadable or not a mapping."""

    code = "config_file_error"


class MethodFailureError(MRError):
    code = "method_failure"


def error_record(method: str, error: MRError) -> Dict[str, Any]:
    """Flatten an error into the per-method row used by reports."""
    return {"method": method, "error": str(error), "code": error.code}


def handle_estimation_errors(func: Callable) -> Callable:
    """
    Decorator turning estimation failures into error records.
    Degenerate data is an expected outcome for weak instruments, so the caller
    gets a row it can report instead of an exception.
    """

    @functools.wraps(func)
    def wrapper(method: str, *args, **kwargs) -> Any:
        try:
            return func(method, *args, **kwargs)
        except (EstimationError, SelectionError) as e:
            logger.warning(f"{method} failed ({e.code}): {e}")
            return error_record(method, e)
        except Exception as e:
            logger.error(f"Unexpected error in {func.__name__} for {method}: {e}")
            logger.error(f"Traceback: {traceback.format_exc()}")
            raise

    return wrapper


def setup_error_handling(level: str = "INFO") -> None:
    """
    Set up logging and error handling for command-line runs.
    """
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    # Quiet chatty scientific-stack loggers
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    logging.getLogger("numexpr").setLevel(logging.WARNING)

    def handle_unhandled_exception(exc_type, exc_value, exc_traceback):
        if issubclass(exc_type, KeyboardInterrupt):
            sys.__excepthook__(exc_type, exc_value, exc_traceback)
            return

        logger.error(
            "Unhandled exception", exc_info=(exc_type, exc_value, exc_traceback)
        )

    sys.excepthook = handle_unhandled_exception
