from mdivw.comparators.egger import EggerFit, egger, egger_fit
from mdivw.comparators.median import weighted_median, weighted_median_value

__all__ = ["EggerFit", "egger", "egger_fit", "weighted_median", "weighted_median_value"]
