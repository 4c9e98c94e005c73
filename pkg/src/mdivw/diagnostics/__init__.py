from mdivw.diagnostics.residuals import ResidualSet, ResidualSummary, standardized_residuals

__all__ = ["ResidualSet", "ResidualSummary", "standardized_residuals"]
