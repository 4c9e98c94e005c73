"""
mdivw: the modified debiased inverse-variance weighted estimator for
two-sample summary-data Mendelian randomization, with IV selection,
balanced-pleiotropy variance, comparator estimators, a Monte Carlo
benchmark and residual diagnostics.
"""

__version__ = "0.1.0"
