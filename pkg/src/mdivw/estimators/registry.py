"""Method tags mapped to estimator callables with one shared signature."""

import logging
from typing import Callable, Dict, Iterable, List, Optional

from mdivw.estimators.ratio import divw, ivw, mdivw
from mdivw.estimators.types import Estimate, SelectionMask
from mdivw.summary_data.dataset import SummaryDataset

logger = logging.getLogger(__name__)

EstimatorFn = Callable[..., Estimate]


def _ivw(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    return ivw(dataset, mask, z=z)


def _divw(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    return divw(dataset, mask, z=z)


def _mdivw(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    return mdivw(dataset, mask, z=z)


def _mdivw_tau(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    return mdivw(dataset, mask, pleiotropy=True, z=z)


def _egger(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    from mdivw.comparators.egger import egger

    return egger(dataset, mask, z=z)


def _median(dataset, mask, *, bootstrap_reps=None, seed=None, z=None):
    from mdivw.comparators.median import weighted_median

    return weighted_median(dataset, mask, bootstrap_reps=bootstrap_reps, seed=seed, z=z)


ESTIMATORS: Dict[str, EstimatorFn] = {
    "ivw": _ivw,
    "divw": _divw,
    "mdivw": _mdivw,
    "mdivw_tau": _mdivw_tau,
    "egger": _egger,
    "median": _median,
}


def parse_methods(methods: Iterable[str] | str) -> List[str]:
    """Normalise a comma-separated string or list of tags; unknown tags are rejected."""
    if isinstance(methods, str):
        methods = methods.split(",")
    tags = [m.strip().lower() for m in methods if m and m.strip()]
    if not tags:
        raise ValueError("At least one method is required")
    unknown = [t for t in tags if t not in ESTIMATORS]
    if unknown:
        raise ValueError(f"Unknown method(s) {unknown}; choose from {sorted(ESTIMATORS)}")
    return list(dict.fromkeys(tags))


def run_estimator(
    tag: str,
    dataset: SummaryDataset,
    mask: SelectionMask,
    bootstrap_reps: Optional[int] = None,
    seed: Optional[int] = None,
    z: Optional[float] = None,
) -> Estimate:
    try:
        estimator = ESTIMATORS[tag]
    except KeyError:
        raise ValueError(f"Unknown method {tag!r}") from None
    return estimator(dataset, mask, bootstrap_reps=bootstrap_reps, seed=seed, z=z)
