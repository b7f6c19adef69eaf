"""Exact Kloosterman sums: classical, and long-word fine/coarse at rank 4 and 5."""

__version__ = "0.1.0"

from .classical import ClassicalQuery, kloosterman, weil_bound_holds
from .exactnum import PhaseSum, phase_sum_eval
from .sl4fine import (
    FineCellLabel,
    GammaFactor,
    KloostermanResult,
    coarse_sum,
    fine_sum_closed_form,
    fine_sum_oracle,
)

__all__ = [
    "ClassicalQuery",
    "FineCellLabel",
    "GammaFactor",
    "KloostermanResult",
    "PhaseSum",
    "__version__",
    "coarse_sum",
    "fine_sum_closed_form",
    "fine_sum_oracle",
    "kloosterman",
    "phase_sum_eval",
    "weil_bound_holds",
]
