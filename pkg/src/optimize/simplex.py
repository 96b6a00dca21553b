"""
Budget-bounded Nelder-Mead with restarts, on top of scipy.optimize.
"""

import logging
from typing import Optional

import numpy as np
from scipy import optimize

from .types import ObjectiveHandle, OptimResult, _BestTracker

logger = logging.getLogger(__name__)

XATOL = 1e-10
FATOL = 1e-14


class _BudgetExhausted(Exception):
    pass


def simplex_minimize(obj: ObjectiveHandle, x0: np.ndarray, budget: Optional[int] = None) -> OptimResult:
    """
    Nelder-Mead with the standard coefficients (1, 2, 0.5, 0.5).

    When the simplex collapses before the budget is spent, the search restarts
    from the best point found so far.

    Args:
        obj: Objective of dimension >= 1
        x0: Starting point
        budget: Evaluation budget; obj.budget when omitted

    Returns:
        Best evaluated point and value
    """
    x = obj.check_point(x0)
    if obj.dimension < 1:
        raise ValueError("Nelder-Mead needs at least one dimension")
    budget = obj.budget if budget is None else min(int(budget), obj.budget)
    tracker = _BestTracker()

    def counted(point: np.ndarray) -> float:
        if tracker.fevals >= budget:
            raise _BudgetExhausted()
        value = float(obj.evaluate(point))
        tracker.observe(value, point)
        tracker.mark()
        return value

    start = x
    restarts = 0
    while tracker.fevals < budget:
        before = tracker.fevals
        try:
            optimize.minimize(
                counted,
                start,
                method="Nelder-Mead",
                options={
                    "maxfev": budget - tracker.fevals,
                    "maxiter": 10 * budget,
                    "xatol": XATOL,
                    "fatol": FATOL,
                    "adaptive": False,
                },
            )
        except _BudgetExhausted:
            break
        if tracker.fevals == before:
            break
        start = tracker.point
        restarts += 1
    logger.debug(f"Nelder-Mead used {tracker.fevals} evaluations and {restarts} restarts")
    return tracker.result()
