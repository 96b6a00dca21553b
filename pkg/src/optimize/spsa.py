"""
SPSA and multistage Adam-SPSA.

Both estimate the gradient from two evaluations at x +- c_k * delta with a
Rademacher perturbation delta, using the gains
a_k = a / (k + 1 + A)^alpha and c_k = c / (k + 1)^gamma_sp. When the budget
allows, one evaluation is kept for the final iterate.
"""

import logging
from typing import Optional

import numpy as np

from .types import ObjectiveHandle, OptimResult, SpsaParams, StageMode, _BestTracker

logger = logging.getLogger(__name__)


def _rademacher(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.integers(0, 2, size=size) * 2.0 - 1.0


def _gradient(
    obj: ObjectiveHandle,
    x: np.ndarray,
    ck: float,
    rng: np.random.Generator,
    tracker: _BestTracker,
) -> np.ndarray:
    delta = _rademacher(rng, x.size)
    x_plus, x_minus = x + ck * delta, x - ck * delta
    f_plus = obj.evaluate(x_plus)
    tracker.observe(f_plus, x_plus)
    f_minus = obj.evaluate(x_minus)
    tracker.observe(f_minus, x_minus)
    return (f_plus - f_minus) / (2.0 * ck) * delta


def _total_budget(obj: ObjectiveHandle, params: SpsaParams) -> int:
    budget = min(obj.budget, params.max_fevals)
    if budget < 2:
        raise ValueError(f"SPSA needs a budget of at least 2 evaluations, got {budget}")
    return budget


def _finish(obj: ObjectiveHandle, x: np.ndarray, tracker: _BestTracker, reserve: int) -> OptimResult:
    if reserve:
        tracker.observe(obj.evaluate(x), x)
        tracker.mark()
    return tracker.result()


def spsa_minimize(
    obj: ObjectiveHandle,
    x0: np.ndarray,
    params: SpsaParams,
    rng: np.random.Generator,
) -> OptimResult:
    """
    Plain SPSA.

    Args:
        obj: Objective; the budget is min(obj.budget, params.max_fevals)
        x0: Starting point
        params: Gain constants (beta1, beta2, stages and lambda are unused)
        rng: Generator for the perturbations

    Returns:
        Best evaluated point and value
    """
    x = obj.check_point(x0)
    budget = _total_budget(obj, params)
    reserve = 1 if budget >= 3 else 0
    tracker = _BestTracker()
    k = 0
    while tracker.fevals + 2 <= budget - reserve:
        ak, ck = params.gains(k)
        x = x - ak * _gradient(obj, x, ck, rng, tracker)
        tracker.mark()
        k += 1
    logger.debug(f"SPSA finished after {k} iterations")
    return _finish(obj, x, tracker, reserve)


def adam_spsa_minimize(
    obj: ObjectiveHandle,
    x0: np.ndarray,
    params: SpsaParams,
    rng: np.random.Generator,
) -> OptimResult:
    """
    SPSA gradients fed through Adam moments, run in stages.

    Moments persist across stages. In reset mode every stage restarts the gain
    index at 0; in continuous mode it keeps counting. With use_lambda_decay the
    step numerator of stage s is a * lambda^s.

    Args:
        obj: Objective; the budget is min(obj.budget, sum(params.stages))
        x0: Starting point
        params: Hyperparameters with a nonempty `stages` list
        rng: Generator for the perturbations

    Returns:
        Best evaluated point and value
    """
    if not params.stages:
        raise ValueError("Adam-SPSA needs at least one stage budget")
    x = obj.check_point(x0)
    budget = min(_total_budget(obj, params), sum(params.stages))
    if budget < 2:
        raise ValueError(f"Adam-SPSA needs a budget of at least 2 evaluations, got {budget}")
    reserve = 1 if budget >= 3 else 0
    tracker = _BestTracker()

    m = np.zeros_like(x)
    v = np.zeros_like(x)
    t = 0
    k = 0
    for stage, stage_budget in enumerate(params.stages):
        if params.mode == StageMode.RESET:
            k = 0
        spent = 0
        while spent + 2 <= stage_budget and tracker.fevals + 2 <= budget - reserve:
            ak, ck = params.gains(k, stage)
            g = _gradient(obj, x, ck, rng, tracker)
            spent += 2
            t += 1
            m = params.beta1 * m + (1.0 - params.beta1) * g
            v = params.beta2 * v + (1.0 - params.beta2) * g * g
            m_hat = m / (1.0 - params.beta1 ** t)
            v_hat = v / (1.0 - params.beta2 ** t)
            x = x - ak * m_hat / (np.sqrt(v_hat) + params.epsilon)
            tracker.mark()
            k += 1
        logger.debug(f"Adam-SPSA stage {stage} used {spent} evaluations")
    return _finish(obj, x, tracker, reserve)
