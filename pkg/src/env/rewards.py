"""
Reward functions.
"""

import math

SUCCESS_MARGIN = 1e-5
SPARSE_SUCCESS = 5.0
SPARSE_FAILURE = -5.0


def reward_dense(cost: float, threshold: float, bonus: float) -> float:
    """
    Log reward: `bonus` once cost < threshold + SUCCESS_MARGIN, otherwise
    -ln(cost - threshold).
    """
    if not math.isfinite(cost):
        raise ValueError(f"cost must be finite, got {cost}")
    if cost < threshold + SUCCESS_MARGIN:
        return float(bonus)
    return -math.log(cost - threshold)


def reward_sparse(
    cost_t: float,
    cost_prev: float,
    t: int,
    max_steps: int,
    threshold: float,
    e_min: float,
) -> float:
    """
    Sparse reward on energies.

    Args:
        cost_t: Energy after this step
        cost_prev: Energy after the previous step
        t: Step number, starting at 1
        max_steps: Step limit of the episode
        threshold: Absolute energy level counted as success
        e_min: Reference minimum energy

    Returns:
        5 on success, -5 on the last step without success, otherwise the
        relative improvement clipped below at -1 (-1 when cost_prev <= e_min)
    """
    if cost_t < threshold:
        return SPARSE_SUCCESS
    if t >= max_steps:
        return SPARSE_FAILURE
    denominator = cost_prev - e_min
    if denominator <= 0:
        return -1.0
    return max((cost_prev - cost_t) / denominator, -1.0)
