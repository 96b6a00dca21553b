"""
Random halting: negative-binomial episode lengths.
"""

import math
from typing import Optional, Tuple

import numpy as np


def sample_episode_length(p: float, n_s: int, rng: np.random.Generator) -> int:
    """
    Total trials until n_s successes with success probability p.

    Args:
        p: Success probability in (0, 1]
        n_s: Required successes, at least 1
        rng: Seeded generator

    Returns:
        n_s plus a NegBinom(n_s, p) failure count; the mean is n_s / p
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must be in (0, 1], got {p}")
    if n_s < 1:
        raise ValueError(f"n_s must be positive, got {n_s}")
    return int(rng.negative_binomial(n_s, p)) + int(n_s)


def default_halting_parameters(
    max_steps: int,
    p: Optional[float] = None,
    n_s: Optional[int] = None,
) -> Tuple[float, int]:
    """
    Fill in missing halting parameters so the mean length equals max_steps.
    """
    if n_s is None:
        n_s = max(1, math.ceil(max_steps / 2)) if p is None else max(1, round(p * max_steps))
    if p is None:
        p = min(1.0, n_s / max_steps)
    return p, n_s
