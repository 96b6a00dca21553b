"""
Moving success threshold for VQE episodes.

Errors are measured as |E - mu|. xi2 is the lowest energy seen so far and
starts above every reachable energy, so the threshold starts at xi1. Once xi2
is known the greedy level is g = |mu - xi2|: a lower energy moves the
threshold to g + delta, every `greedy_period` episodes it moves to g, each
solved episode lowers it by delta / kappa and a run of failures at g resets
it to g + delta. Outside these moves the threshold stays within [g, g + delta].
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurriculumState:
    xi1: float
    xi2: float
    mu: float
    delta: float
    kappa: float
    greedy_period: int
    delta_decrement: float = 1e-5
    decrement_every: int = 50
    patience: Optional[int] = None
    min_threshold: float = 1e-10
    current_threshold: float = 0.0
    episodes: int = 0
    success_count: int = 0
    failure_streak: int = 0

    @classmethod
    def initial(cls, mu: float, xi1: float = 0.005, **kwargs) -> "CurriculumState":
        """Start at threshold xi1 with no energy seen yet."""
        state = cls(xi1=xi1, xi2=math.inf, mu=mu, current_threshold=xi1, **kwargs)
        if state.kappa <= 0 or state.greedy_period < 1:
            raise ValueError("kappa must be positive and greedy_period at least 1")
        if xi1 <= 0:
            raise ValueError(f"xi1 must be positive, got {xi1}")
        return state

    @property
    def has_energy(self) -> bool:
        return math.isfinite(self.xi2)

    @property
    def greedy_level(self) -> float:
        """|mu - xi2|; inf until an energy has been seen."""
        return abs(self.mu - self.xi2)

    @property
    def failure_patience(self) -> int:
        return self.patience or self.greedy_period

    def to_dict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        if not self.has_energy:
            data["xi2"] = None
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CurriculumState":
        data = dict(data)
        if data.get("xi2") is None:
            data["xi2"] = math.inf
        return cls(**data)


def curriculum_update(state: CurriculumState, solved: bool, best_energy: float) -> CurriculumState:
    """
    Fold one episode outcome into the curriculum.

    Args:
        state: Current state
        solved: Whether the episode met the current threshold
        best_energy: Lowest energy reached in the episode; ignored when not finite

    Returns:
        The next state
    """
    xi2 = state.xi2
    if math.isfinite(best_energy) and best_energy < xi2:
        xi2 = float(best_energy)
    improved = xi2 < state.xi2
    g = abs(state.mu - xi2)
    threshold = state.current_threshold
    delta = state.delta
    episodes = state.episodes + 1
    successes = state.success_count
    streak = state.failure_streak

    # Episode outcome
    if solved:
        successes += 1
        streak = 0
        threshold -= delta / state.kappa
        if successes % state.decrement_every == 0:
            delta = max(0.0, delta - state.delta_decrement)
    elif not improved and math.isfinite(g) and threshold <= max(g, state.min_threshold) + 1e-12:
        streak += 1
        if streak >= state.failure_patience:
            threshold = g + delta
            streak = 0
            logger.debug(f"Amortization reset of the threshold to {threshold:.3e}")

    # Lower energy found
    if improved:
        threshold = g + delta
        streak = 0
        logger.debug(f"New lowest energy {xi2:.6f}, threshold moved to {threshold:.3e}")

    if math.isfinite(g):
        if episodes % state.greedy_period == 0:
            threshold = g
            logger.debug(f"Greedy threshold shift to {threshold:.3e}")
        threshold = min(max(threshold, g), g + delta)
    threshold = max(threshold, state.min_threshold)

    return dataclasses.replace(
        state,
        xi2=xi2,
        delta=delta,
        current_threshold=threshold,
        episodes=episodes,
        success_count=successes,
        failure_streak=streak,
    )
