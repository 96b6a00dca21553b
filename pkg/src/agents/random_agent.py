"""
Random-search baseline: uniform choice among the legal actions.
"""

import numpy as np

from .base_agent import BaseAgent


class RandomAgent(BaseAgent):
    """Picks every gate uniformly at random from the legal set."""

    name = "random"
    description = "Uniform legal-random policy"

    def act(self, obs: np.ndarray, legal: np.ndarray, greedy: bool = False) -> int:
        choices = np.flatnonzero(legal)
        if choices.size == 0:
            raise ValueError("No legal action available")
        self.steps_done += 1
        return int(self.rng.choice(choices))
