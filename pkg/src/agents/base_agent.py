"""
Base agent interface shared by the learning agent and the random baseline.
"""

from typing import Any, Dict

import numpy as np


class BaseAgent:
    """Base class for all agents that pick gates in the search environment."""

    name = "base"
    description = "Abstract agent"
    learns = False

    def __init__(self, obs_size: int, n_actions: int, rng: np.random.Generator):
        """
        Initialize a base agent.

        Args:
            obs_size: Length of the flattened observation
            n_actions: Size of the action space
            rng: Generator owned by the agent
        """
        self.obs_size = obs_size
        self.n_actions = n_actions
        self.rng = rng
        self.steps_done = 0

    @property
    def epsilon(self) -> float:
        return 1.0

    def act(self, obs: np.ndarray, legal: np.ndarray, greedy: bool = False) -> int:
        """
        Choose an action index.

        Args:
            obs: Current observation
            legal: Boolean mask of legal actions
            greedy: Test-mode choice without exploration or bookkeeping

        Returns:
            A legal action index
        """
        raise NotImplementedError

    def observe(
        self,
        obs: np.ndarray,
        action: int,
        reward: float,
        next_obs: np.ndarray,
        done: bool,
        next_legal: np.ndarray,
    ) -> None:
        """Record a training transition. Agents that do not learn ignore it."""

    def end_episode(self) -> None:
        """Hook called after every training episode."""

    def state_header(self) -> Dict[str, Any]:
        """JSON-serializable counters and generator state."""
        return {
            "agent": self.name,
            "steps_done": self.steps_done,
            "rng_state": self.rng.bit_generator.state,
        }

    def state_arrays(self) -> Dict[str, np.ndarray]:
        return {}

    def load_state(self, header: Dict[str, Any], arrays: Dict[str, np.ndarray]) -> None:
        if header.get("agent") != self.name:
            raise ValueError(f"Checkpoint holds a {header.get('agent')} agent, not {self.name}")
        self.steps_done = int(header["steps_done"])
        self.rng.bit_generator.state = header["rng_state"]
