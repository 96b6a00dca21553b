"""
Experience replay with n-step return accumulation.
"""

from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List

import numpy as np


@dataclass
class TransitionRecord:
    """One (possibly n-step) transition; `steps` is the return horizon."""
    obs: np.ndarray
    action: int
    reward: float
    next_obs: np.ndarray
    done: bool
    next_legal: np.ndarray
    steps: int = 1


@dataclass
class TransitionBatch:
    obs: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_obs: np.ndarray
    dones: np.ndarray
    next_legal: np.ndarray
    steps: np.ndarray

    def __len__(self) -> int:
        return len(self.actions)

    @classmethod
    def from_records(cls, records: List[TransitionRecord]) -> "TransitionBatch":
        if not records:
            raise ValueError("Batch must not be empty")
        return cls(
            obs=np.stack([r.obs for r in records]).astype(float),
            actions=np.array([r.action for r in records], dtype=np.int64),
            rewards=np.array([r.reward for r in records], dtype=float),
            next_obs=np.stack([r.next_obs for r in records]).astype(float),
            dones=np.array([r.done for r in records], dtype=bool),
            next_legal=np.stack([r.next_legal for r in records]).astype(bool),
            steps=np.array([r.steps for r in records], dtype=np.int64),
        )


class ReplayBuffer:
    """Fixed-capacity ring of transitions; the oldest entry is evicted first."""

    def __init__(self, capacity: int, obs_size: int, n_actions: int):
        if capacity < 1:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_size))
        self.dones = np.zeros(capacity, dtype=bool)
        self.next_legal = np.zeros((capacity, n_actions), dtype=bool)
        self.steps = np.ones(capacity, dtype=np.int64)
        self.count = 0

    def __len__(self) -> int:
        return min(self.count, self.capacity)

    def push(self, record: TransitionRecord) -> None:
        i = self.count % self.capacity
        self.obs[i] = record.obs
        self.actions[i] = record.action
        self.rewards[i] = record.reward
        self.next_obs[i] = record.next_obs
        self.dones[i] = record.done
        self.next_legal[i] = record.next_legal
        self.steps[i] = record.steps
        self.count += 1

    def sample(self, batch_size: int, rng: np.random.Generator) -> TransitionBatch:
        """
        Uniform sample without replacement.

        Raises:
            ValueError: If fewer than `batch_size` transitions are stored
        """
        if len(self) < batch_size:
            raise ValueError(f"Buffer holds {len(self)} transitions, need {batch_size}")
        idx = rng.choice(len(self), size=batch_size, replace=False)
        return TransitionBatch(
            obs=self.obs[idx],
            actions=self.actions[idx],
            rewards=self.rewards[idx],
            next_obs=self.next_obs[idx],
            dones=self.dones[idx],
            next_legal=self.next_legal[idx],
            steps=self.steps[idx],
        )

    def oldest_first(self) -> np.ndarray:
        """Slot indices ordered from the oldest stored transition."""
        size = len(self)
        start = self.count % self.capacity if self.count > self.capacity else 0
        return (start + np.arange(size)) % self.capacity

    def state_arrays(self) -> Dict[str, np.ndarray]:
        return {
            "obs": self.obs,
            "actions": self.actions,
            "rewards": self.rewards,
            "next_obs": self.next_obs,
            "dones": self.dones,
            "next_legal": self.next_legal,
            "steps": self.steps,
        }

    def load_state(self, count: int, arrays: Dict[str, np.ndarray]) -> None:
        for name, value in arrays.items():
            current = getattr(self, name)
            if current.shape != value.shape:
                raise ValueError(f"Buffer field {name} has shape {value.shape}, expected {current.shape}")
            current[...] = value
        self.count = int(count)


class NStepAccumulator:
    """Turns one-step transitions into forward-view n-step transitions."""

    def __init__(self, n_step: int, gamma: float):
        if n_step < 1:
            raise ValueError(f"n_step must be positive, got {n_step}")
        self.n_step = n_step
        self.gamma = gamma
        self.pending: Deque[TransitionRecord] = deque()

    def push(self, record: TransitionRecord) -> List[TransitionRecord]:
        """Add a one-step transition; returns the n-step transitions now complete."""
        self.pending.append(record)
        if record.done:
            return self.flush()
        if len(self.pending) == self.n_step:
            ready = [self._combine(list(self.pending))]
            self.pending.popleft()
            return ready
        return []

    def flush(self) -> List[TransitionRecord]:
        """Emit every pending suffix, e.g. at the end of an episode."""
        ready = []
        while self.pending:
            ready.append(self._combine(list(self.pending)))
            self.pending.popleft()
        return ready

    def _combine(self, window: List[TransitionRecord]) -> TransitionRecord:
        reward = sum(self.gamma ** i * r.reward for i, r in enumerate(window))
        first, last = window[0], window[-1]
        return TransitionRecord(
            obs=first.obs,
            action=first.action,
            reward=reward,
            next_obs=last.next_obs,
            done=last.done,
            next_legal=last.next_legal,
            steps=len(window),
        )
