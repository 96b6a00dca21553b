"""
Double deep Q-network agent with illegal-action masking.
"""

import logging
from typing import Any, Dict, Optional

import numpy as np

from ..config.config_manager import AgentSettings
from .adam import Adam
from .base_agent import BaseAgent
from .mlp import Mlp
from .replay_buffer import NStepAccumulator, ReplayBuffer, TransitionBatch, TransitionRecord

logger = logging.getLogger(__name__)


def epsilon_at(k: int, start: float = 1.0, decay: float = 0.99995, floor: float = 0.05) -> float:
    """Exploration rate after k actions."""
    return max(floor, start * decay ** k)


def smooth_l1(x, beta: float = 1.0):
    """0.5 x^2 when |x| < beta, else |x| - 0.5 beta; elementwise."""
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    x = np.asarray(x, dtype=float)
    a = np.abs(x)
    out = np.where(a < beta, 0.5 * x * x, a - 0.5 * beta)
    return float(out) if out.ndim == 0 else out


def smooth_l1_grad(x: np.ndarray, beta: float = 1.0) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < beta, x, np.sign(x))


def select_action(q_values: np.ndarray, legal: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
    """
    Epsilon-greedy choice restricted to legal actions.

    A uniform number is always drawn. Below epsilon the action is uniform over
    the legal set; otherwise it is the argmax with illegal entries at -inf,
    ties going to the lowest index.

    Raises:
        ValueError: If no action is legal
    """
    legal = np.asarray(legal, dtype=bool)
    choices = np.flatnonzero(legal)
    if choices.size == 0:
        raise ValueError("No legal action available")
    u = rng.random()
    if u < epsilon:
        return int(rng.choice(choices))
    masked = np.where(legal, np.asarray(q_values, dtype=float), -np.inf)
    return int(np.argmax(masked))


def ddqn_targets(batch: TransitionBatch, policy: Mlp, target: Mlp, gamma: float) -> np.ndarray:
    """
    y = r + gamma^n * Q_target(s', argmax_a Q_policy(s', a)); y = r for terminal transitions.

    The argmax only considers actions legal in s'. The horizon n is taken per
    transition from `batch.steps`.
    """
    if len(batch) == 0:
        raise ValueError("Batch must not be empty")
    q_policy = policy.forward(batch.next_obs, train=False)
    masked = np.where(batch.next_legal, q_policy, -np.inf)
    best = np.argmax(masked, axis=1)
    q_target = target.forward(batch.next_obs, train=False)[np.arange(len(batch)), best]
    bootstrap = np.where(batch.dones, 0.0, (gamma ** batch.steps) * q_target)
    return batch.rewards + bootstrap


class DdqnAgent(BaseAgent):
    """Policy and target networks, replay memory and Adam updates."""

    name = "ddqn"
    description = "Double DQN with masked argmax"
    learns = True

    def __init__(self, obs_size: int, n_actions: int, settings: AgentSettings, rng: np.random.Generator):
        """
        Initialize the agent.

        Args:
            obs_size: Observation length
            n_actions: Action-space size
            settings: Hyperparameters
            rng: Generator for initialization, exploration, dropout and sampling
        """
        super().__init__(obs_size, n_actions, rng)
        self.settings = settings
        sizes = [obs_size, *settings.hidden_sizes(), n_actions]
        self.policy = Mlp(sizes, settings.dropout, rng)
        self.target = self.policy.clone()
        self.optimizer = Adam(lr=settings.learning_rate)
        self.buffer = ReplayBuffer(settings.replay_capacity, obs_size, n_actions)
        self.accumulator = NStepAccumulator(settings.n_step, settings.gamma)
        self.train_steps = 0
        self.last_loss: Optional[float] = None

    @classmethod
    def from_config(cls, settings: AgentSettings, obs_size: int, n_actions: int, rng: np.random.Generator):
        """
        Create an agent from a configuration object.

        Returns:
            A new DdqnAgent instance
        """
        return cls(obs_size, n_actions, settings, rng)

    @property
    def epsilon(self) -> float:
        s = self.settings
        return epsilon_at(self.steps_done, s.epsilon_start, s.epsilon_decay, s.epsilon_min)

    def q_values(self, obs: np.ndarray) -> np.ndarray:
        return self.policy.forward(obs, train=False)

    def act(self, obs: np.ndarray, legal: np.ndarray, greedy: bool = False) -> int:
        epsilon = 0.0 if greedy else self.epsilon
        action = select_action(self.q_values(obs), legal, epsilon, self.rng)
        if not greedy:
            self.steps_done += 1
        return action

    def observe(self, obs, action, reward, next_obs, done, next_legal) -> None:
        record = TransitionRecord(
            obs=np.asarray(obs, dtype=float),
            action=int(action),
            reward=float(reward),
            next_obs=np.asarray(next_obs, dtype=float),
            done=bool(done),
            next_legal=np.asarray(next_legal, dtype=bool),
        )
        for ready in self.accumulator.push(record):
            self.buffer.push(ready)
        if len(self.buffer) >= self.settings.batch_size:
            self.train_step()
        if self.settings.target_update == "hard" and self.steps_done % self.settings.target_period == 0:
            self.target.copy_from(self.policy)
            logger.debug(f"Target network copied at action {self.steps_done}")

    def end_episode(self) -> None:
        for ready in self.accumulator.flush():
            self.buffer.push(ready)

    def train_step(self, batch: Optional[TransitionBatch] = None) -> float:
        """
        One Adam step on the mean smooth-L1 TD error.

        Args:
            batch: Transitions to fit; sampled from the buffer when omitted

        Returns:
            Loss before the update

        Raises:
            ValueError: If the buffer holds fewer transitions than a batch
        """
        if batch is None:
            batch = self.buffer.sample(self.settings.batch_size, self.rng)
        y = ddqn_targets(batch, self.policy, self.target, self.settings.gamma)
        q, cache = self.policy.forward_with_cache(batch.obs, train=True, rng=self.rng)
        rows = np.arange(len(batch))
        diff = q[rows, batch.actions] - y
        beta = self.settings.smooth_l1_beta
        loss = float(np.mean(smooth_l1(diff, beta)))

        grad_out = np.zeros_like(q)
        grad_out[rows, batch.actions] = smooth_l1_grad(diff, beta) / len(batch)
        grads = self.policy.backward(cache, grad_out)
        self.optimizer.step(self.policy.params(), grads)
        self.train_steps += 1
        if self.settings.target_update == "soft":
            self.target.soft_update(self.policy, self.settings.tau)
        self.last_loss = loss
        return loss

    def state_header(self) -> Dict[str, Any]:
        header = super().state_header()
        header.update(
            {
                "layer_sizes": self.policy.layer_sizes,
                "train_steps": self.train_steps,
                "adam_t": self.optimizer.t,
                "buffer_count": self.buffer.count,
            }
        )
        return header

    def state_arrays(self) -> Dict[str, np.ndarray]:
        arrays: Dict[str, np.ndarray] = {}
        for name, net in (("policy", self.policy), ("target", self.target)):
            arrays.update({f"{name}/{k}": v for k, v in net.params().items()})
        arrays.update({f"adam/{k}": v for k, v in self.optimizer.state_arrays().items()})
        arrays.update({f"buffer/{k}": v for k, v in self.buffer.state_arrays().items()})
        return arrays

    def load_state(self, header: Dict[str, Any], arrays: Dict[str, np.ndarray]) -> None:
        super().load_state(header, arrays)
        if list(header["layer_sizes"]) != self.policy.layer_sizes:
            raise ValueError(f"Checkpoint layer sizes {header['layer_sizes']} do not match {self.policy.layer_sizes}")
        for name, net in (("policy", self.policy), ("target", self.target)):
            for k, v in net.params().items():
                v[...] = arrays[f"{name}/{k}"]
        self.optimizer.load_state(
            header["adam_t"], {k[len("adam/"):]: v for k, v in arrays.items() if k.startswith("adam/")}
        )
        self.buffer.load_state(
            header["buffer_count"], {k[len("buffer/"):]: v for k, v in arrays.items() if k.startswith("buffer/")}
        )
        self.train_steps = int(header["train_steps"])
