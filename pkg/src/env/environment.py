"""
The architecture-search environment.

An episode starts from the empty circuit. Each step appends the gate named by
the action, re-optimizes every angle of the circuit and scores the result.
"""

import logging
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..config.config_manager import EnvConfig, OptimizerConfig
from ..noise.channels import NoiseSpec
from ..optimize.registry import optimize_angles
from ..quantum.gates import Circuit
from ..vqa.problems import VqeProblem, VqsdProblem, vqe_energy, vqsd_cost
from .actions import Action, ActionSpace
from .curriculum import CurriculumState
from .encoding import make_encoder, observation_size
from .halting import default_halting_parameters, sample_episode_length
from .legality import IllegalActionTracker
from .rewards import SUCCESS_MARGIN, reward_dense, reward_sparse

logger = logging.getLogger(__name__)

Problem = Union[VqsdProblem, VqeProblem]


class QasEnvironment:
    """Builds one circuit per episode for a VQSD or VQE problem."""

    def __init__(
        self,
        problem: Problem,
        env_config: EnvConfig,
        optimizer_config: OptimizerConfig,
        rng: np.random.Generator,
        noise: Optional[NoiseSpec] = None,
        curriculum: Optional[CurriculumState] = None,
    ):
        """
        Initialize the environment.

        Args:
            problem: VQSD or VQE problem
            env_config: Episode settings
            optimizer_config: Angle optimizer settings
            rng: Generator for halting draws, optimizer starts and shot noise
            noise: Optional noise model for cost evaluation
            curriculum: Moving threshold for VQE; the fixed env threshold when omitted
        """
        self.problem = problem
        self.config = env_config
        self.optimizer_config = optimizer_config
        self.spsa_params = optimizer_config.spsa_params()
        self.rng = rng
        self.noise = noise
        self.curriculum = curriculum
        self.is_vqe = isinstance(problem, VqeProblem)
        self.n = problem.n
        self.max_depth = env_config.depth_slices
        self.space = ActionSpace(self.n, env_config.allowed_pairs)
        self.append_cost = env_config.append_cost if env_config.append_cost is not None else self.is_vqe
        if env_config.random_halting.enabled:
            self.halting = default_halting_parameters(
                env_config.max_steps, env_config.random_halting.p, env_config.random_halting.n_s
            )
        else:
            self.halting = None

        # Episode state
        self.circuit = Circuit(self.n)
        self.encoder = make_encoder(env_config.encoding, self.max_depth, self.n)
        self.tracker = IllegalActionTracker(self.n)
        self.history: List[Action] = []
        self.steps = 0
        self.done = False
        self.episode_limit = env_config.max_steps
        self.last_value = 0.0
        self.min_cost = float("inf")
        self.best_energy = float("inf")

    @property
    def action_count(self) -> int:
        return self.space.size

    @property
    def observation_size(self) -> int:
        return observation_size(self.max_depth, self.n, self.append_cost, self.config.encoding)

    @property
    def threshold(self) -> float:
        if self.curriculum is not None:
            return self.curriculum.current_threshold
        return self.config.threshold

    @property
    def reference_energy(self) -> Optional[float]:
        """Energy errors are measured from this level (VQE only)."""
        if not self.is_vqe:
            return None
        use_fake = self.config.curriculum.enabled and self.config.curriculum.use_fake_min
        if use_fake or self.problem.ground_truth is None:
            return self.problem.fake_min
        return self.problem.ground_truth

    def reset(self) -> np.ndarray:
        """Start an episode from the empty circuit and return its observation."""
        self.circuit = Circuit(self.n)
        self.encoder = make_encoder(self.config.encoding, self.max_depth, self.n)
        self.tracker.reset()
        self.history = []
        self.steps = 0
        self.done = False

        # Draw the episode length
        if self.halting is not None:
            p, n_s = self.halting
            self.episode_limit = min(sample_episode_length(p, n_s, self.rng), self.max_depth)
        else:
            self.episode_limit = self.config.max_steps
        self.last_value = self._evaluate(self.circuit)
        self.min_cost = float("inf")
        self.best_energy = self.last_value if self.is_vqe else float("inf")
        return self.observation()

    def observation(self) -> np.ndarray:
        return self.encoder.observation(self.last_value if self.append_cost else None)

    def legal_mask(self) -> np.ndarray:
        if not self.config.illegal_actions:
            return self.space.allowed.copy()
        return self.tracker.mask(self.space)

    def _evaluate(self, circuit: Circuit) -> float:
        if self.is_vqe:
            return vqe_energy(self.problem, circuit, circuit.angles(), self.noise, self.rng)
        return vqsd_cost(self.problem, circuit, circuit.angles(), self.noise)

    def _report_cost(self, value: float) -> float:
        """VQSD cost, or the VQE energy error against the best known reference."""
        if not self.is_vqe:
            return value
        reference = self.problem.ground_truth
        if reference is None:
            reference = self.problem.fake_min
        return abs(value - reference)

    def _is_success(self, value: float) -> bool:
        if not self.is_vqe:
            return value < self.threshold + SUCCESS_MARGIN
        error = abs(value - self.reference_energy)
        if self.config.reward == "sparse":
            return error < self.threshold
        return error < self.threshold + SUCCESS_MARGIN

    def _reward(self, value: float, previous: float) -> float:
        if self.config.reward == "dense_log":
            cost = abs(value - self.reference_energy) if self.is_vqe else value
            return reward_dense(cost, self.threshold, self.config.success_bonus)
        if self.is_vqe:
            e_min = self.reference_energy
            return reward_sparse(value, previous, self.steps, self.episode_limit, e_min + self.threshold, e_min)
        return reward_sparse(value, previous, self.steps, self.episode_limit, self.threshold, 0.0)

    def step(self, index: int) -> Tuple[np.ndarray, float, bool, Dict[str, Any]]:
        """
        Apply an action.

        Args:
            index: Action index; must be legal

        Returns:
            (observation, reward, done, info)

        Raises:
            ValueError: For an illegal action or a step after the episode ended
        """
        if self.done or self.steps >= self.episode_limit:
            raise ValueError("Episode is over; call reset()")
        action = self.space.decode(int(index))
        if not self.legal_mask()[index]:
            raise ValueError(f"Illegal action {action.code} at step {self.steps + 1}")

        # Append the gate with a zero angle
        warm = self.circuit.angles() if self.optimizer_config.warm_start else None
        gate = action.to_gate(0.0)
        template = self.circuit.copy().append(gate)
        if warm is not None and gate.is_rotation:
            warm = np.append(warm, 0.0)

        # Re-optimize every angle
        result = optimize_angles(
            self.problem,
            template,
            self.optimizer_config.method,
            self.optimizer_config.restarts,
            self.rng,
            self.optimizer_config.budget,
            params=self.spsa_params,
            noise=self.noise,
            initial_point=warm,
        )
        self.circuit = template.bind(result.best_point)
        self.encoder.append(gate)
        self.tracker.update(action)
        self.history.append(action)
        self.steps += 1

        # Score the circuit
        value = result.best_value
        previous = self.last_value
        self.last_value = value
        cost = self._report_cost(value)
        self.min_cost = min(self.min_cost, cost)
        if self.is_vqe:
            self.best_energy = min(self.best_energy, value)

        solved = self._is_success(value)
        reward = self._reward(value, previous)
        done = solved or self.steps >= self.episode_limit
        self.done = done
        info = {
            "cost": cost,
            "energy": value if self.is_vqe else None,
            "gates": self.circuit.gate_count,
            "depth": self.circuit.depth,
            "rotation_count": self.circuit.rotation_count,
            "cnot_count": self.circuit.cnot_count,
            "solved": solved,
            "threshold": self.threshold,
            "fevals": result.fevals_used,
        }
        logger.debug(f"step {self.steps}: {gate!r} cost={cost:.3e} reward={reward:.3f}")
        return self.observation(), reward, done, info
