"""
VQSD engines that diagonalize a Choi state for certification.
"""

import logging
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from ..agents.ddqn_agent import DdqnAgent
from ..agents.trainer import Trainer, circuit_from_record
from ..config.config_manager import AgentSettings, EnvConfig, OptimizerConfig
from ..env.environment import QasEnvironment
from ..noise.channels import NoiseSpec
from ..optimize.registry import optimize_angles
from ..quantum.gates import Circuit
from ..quantum.states import QuantumState
from ..vqa.lhea import build_certification_ansatz
from ..vqa.problems import VqsdProblem, vqsd_cost

logger = logging.getLogger(__name__)


@dataclass
class VqsdOutcome:
    """A bound diagonalizing circuit and how well it did."""
    circuit: Circuit
    cost: float
    converged: bool
    fevals: int = 0


class LheaVqsdEngine:
    """Fixed layered ansatz (RY, RZ and an entangler chain) tuned by one optimizer."""

    def __init__(
        self,
        optimizer_config: OptimizerConfig,
        layers: int = 2,
        entangler: str = "CNOT",
        threshold: float = 1e-4,
    ):
        self.optimizer_config = optimizer_config
        self.layers = layers
        self.entangler = entangler
        self.threshold = threshold

    def diagonalize(
        self,
        target: QuantumState,
        rng: np.random.Generator,
        noise: Optional[NoiseSpec] = None,
    ) -> VqsdOutcome:
        problem = VqsdProblem(target)
        template = build_certification_ansatz(target.n, self.layers, self.entangler)
        cfg = self.optimizer_config
        result = optimize_angles(
            problem,
            template,
            cfg.method,
            cfg.restarts,
            rng,
            cfg.budget,
            params=cfg.spsa_params(),
            noise=noise,
        )
        circuit = template.bind(result.best_point)
        converged = result.best_value < self.threshold
        logger.info(f"LHEA VQSD on {target.n} qubits: cost={result.best_value:.3e}, converged={converged}")
        return VqsdOutcome(circuit, float(result.best_value), converged, result.fevals_used)


class RlVqsdEngine:
    """Short DDQN architecture search on the Choi state; the best circuit is kept."""

    def __init__(
        self,
        env_config: EnvConfig,
        agent_settings: AgentSettings,
        optimizer_config: OptimizerConfig,
        episodes: int = 200,
        threshold: float = 1e-4,
        output_dir: Optional[Path] = None,
    ):
        self.env_config = env_config.model_copy(update={"threshold": threshold})
        self.agent_settings = agent_settings
        self.optimizer_config = optimizer_config
        self.episodes = episodes
        self.threshold = threshold
        self.output_dir = output_dir

    def diagonalize(
        self,
        target: QuantumState,
        rng: np.random.Generator,
        noise: Optional[NoiseSpec] = None,
    ) -> VqsdOutcome:
        env_rng, agent_rng = [np.random.default_rng(int(s)) for s in rng.integers(0, 2 ** 63, size=2)]
        problem = VqsdProblem(target)
        env = QasEnvironment(problem, self.env_config, self.optimizer_config, env_rng, noise=noise)
        agent = DdqnAgent.from_config(self.agent_settings, env.observation_size, env.action_count, agent_rng)

        if self.output_dir is not None:
            trainer = Trainer(env, agent, seed=0, output_dir=self.output_dir, checkpoint_every=self.episodes)
            trainer.run(self.episodes)
        else:
            with tempfile.TemporaryDirectory() as tmp:
                trainer = Trainer(env, agent, seed=0, output_dir=tmp, checkpoint_every=self.episodes)
                trainer.run(self.episodes)

        record = trainer.best or trainer.lowest
        if record is None:
            raise RuntimeError("Architecture search produced no circuit")
        circuit = circuit_from_record(target.n, record)
        cost = vqsd_cost(problem, circuit, circuit.angles(), noise)
        converged = cost < self.threshold
        logger.info(
            f"RL VQSD on {target.n} qubits: {circuit.gate_count} gates, cost={cost:.3e}, converged={converged}"
        )
        return VqsdOutcome(circuit, float(cost), converged)
