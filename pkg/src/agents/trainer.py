"""
Training loop: one training episode followed by one greedy test episode.
"""

import json
import logging
import time
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from ..env.curriculum import CurriculumState, curriculum_update
from ..env.environment import QasEnvironment
from ..quantum.gates import Circuit, Gate, GateKind
from ..utils.episode_log import EpisodeLog
from ..utils.logging_utils import log_episode, log_run_event
from .base_agent import BaseAgent
from .checkpoint import load_checkpoint, save_checkpoint

logger = logging.getLogger(__name__)

CHECKPOINT_NAME = "checkpoint.npz"


class Trainer:
    """Runs episodes for one seed and owns its logs and checkpoint."""

    def __init__(
        self,
        env: QasEnvironment,
        agent: BaseAgent,
        seed: int,
        output_dir: Union[str, Path],
        checkpoint_every: int = 50,
    ):
        """
        Initialize the trainer.

        Args:
            env: Environment; its `curriculum` attribute is updated in place
            agent: Learning agent or random baseline
            seed: Seed of this run, recorded in logs and checkpoints
            output_dir: Directory for this seed's files
            checkpoint_every: Episodes between checkpoints
        """
        if checkpoint_every < 1:
            raise ValueError(f"checkpoint_every must be positive, got {checkpoint_every}")
        self.env = env
        self.agent = agent
        self.seed = seed
        self.output_dir = Path(output_dir)
        self.checkpoint_every = checkpoint_every
        self.train_log = EpisodeLog(self.output_dir / "train.csv")
        self.test_log = EpisodeLog(self.output_dir / "test.csv")
        self.train_log.ensure_header()
        if agent.learns:
            self.test_log.ensure_header()
        self.episode = 0
        self.best: Optional[Dict[str, Any]] = None
        self.lowest: Optional[Dict[str, Any]] = None

    @property
    def checkpoint_path(self) -> Path:
        return self.output_dir / CHECKPOINT_NAME

    def run_episode(self, greedy: bool = False) -> Tuple[Dict[str, Any], float]:
        """
        Play one episode.

        Args:
            greedy: Test mode; no exploration and nothing stored in replay

        Returns:
            (episode log row, lowest energy reached; inf for VQSD)
        """
        start = time.perf_counter()
        threshold = self.env.threshold

        # Play the episode
        obs = self.env.reset()
        legal = self.env.legal_mask()
        done = False
        info: Dict[str, Any] = {}
        while not done:
            action = self.agent.act(obs, legal, greedy=greedy)
            next_obs, reward, done, info = self.env.step(action)
            next_legal = self.env.legal_mask()
            if not greedy:
                self.agent.observe(obs, action, reward, next_obs, done, next_legal)
            obs, legal = next_obs, next_legal
        if not greedy:
            self.agent.end_episode()

        # Build the log row

        row = {
            "episode": self.episode,
            "steps": self.env.steps,
            "success": bool(info["solved"]),
            "final_cost": info["cost"],
            "min_cost": self.env.min_cost,
            "gate_count": info["gates"],
            "rotation_count": info["rotation_count"],
            "cnot_count": info["cnot_count"],
            "depth": info["depth"],
            "epsilon": 0.0 if greedy else self.agent.epsilon,
            "threshold": threshold,
            "wall_time_s": time.perf_counter() - start,
        }
        self._record(row, "test" if greedy else "train")
        return row, self.env.best_energy

    def _circuit_record(self, row: Dict[str, Any], phase: str) -> Dict[str, Any]:
        circuit = self.env.circuit
        return {
            "episode": row["episode"],
            "phase": phase,
            "success": row["success"],
            "gate_count": row["gate_count"],
            "depth": row["depth"],
            "final_cost": row["final_cost"],
            "gates": [[kind, list(qubits)] for kind, qubits in circuit.structure()],
            "angles": circuit.angles().tolist(),
        }

    def _record(self, row: Dict[str, Any], phase: str) -> None:
        """Keep the smallest successful circuit and the lowest-cost circuit."""
        if row["success"] and (
            self.best is None
            or (row["gate_count"], row["final_cost"]) < (self.best["gate_count"], self.best["final_cost"])
        ):
            self.best = self._circuit_record(row, phase)
        if self.lowest is None or row["final_cost"] < self.lowest["final_cost"]:
            self.lowest = self._circuit_record(row, phase)

    def run(self, episodes: int) -> Dict[str, Any]:
        """
        Train until `episodes` training episodes are logged.

        Returns:
            Summary with successes per phase and the best circuit found
        """
        if self.episode == 0:
            self.save()
        while self.episode < episodes:
            self.episode += 1
            # Training episode
            train_row, train_energy = self.run_episode(greedy=False)
            self.train_log.append(train_row)
            log_episode(logger, self.seed, "train", train_row)

            outcome, best_energy = train_row, train_energy

            # Greedy test episode
            if self.agent.learns:
                test_row, test_energy = self.run_episode(greedy=True)
                self.test_log.append(test_row)
                log_episode(logger, self.seed, "test", test_row)
                outcome, best_energy = test_row, min(train_energy, test_energy)

            # Update the curriculum
            if self.env.curriculum is not None:
                self.env.curriculum = curriculum_update(self.env.curriculum, outcome["success"], best_energy)

            if self.episode % self.checkpoint_every == 0 or self.episode == episodes:
                self.save()

        self._write_best()
        successes = {
            phase: int(log.read()["success"].astype(bool).sum())
            for phase, log in (("train", self.train_log), ("test", self.test_log))
        }
        return {"seed": self.seed, "episodes": self.episode, "successes": successes, "best": self.best}

    def save(self) -> Path:
        header = {
            "seed": self.seed,
            "episode": self.episode,
            "agent_state": self.agent.state_header(),
            "env_rng_state": self.env.rng.bit_generator.state,
            "curriculum": self.env.curriculum.to_dict() if self.env.curriculum is not None else None,
            "best": self.best,
            "lowest": self.lowest,
        }
        path = save_checkpoint(self.checkpoint_path, header, self.agent.state_arrays())
        log_run_event(logger, "checkpoint", {"seed": self.seed, "episode": self.episode, "path": str(path)})
        return path

    def resume(self) -> int:
        """
        Restore the last checkpoint and cut the logs back to it.

        Returns:
            The episode the run continues after

        Raises:
            FileNotFoundError: If there is no checkpoint
            ValueError: If the checkpoint belongs to another seed
        """
        # Load the checkpoint
        header, arrays = load_checkpoint(self.checkpoint_path)
        if header["seed"] != self.seed:
            raise ValueError(f"Checkpoint belongs to seed {header['seed']}, not {self.seed}")

        # Restore agent, generator and curriculum
        self.agent.load_state(header["agent_state"], arrays)
        self.env.rng.bit_generator.state = header["env_rng_state"]
        if header["curriculum"] is not None:
            self.env.curriculum = CurriculumState.from_dict(header["curriculum"])
        self.best = header["best"]
        self.lowest = header["lowest"]
        self.episode = int(header["episode"])

        # Cut the logs back to the checkpoint
        dropped = self.train_log.truncate(self.episode) + self.test_log.truncate(self.episode)
        log_run_event(logger, "resume", {"seed": self.seed, "episode": self.episode, "dropped_rows": dropped})
        return self.episode

    def _write_best(self) -> None:
        if self.best is not None:
            with open(self.output_dir / "best_circuit.json", "w") as f:
                json.dump(self.best, f, indent=2)


def run_experiment(
    env: QasEnvironment,
    agent: BaseAgent,
    episodes: int,
    seed: int,
    output_dir: Union[str, Path],
    checkpoint_every: int = 50,
    resume: bool = False,
    curriculum: Optional[CurriculumState] = None,
) -> Dict[str, Any]:
    """
    Train one seed, optionally continuing from its checkpoint.

    Args:
        env: Environment
        agent: Agent
        episodes: Total training episodes
        seed: Seed of the run
        output_dir: Directory for this seed's files
        checkpoint_every: Episodes between checkpoints
        resume: Continue from the checkpoint in `output_dir`
        curriculum: Initial curriculum state, replacing the environment's

    Returns:
        Run summary
    """
    if curriculum is not None:
        env.curriculum = curriculum
    trainer = Trainer(env, agent, seed, output_dir, checkpoint_every)
    if resume:
        trainer.resume()
    summary = trainer.run(episodes)
    log_run_event(logger, "seed_done", {"seed": seed, "successes": summary["successes"]})
    return summary


def circuit_from_record(n: int, record: Dict[str, Any]) -> Circuit:
    """Rebuild a circuit stored by the trainer (gate list plus rotation angles)."""
    template = Circuit(n, [_placeholder_gate(kind, qubits) for kind, qubits in record["gates"]])
    return template.bind(record["angles"])


def _placeholder_gate(kind: str, qubits) -> Gate:
    kind = GateKind(kind)
    return Gate(kind, tuple(qubits), 0.0 if kind.is_rotation else None)
