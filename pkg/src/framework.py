"""
Main framework module: turns an experiment config into problems, environments
and agents, runs every seed and aggregates the logs.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from . import __version__
from .agents.base_agent import BaseAgent
from .agents.ddqn_agent import DdqnAgent
from .agents.random_agent import RandomAgent
from .agents.trainer import run_experiment
from .certify.certification import build_channel, certify
from .certify.engines import LheaVqsdEngine, RlVqsdEngine
from .config.config_manager import ExperimentConfig, HamiltonianSourceConfig, StateSourceConfig, config_hash
from .env.curriculum import CurriculumState
from .env.environment import QasEnvironment
from .hamiltonian.pauli import heisenberg, heisenberg_reduced_state, load_hamiltonian
from .optimize.registry import optimize_angles
from .quantum.states import QuantumState, random_density_matrix
from .utils.episode_log import EpisodeLog
from .utils.logging_utils import log_run_event
from .vqa.lhea import LheaSpec, build_lhea, lhea_parameter_count
from .vqa.problems import VqeProblem, VqsdProblem, eigen_readout, eigenvalue_error

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
SUMMARY_NAME = "summary.csv"


def build_vqsd_problem(source: StateSourceConfig, seed: int) -> VqsdProblem:
    """VQSD target from a state source; random states use the source seed or the run seed."""
    if source.source == "random":
        rng = np.random.default_rng(source.seed if source.seed is not None else seed)
        target = random_density_matrix(source.n_qubits, rng, rank=source.rank)
    elif source.source == "heisenberg_reduced":
        target = heisenberg_reduced_state(source.n_spins, source.keep)
    else:
        target = QuantumState.from_density_matrix(np.load(source.path))
    return VqsdProblem(target)


def build_vqe_problem(source: HamiltonianSourceConfig) -> VqeProblem:
    if source.source == "heisenberg":
        hamiltonian = heisenberg(source.n_spins)
    else:
        hamiltonian = load_hamiltonian(source.path)
    return VqeProblem.from_hamiltonian(hamiltonian, with_oracle=source.oracle)


def seed_generators(seed: int, count: int = 3) -> List[np.random.Generator]:
    """Independent generators for the environment, the agent and the problem."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _run_seed_job(config_data: Dict[str, Any], seed: int, output_dir: str, resume: bool) -> Dict[str, Any]:
    """Process-pool entry point; configs travel as plain dicts."""
    config = ExperimentConfig.model_validate(config_data)
    return ExperimentFramework(config, output_dir).run_seed(seed, resume=resume)


class ExperimentFramework:
    """
    Main framework class for the architecture-search engine.
    This class wires one experiment config to its runs.
    """

    def __init__(self, config: ExperimentConfig, output_dir: Optional[Union[str, Path]] = None, workers: int = 1):
        """
        Initialize the framework.

        Args:
            config: Validated experiment config
            output_dir: Output directory; the config's when omitted
            workers: Parallel seed workers
        """
        self.config = config
        self.output_dir = Path(output_dir or config.output_dir)
        self.workers = max(1, workers)

    def seed_dir(self, seed: int) -> Path:
        return self.output_dir / f"seed_{seed}"

    def build_environment(self, seed: int) -> Tuple[QasEnvironment, np.random.Generator]:
        """
        Environment for one seed plus the agent's generator.

        Returns:
            (environment, agent generator)
        """
        cfg = self.config
        env_rng, agent_rng, _ = seed_generators(seed)

        # Build the problem
        if cfg.problem_kind == "vqsd":
            problem = build_vqsd_problem(cfg.problem.state, seed)
        else:
            problem = build_vqe_problem(cfg.problem.hamiltonian)
        env = QasEnvironment(problem, cfg.env, cfg.optimizer, env_rng, noise=cfg.noise_spec())

        # Attach the curriculum for VQE runs
        if env.is_vqe and cfg.env.curriculum.enabled:
            cc = cfg.env.curriculum
            env.curriculum = CurriculumState.initial(
                env.reference_energy,
                xi1=cc.xi1,
                delta=cc.delta,
                kappa=cc.kappa,
                greedy_period=cc.greedy_period,
                delta_decrement=cc.delta_decrement,
                decrement_every=cc.decrement_every,
                patience=cc.patience,
                min_threshold=cc.min_threshold,
            )
        return env, agent_rng

    def build_agent(self, env: QasEnvironment, rng: np.random.Generator) -> BaseAgent:
        if self.config.task == "random-search":
            return RandomAgent(env.observation_size, env.action_count, rng)
        return DdqnAgent.from_config(self.config.agent, env.observation_size, env.action_count, rng)

    def run_seed(self, seed: int, resume: bool = False) -> Dict[str, Any]:
        """
        Run the configured task for one seed.

        Args:
            seed: Seed of the run
            resume: Continue from the seed's checkpoint (search tasks only)

        Returns:
            Seed summary
        """
        task = self.config.task
        # Fixed-ansatz and certification tasks have no episodes
        if task == "bench-lhea":
            return self.bench_lhea(seed)
        if task == "certify":
            return self.certify_seed(seed)

        # Create the environment and the agent
        env, agent_rng = self.build_environment(seed)
        agent = self.build_agent(env, agent_rng)
        return run_experiment(
            env,
            agent,
            self.config.episodes,
            seed,
            self.seed_dir(seed),
            checkpoint_every=self.config.checkpoint_every,
            resume=resume,
        )

    def bench_lhea(self, seed: int) -> Dict[str, Any]:
        """Optimize every configured fixed ansatz on the VQSD target and tabulate the results."""
        cfg = self.config
        _, _, rng = seed_generators(seed)
        problem = build_vqsd_problem(cfg.problem.state, seed)
        noise = cfg.noise_spec()
        true_vals = problem.true_eigenvalues()
        rows = []

        # Optimize each flavor and layer count
        for flavor in cfg.lhea.flavors:
            for layers in cfg.lhea.layers:
                spec = LheaSpec(layers, flavor)
                template = build_lhea(problem.n, spec)
                result = optimize_angles(
                    problem,
                    template,
                    cfg.optimizer.method,
                    cfg.optimizer.restarts,
                    rng,
                    cfg.optimizer.budget,
                    params=cfg.optimizer.spsa_params(),
                    noise=noise,
                )
                values, _ = eigen_readout(problem, template, result.best_point, noise)
                rows.append(
                    {
                        "flavor": flavor,
                        "layers": layers,
                        "cost": result.best_value,
                        "eigenvalue_error": eigenvalue_error(true_vals, values, len(true_vals)),
                        "gate_count": template.gate_count,
                        "cnot_count": template.cnot_count,
                        "depth": template.depth,
                        "parameters": lhea_parameter_count(problem.n, spec),
                        "fevals": result.fevals_used,
                        "success": result.best_value < cfg.env.threshold,
                    }
                )
                logger.info(f"LHEA {flavor} x{layers}: cost={result.best_value:.3e}")

        # Write the table
        out = self.seed_dir(seed)
        out.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(rows).to_csv(out / "bench_lhea.csv", index=False)
        return {"seed": seed, "rows": len(rows), "solved": sum(r["success"] for r in rows)}

    def certify_seed(self, seed: int) -> Dict[str, Any]:
        """Certify the candidate channel against the ideal one."""
        cfg = self.config
        cert = cfg.problem.certification
        _, _, rng = seed_generators(seed)

        # Build the channels
        ideal = build_channel(cfg.problem.ideal, rng)
        candidate = build_channel(cfg.problem.candidate, rng)

        # Choose the VQSD engine
        if cert.engine == "lhea":
            engine = LheaVqsdEngine(cfg.optimizer, cert.layers, cert.entangler, cert.threshold)
        else:
            engine = RlVqsdEngine(
                cfg.env,
                cfg.agent,
                cfg.optimizer,
                episodes=cert.episodes,
                threshold=cert.threshold,
                output_dir=self.seed_dir(seed) / "vqsd_search",
            )
        report = certify(ideal, candidate, engine, rng, ranks=cert.ranks or None, noise=cfg.noise_spec())

        # Write the report
        out = self.seed_dir(seed)
        out.mkdir(parents=True, exist_ok=True)
        (out / "certification.json").write_text(report.to_json())
        return {"seed": seed, "exact_fidelity": report.exact_fidelity, "converged": report.vqsd_converged}

    def run(self, resume: bool = False) -> List[Dict[str, Any]]:
        """
        Run every seed, write the manifest and the summary report.

        Args:
            resume: Continue each seed from its checkpoint

        Returns:
            One summary per seed
        """
        self.output_dir.mkdir(parents=True, exist_ok=True)

        # Write the manifest
        manifest = {
            "config_hash": config_hash(self.config),
            "code_version": __version__,
            "task": self.config.task,
            "seeds": self.config.seeds,
            "started_at": datetime.now().isoformat(),
            "finished_at": None,
            "resumed": resume,
        }
        self._write_manifest(manifest)
        log_run_event(logger, "run_start", {"task": self.config.task, "seeds": self.config.seeds})

        # Run the seeds
        seeds = self.config.seeds
        if self.workers == 1 or len(seeds) == 1:
            summaries = [self.run_seed(seed, resume=resume) for seed in seeds]
        else:
            data = self.config.model_dump(mode="json", by_alias=True)
            with ProcessPoolExecutor(max_workers=self.workers) as pool:
                futures = [
                    pool.submit(_run_seed_job, data, seed, str(self.output_dir), resume) for seed in seeds
                ]
                summaries = [f.result() for f in futures]

        # Close the manifest and summarize
        manifest["finished_at"] = datetime.now().isoformat()
        self._write_manifest(manifest)
        if self.config.task in ("vqsd", "vqe", "random-search"):
            self.report()
        log_run_event(logger, "run_done", {"task": self.config.task, "seeds": seeds})
        return summaries

    def _write_manifest(self, manifest: Dict[str, Any]) -> None:
        with open(self.output_dir / MANIFEST_NAME, "w") as f:
            json.dump(manifest, f, indent=2)

    def report(self) -> pd.DataFrame:
        """Aggregate the episode logs of every seed into summary.csv."""
        frame = summarize_runs(self.output_dir)
        frame.to_csv(self.output_dir / SUMMARY_NAME, index=False)
        return frame


def summarize_runs(output_dir: Union[str, Path]) -> pd.DataFrame:
    """
    Per seed and phase: episodes, successes, minimum error, first successful
    episode, and minimum depth and gate count among successful episodes.

    Raises:
        FileNotFoundError: If the directory holds no episode logs
    """
    output_dir = Path(output_dir)
    rows = []
    for seed_dir in sorted(output_dir.glob("seed_*")):
        seed = int(seed_dir.name.split("_", 1)[1])
        for phase in ("train", "test"):
            log = EpisodeLog(seed_dir / f"{phase}.csv")
            if not log.path.exists():
                continue
            episodes = log.read()
            solved = episodes[episodes["success"].astype(bool)]
            rows.append(
                {
                    "seed": seed,
                    "phase": phase,
                    "episodes": len(episodes),
                    "successes": len(solved),
                    "min_error": episodes["min_cost"].min() if len(episodes) else np.nan,
                    "first_success": solved["episode"].min() if len(solved) else np.nan,
                    "min_depth": solved["depth"].min() if len(solved) else np.nan,
                    "min_gate_count": solved["gate_count"].min() if len(solved) else np.nan,
                }
            )
    if not rows:
        raise FileNotFoundError(f"No episode logs under {output_dir}")
    return pd.DataFrame(rows)

