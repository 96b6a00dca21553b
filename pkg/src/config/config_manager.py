"""
Configuration manager for the quantum architecture search engine.
Handles loading and validating experiment files and environment settings.
"""

import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationInfo, field_validator, model_validator

from ..noise.channels import NOISE_PRESETS, NoiseSpec
from ..optimize.presets import get_preset
from ..optimize.types import SpsaParams

TASKS = ("vqsd", "vqe", "certify", "bench-lhea", "random-search")


def _resolve_path(value: Optional[str], info: ValidationInfo) -> Optional[str]:
    """Resolve a path against the config file's directory and require it to exist."""
    if value is None:
        return value
    path = Path(value)
    base_dir = (info.context or {}).get("base_dir")
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    if not path.is_file():
        raise ValueError(f"Referenced file does not exist: {path}")
    return str(path)


class StateSourceConfig(BaseModel):
    """Where the VQSD target state comes from."""
    source: Literal["random", "heisenberg_reduced", "file"] = Field("random", description="State source")
    n_qubits: int = Field(2, ge=1, le=10, description="Qubit count of the target")
    rank: Optional[int] = Field(None, ge=1, description="Rank of a random state; full rank when omitted")
    seed: Optional[int] = Field(None, description="Seed of a random state; the run seed when omitted")
    n_spins: int = Field(6, ge=2, description="Ring size for heisenberg_reduced")
    keep: List[int] = Field(default_factory=lambda: [0, 1, 2], description="Spins kept for heisenberg_reduced")
    path: Optional[str] = Field(None, description=".npy density matrix for source=file")

    @field_validator("path")
    @classmethod
    def validate_path(cls, v, info: ValidationInfo):
        return _resolve_path(v, info)

    @model_validator(mode="after")
    def validate_source(self):
        if self.source == "file" and self.path is None:
            raise ValueError("source=file requires a path")
        if self.source == "heisenberg_reduced":
            if self.n_spins % 2:
                raise ValueError(f"n_spins must be even, got {self.n_spins}")
            if not self.keep or max(self.keep) >= self.n_spins or min(self.keep) < 0:
                raise ValueError(f"keep {self.keep} out of range for {self.n_spins} spins")
            self.n_qubits = len(set(self.keep))
        return self


class HamiltonianSourceConfig(BaseModel):
    """Where the VQE Hamiltonian comes from."""
    source: Literal["file", "heisenberg"] = Field("file", description="Hamiltonian source")
    path: Optional[str] = Field(None, description="Pauli-string file for source=file")
    n_spins: int = Field(2, ge=2, description="Ring size for source=heisenberg")
    oracle: bool = Field(True, description="Compute the exact ground energy")

    @field_validator("path")
    @classmethod
    def validate_path(cls, v, info: ValidationInfo):
        return _resolve_path(v, info)

    @model_validator(mode="after")
    def validate_source(self):
        if self.source == "file" and self.path is None:
            raise ValueError("source=file requires a path")
        return self


class ChannelSpecConfig(BaseModel):
    """A builtin channel or a composition of channels."""
    kind: Literal[
        "identity", "unitary", "depolarizing", "amplitude_damping", "random_x", "random", "compose"
    ] = Field(..., description="Channel kind")
    n_qubits: int = Field(1, ge=1, le=3, description="Qubit count")
    gamma: float = Field(0.0, ge=0.0, le=1.0, description="Noise strength")
    gates: List[Tuple[str, List[int], Optional[float]]] = Field(
        default_factory=list, description="Circuit of a unitary channel as (kind, qubits, angle)"
    )
    kraus_rank: int = Field(2, ge=1, description="Kraus rank of a random channel")
    seed: Optional[int] = Field(None, description="Seed of a random channel; the run seed when omitted")
    parts: List["ChannelSpecConfig"] = Field(default_factory=list, description="Channels applied in order")

    @model_validator(mode="after")
    def validate_kind(self):
        if self.kind == "compose" and not self.parts:
            raise ValueError("compose needs at least one part")
        for part in self.parts:
            if part.n_qubits != self.n_qubits:
                raise ValueError(f"compose part acts on {part.n_qubits} qubits, expected {self.n_qubits}")
        for _, qubits, _ in self.gates:
            if any(not 0 <= q < self.n_qubits for q in qubits):
                raise ValueError(f"gate qubits {qubits} out of range for {self.n_qubits} qubits")
        return self


ChannelSpecConfig.model_rebuild()


class CertificationConfig(BaseModel):
    """VQSD engine and ranks used to certify a candidate channel."""
    engine: Literal["lhea", "rl"] = Field("lhea", description="VQSD engine")
    layers: int = Field(2, ge=1, description="Layers of the fixed certification ansatz")
    entangler: Literal["CNOT", "CZ"] = Field("CNOT", description="Entangler of the ansatz")
    ranks: List[int] = Field(default_factory=list, description="Truncation ranks; all ranks when empty")
    episodes: int = Field(200, ge=1, description="Training episodes of the rl engine")
    threshold: float = Field(1e-4, gt=0, description="VQSD cost regarded as converged")


class ProblemConfig(BaseModel):
    """The variational problem."""
    kind: Optional[Literal["vqsd", "vqe"]] = Field(None, description="Problem kind for random-search")
    state: Optional[StateSourceConfig] = None
    hamiltonian: Optional[HamiltonianSourceConfig] = None
    ideal: Optional[ChannelSpecConfig] = None
    candidate: Optional[ChannelSpecConfig] = None
    certification: CertificationConfig = Field(default_factory=CertificationConfig)


class RandomHaltingConfig(BaseModel):
    """Negative-binomial episode lengths."""
    enabled: bool = Field(False, description="Draw each episode length")
    p: Optional[float] = Field(None, gt=0.0, le=1.0, description="Success probability")
    n_s: Optional[int] = Field(None, ge=1, description="Number of successes")


class CurriculumConfig(BaseModel):
    """Moving success threshold for VQE."""
    enabled: bool = Field(True, description="Use the moving threshold")
    xi1: float = Field(0.005, gt=0, description="Initial threshold")
    delta: float = Field(1e-4, ge=0, description="Amortization radius")
    delta_decrement: float = Field(1e-5, ge=0, description="Radius decrement")
    decrement_every: int = Field(50, ge=1, description="Solved episodes between decrements")
    kappa: float = Field(10.0, gt=0, description="Shift radius")
    greedy_period: int = Field(500, ge=1, description="Episodes between greedy shifts")
    patience: Optional[int] = Field(None, ge=1, description="Failures at the greedy threshold before a reset")
    min_threshold: float = Field(1e-10, gt=0, description="Positive floor of the threshold")
    use_fake_min: bool = Field(True, description="Measure errors from the fake minimum instead of the oracle")


class EnvConfig(BaseModel):
    """Episode dynamics."""
    max_steps: int = Field(20, ge=1, description="Steps per episode")
    max_depth: Optional[int] = Field(None, ge=1, description="Depth slices of the observation; max_steps when omitted")
    reward: Literal["dense_log", "sparse"] = Field("dense_log", description="Reward function")
    threshold: float = Field(1e-5, description="Success threshold (VQSD cost or fixed VQE error)")
    success_bonus: float = Field(500.0, description="Dense reward on success")
    illegal_actions: bool = Field(True, description="Mask immediately cancelling repeats")
    append_cost: Optional[bool] = Field(None, description="Append the last cost; on for VQE when omitted")
    encoding: Literal["tensor", "integer"] = Field("tensor", description="Observation encoding of the circuit")
    allowed_pairs: Optional[List[Tuple[int, int]]] = Field(None, description="Allowed CNOT (control, target) pairs")
    random_halting: RandomHaltingConfig = Field(default_factory=RandomHaltingConfig)
    curriculum: CurriculumConfig = Field(default_factory=CurriculumConfig)

    @model_validator(mode="after")
    def validate_depth(self):
        if self.max_depth is not None and self.max_depth < self.max_steps:
            raise ValueError(f"max_depth={self.max_depth} cannot hold {self.max_steps} steps")
        return self

    @property
    def depth_slices(self) -> int:
        return self.max_depth or self.max_steps


class AgentSettings(BaseModel):
    """DDQN hyperparameters."""
    network: Literal["desk", "wide", "custom"] = Field("desk", description="Hidden-layer preset")
    hidden_layers: List[int] = Field(default_factory=lambda: [128, 128, 128], description="Sizes for network=custom")
    dropout: float = Field(0.1, ge=0.0, lt=1.0, description="Dropout on hidden layers")
    gamma: float = Field(0.88, ge=0.0, lt=1.0, description="Discount factor")
    epsilon_start: float = Field(1.0, ge=0.0, le=1.0)
    epsilon_decay: float = Field(0.99995, gt=0.0, le=1.0, description="Per-step multiplicative decay")
    epsilon_min: float = Field(0.05, ge=0.0, le=1.0)
    target_update: Literal["hard", "soft"] = Field("hard", description="Target network refresh")
    target_period: int = Field(500, ge=1, description="Actions between hard copies")
    tau: float = Field(0.01, gt=0.0, le=1.0, description="Soft-update rate")
    batch_size: int = Field(32, ge=1)
    learning_rate: float = Field(1e-4, ge=0.0)
    n_step: int = Field(1, ge=1, description="Return horizon")
    replay_capacity: int = Field(20000, ge=1)
    smooth_l1_beta: float = Field(1.0, gt=0.0)

    @model_validator(mode="after")
    def validate_epsilon(self):
        if self.epsilon_min > self.epsilon_start:
            raise ValueError("epsilon_min cannot exceed epsilon_start")
        return self

    def hidden_sizes(self) -> List[int]:
        if self.network == "desk":
            return [128] * 3
        if self.network == "wide":
            return [1000] * 5
        return list(self.hidden_layers)


class OptimizerConfig(BaseModel):
    """Angle optimizer used after every action."""
    method: Literal["simplex", "spsa", "adam_spsa"] = Field("simplex")
    budget: int = Field(400, ge=1, description="Evaluations per run")
    restarts: int = Field(1, ge=1, description="Runs per optimization")
    warm_start: bool = Field(True, description="Start the first run from the previous angles")
    preset: Optional[str] = Field(None, description="Named SPSA preset")
    overrides: Dict[str, Any] = Field(default_factory=dict, description="SpsaParams fields replacing the preset")

    @model_validator(mode="after")
    def validate_preset(self):
        if self.preset is not None:
            try:
                get_preset(self.preset)
            except KeyError as e:
                raise ValueError(str(e)) from None
        if self.method != "simplex":
            self.spsa_params()
        return self

    def spsa_params(self) -> Optional[SpsaParams]:
        """Preset plus overrides, or None for the simplex."""
        if self.method == "simplex":
            return None
        if self.preset is None and not self.overrides:
            return None
        base = get_preset(self.preset).model_dump(by_alias=True) if self.preset else {}
        base.update(self.overrides)
        base.setdefault("max_fevals", self.budget)
        return SpsaParams(**base)


class NoiseConfig(BaseModel):
    """Per-gate noise and shot count."""
    preset: Optional[str] = Field(None, description="Named noise preset")
    one_qubit_depolarizing: float = Field(0.0, ge=0.0, le=1.0)
    two_qubit_depolarizing: float = Field(0.0, ge=0.0, le=1.0)
    amplitude_damping: float = Field(0.0, ge=0.0, le=1.0)
    random_x: float = Field(0.0, ge=0.0, le=1.0)
    shots: Optional[int] = Field(None, ge=1)

    @field_validator("preset")
    @classmethod
    def validate_preset(cls, v):
        if v is not None and v not in NOISE_PRESETS:
            raise ValueError(f"Unknown noise preset {v!r}; available: {', '.join(NOISE_PRESETS)}")
        return v

    def to_noise_spec(self, default_shots: Optional[int] = None) -> Optional[NoiseSpec]:
        """
        NoiseSpec for the simulator, or None when nothing is configured.

        Args:
            default_shots: Shot count used for noisy runs that leave `shots` unset
        """
        values = {
            "one_qubit_depolarizing": self.one_qubit_depolarizing,
            "two_qubit_depolarizing": self.two_qubit_depolarizing,
            "amplitude_damping": self.amplitude_damping,
            "random_x": self.random_x,
        }
        # Unset strengths fall back to the preset
        if self.preset is not None:
            preset = NOISE_PRESETS[self.preset]
            for key in values:
                values[key] = values[key] or getattr(preset, key)
        if not any(values.values()) and self.shots is None:
            return None
        shots = self.shots if self.shots is not None else default_shots
        return NoiseSpec(shots=shots, **values)


class LheaBenchConfig(BaseModel):
    """Grid of fixed ansatz runs for the bench-lhea task."""
    flavors: List[Literal["RYCZ", "RZRX_CNOT", "RYRZRY_CNOT"]] = Field(
        default_factory=lambda: ["RYCZ", "RZRX_CNOT", "RYRZRY_CNOT"]
    )
    layers: List[int] = Field(default_factory=lambda: [1, 2, 3])

    @field_validator("layers")
    @classmethod
    def validate_layers(cls, v):
        if not v or any(n < 1 for n in v):
            raise ValueError(f"layers must be a nonempty list of positive integers, got {v}")
        return v


class ExperimentConfig(BaseModel):
    """Main configuration of one experiment."""
    task: Literal["vqsd", "vqe", "certify", "bench-lhea", "random-search"]
    problem: ProblemConfig
    env: EnvConfig = Field(default_factory=EnvConfig)
    agent: AgentSettings = Field(default_factory=AgentSettings)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    lhea: LheaBenchConfig = Field(default_factory=LheaBenchConfig)
    seeds: List[int] = Field(..., description="One run per seed")
    episodes: int = Field(100, ge=0, description="Training episodes per seed")
    checkpoint_every: int = Field(50, ge=1, description="Episodes between checkpoints")
    output_dir: str = Field("runs", description="Directory for all outputs")

    @field_validator("seeds")
    @classmethod
    def validate_seeds(cls, v):
        if not v:
            raise ValueError("seeds must not be empty")
        if len(set(v)) != len(v):
            raise ValueError(f"seeds must be distinct, got {v}")
        return v

    @model_validator(mode="after")
    def validate_problem(self):
        p = self.problem
        kind = self.problem_kind
        if kind == "vqsd" and p.state is None:
            raise ValueError(f"task {self.task} needs problem.state")
        if kind == "vqe" and p.hamiltonian is None:
            raise ValueError(f"task {self.task} needs problem.hamiltonian")
        if kind == "certify" and (p.ideal is None or p.candidate is None):
            raise ValueError("task certify needs problem.ideal and problem.candidate")
        if self.task == "certify" and p.ideal.n_qubits != p.candidate.n_qubits:
            raise ValueError("ideal and candidate channels must act on the same number of qubits")
        return self

    def noise_spec(self) -> Optional[NoiseSpec]:
        """Noise model of the run; an SPSA preset supplies the shot count when `noise.shots` is unset."""
        params = self.optimizer.spsa_params()
        return self.noise.to_noise_spec(default_shots=params.shots if params is not None else None)

    @property
    def problem_kind(self) -> str:
        """vqsd, vqe or certify."""
        if self.task in ("vqsd", "vqe", "certify"):
            return self.task
        if self.task == "bench-lhea":
            return "vqsd"
        if self.problem.kind is None:
            raise ValueError("random-search needs problem.kind")
        return self.problem.kind


class EnvironmentSettings(BaseModel):
    """Process-level settings read from the environment."""
    log_level: str = Field("INFO", description="Console log level")
    log_file: Optional[str] = Field(None, description="Optional log file")
    workers: int = Field(1, ge=1, description="Parallel seed workers")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v):
        v = v.upper()
        if v not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"Unknown log level {v}")
        return v


class ConfigManager:
    """Manager for loading and accessing configuration."""

    def __init__(self, config_path: Optional[Union[str, Path]] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to a JSON experiment file. If None, only the
                environment settings are loaded.
        """
        self.config: Optional[ExperimentConfig] = None
        self.config_path = Path(config_path) if config_path else None
        self.settings = self._load_settings()
        if self.config_path is not None:
            self.config = self.load_from_file(self.config_path)

    @staticmethod
    def _load_settings() -> EnvironmentSettings:
        # Load environment variables
        load_dotenv()
        return EnvironmentSettings(
            log_level=os.getenv("LOG_LEVEL", "INFO"),
            log_file=os.getenv("LOG_FILE") or None,
            workers=int(os.getenv("QAS_WORKERS", "1")),
        )

    @staticmethod
    def load_from_file(config_path: Union[str, Path]) -> ExperimentConfig:
        """
        Load and validate an experiment file.

        Relative file references inside the config resolve against the
        directory of the config file.

        Raises:
            FileNotFoundError: When the file does not exist
            pydantic.ValidationError: When the content is invalid
        """
        config_path = Path(config_path)
        if not config_path.is_file():
            raise FileNotFoundError(f"Config file not found: {config_path}")
        # Read the file
        with open(config_path, "r", encoding="utf-8") as f:
            config_data = json.load(f)

        # Validate, resolving paths against the config directory
        return ExperimentConfig.model_validate(
            config_data, context={"base_dir": str(config_path.parent.resolve())}
        )

    def get_config(self) -> ExperimentConfig:
        if self.config is None:
            raise ValueError("No experiment config loaded")
        return self.config

    def save_config(self, config_path: Union[str, Path], config: Optional[ExperimentConfig] = None):
        """
        Save a configuration to a file.

        Args:
            config_path: Path to save the configuration file.
            config: Configuration to save; the loaded one when omitted.
        """
        # Save configuration to file
        config = config or self.get_config()
        with open(config_path, "w", encoding="utf-8") as f:
            json.dump(config.model_dump(mode="json", by_alias=True), f, indent=2)


def config_hash(config: ExperimentConfig) -> str:
    """SHA-256 of the canonical JSON form of a config."""
    canonical = json.dumps(config.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
