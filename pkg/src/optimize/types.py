"""
Shared optimizer types.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


@dataclass
class ObjectiveHandle:
    """
    Objective to minimize.

    Args:
        evaluate: Function of a real vector; deterministic for a fixed caller seed
        dimension: Length of the argument vector
        budget: Maximum number of evaluations
    """
    evaluate: Callable[[np.ndarray], float]
    dimension: int
    budget: int

    def __post_init__(self):
        if self.dimension < 0:
            raise ValueError(f"dimension must be non-negative, got {self.dimension}")
        if self.budget < 1:
            raise ValueError(f"budget must be positive, got {self.budget}")

    def check_point(self, x0: np.ndarray) -> np.ndarray:
        x0 = np.asarray(x0, dtype=float).ravel().copy()
        if x0.size != self.dimension:
            raise ValueError(f"Starting point has length {x0.size}, expected {self.dimension}")
        return x0


@dataclass
class OptimResult:
    """
    Outcome of one optimizer run.

    `trace` holds the best value seen after each iteration and `trace_fevals`
    the number of evaluations spent at that point.
    """
    best_value: float
    best_point: np.ndarray
    fevals_used: int
    trace: List[float] = field(default_factory=list)
    trace_fevals: List[int] = field(default_factory=list)

    def fevals_to_reach(self, target: float) -> Optional[int]:
        """Evaluations spent when the best value first dropped below `target`."""
        for value, fevals in zip(self.trace, self.trace_fevals):
            if value < target:
                return fevals
        return None


class _BestTracker:
    """Running minimum over evaluated points plus the trace bookkeeping."""

    def __init__(self):
        self.value = float("inf")
        self.point: Optional[np.ndarray] = None
        self.fevals = 0
        self.trace: List[float] = []
        self.trace_fevals: List[int] = []

    def observe(self, value: float, point: np.ndarray) -> None:
        self.fevals += 1
        if value < self.value:
            self.value = float(value)
            self.point = np.array(point, dtype=float)

    def mark(self) -> None:
        self.trace.append(self.value)
        self.trace_fevals.append(self.fevals)

    def result(self) -> OptimResult:
        return OptimResult(self.value, self.point, self.fevals, self.trace, self.trace_fevals)


class StageMode(str, Enum):
    """How the gain-schedule index behaves at a stage boundary."""
    RESET = "reset"
    CONTINUOUS = "continuous"


class SpsaParams(BaseModel):
    """SPSA and Adam-SPSA hyperparameters."""
    model_config = ConfigDict(populate_by_name=True, frozen=True)

    a: float = Field(..., gt=0, description="Step-size numerator")
    alpha: float = Field(..., gt=0, description="Step-size decay exponent")
    beta1: float = Field(0.9, gt=0, lt=1, description="First-moment decay")
    beta2: float = Field(0.999, gt=0, lt=1, description="Second-moment decay")
    c: float = Field(..., gt=0, description="Perturbation numerator")
    gamma_sp: float = Field(..., gt=0, description="Perturbation decay exponent")
    lam: float = Field(1.0, gt=0, alias="lambda", description="Per-stage decay of a, when enabled")
    max_fevals: int = Field(..., gt=0, description="Total evaluation budget")
    stages: List[int] = Field(default_factory=list, description="Per-stage evaluation budgets")
    mode: StageMode = Field(StageMode.RESET, description="Gain-schedule index at stage boundaries")
    A: float = Field(0.0, ge=0, description="Stability constant of the step-size schedule")
    use_lambda_decay: bool = Field(False, description="Scale a by lambda**stage")
    epsilon: float = Field(1e-8, gt=0, description="Adam denominator floor")
    shots: Optional[int] = Field(None, ge=1, description="Measurement shots per energy estimate the gains were tuned for")

    @field_validator("stages")
    @classmethod
    def validate_stages(cls, v):
        if any(s < 1 for s in v):
            raise ValueError(f"Stage budgets must be positive, got {v}")
        return v

    @model_validator(mode="after")
    def validate_budget(self):
        if sum(self.stages) > self.max_fevals:
            raise ValueError(
                f"Stage budgets sum to {sum(self.stages)}, above max_fevals={self.max_fevals}"
            )
        return self

    def gains(self, k: int, stage: int = 0) -> Tuple[float, float]:
        """(a_k, c_k) for schedule index k."""
        a = self.a * (self.lam ** stage if self.use_lambda_decay else 1.0)
        return a / (k + 1 + self.A) ** self.alpha, self.c / (k + 1) ** self.gamma_sp
