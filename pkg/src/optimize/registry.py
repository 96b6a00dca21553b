"""
Optimizer registry and the angle-tuning entry point used by the environment.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Union

import numpy as np

from ..noise.channels import NoiseSpec
from ..quantum.gates import Circuit
from ..vqa.problems import VqeProblem, VqsdProblem, vqe_energy, vqsd_cost
from .presets import get_preset
from .simplex import simplex_minimize
from .spsa import adam_spsa_minimize, spsa_minimize
from .types import ObjectiveHandle, OptimResult, SpsaParams

logger = logging.getLogger(__name__)

OptimizerFunction = Callable[[ObjectiveHandle, np.ndarray, np.random.Generator, Optional[SpsaParams]], OptimResult]

DEFAULT_SPSA_PRESET = "H2-2"


class Optimizer:
    """A named optimizer with a uniform call signature."""

    def __init__(self, name: str, description: str, function: OptimizerFunction, needs_params: bool = False):
        """
        Initialize an optimizer entry.

        Args:
            name: Registry name
            description: One-line description
            function: Callable (obj, x0, rng, params) -> OptimResult
            needs_params: Whether the optimizer reads SpsaParams
        """
        self.name = name
        self.description = description
        self.function = function
        self.needs_params = needs_params

    def __call__(
        self,
        obj: ObjectiveHandle,
        x0: np.ndarray,
        rng: np.random.Generator,
        params: Optional[SpsaParams] = None,
    ) -> OptimResult:
        if self.needs_params and params is None:
            params = get_preset(DEFAULT_SPSA_PRESET)
        return self.function(obj, x0, rng, params)


class OptimizerRegistry:
    """Registry of optimizers by name."""

    def __init__(self):
        self.optimizers: Dict[str, Optimizer] = {}

    def register_optimizer(self, optimizer: Optimizer) -> None:
        self.optimizers[optimizer.name] = optimizer

    def register_function(
        self,
        name: str,
        description: str,
        function: OptimizerFunction,
        needs_params: bool = False,
    ) -> Optimizer:
        """
        Register a function as an optimizer.

        Args:
            name: Registry name
            description: One-line description
            function: Callable (obj, x0, rng, params) -> OptimResult
            needs_params: Whether the optimizer reads SpsaParams

        Returns:
            The registered optimizer
        """
        optimizer = Optimizer(name, description, function, needs_params)
        self.register_optimizer(optimizer)
        return optimizer

    def get_optimizer(self, name: str) -> Optimizer:
        """
        Get an optimizer by name.

        Raises:
            KeyError: For an unregistered name
        """
        if name not in self.optimizers:
            raise KeyError(f"Unknown optimizer {name!r}; registered: {', '.join(self.optimizers)}")
        return self.optimizers[name]

    def names(self) -> List[str]:
        return list(self.optimizers)


def default_registry() -> OptimizerRegistry:
    """Registry holding spsa, adam_spsa and simplex."""
    registry = OptimizerRegistry()
    registry.register_function(
        "spsa",
        "Simultaneous-perturbation stochastic approximation",
        lambda obj, x0, rng, params: spsa_minimize(obj, x0, params, rng),
        needs_params=True,
    )
    registry.register_function(
        "adam_spsa",
        "Multistage SPSA with Adam moments",
        lambda obj, x0, rng, params: adam_spsa_minimize(obj, x0, params, rng),
        needs_params=True,
    )
    registry.register_function(
        "simplex",
        "Nelder-Mead simplex with restarts",
        lambda obj, x0, rng, params: simplex_minimize(obj, x0),
    )
    return registry


_DEFAULT_REGISTRY = default_registry()


def problem_objective(
    problem: Union[VqsdProblem, VqeProblem],
    circuit: Circuit,
    noise: Optional[NoiseSpec] = None,
    rng: Optional[np.random.Generator] = None,
) -> Callable[[np.ndarray], float]:
    """Cost of `circuit` with the given angles for either problem kind."""
    if isinstance(problem, VqsdProblem):
        return lambda angles: vqsd_cost(problem, circuit, angles, noise)
    if isinstance(problem, VqeProblem):
        return lambda angles: vqe_energy(problem, circuit, angles, noise, rng)
    raise TypeError(f"Unsupported problem type: {type(problem).__name__}")


def optimize_angles(
    problem: Union[VqsdProblem, VqeProblem],
    circuit: Circuit,
    method: str,
    restarts: int,
    rng: np.random.Generator,
    budget: int,
    params: Optional[SpsaParams] = None,
    noise: Optional[NoiseSpec] = None,
    initial_point: Optional[np.ndarray] = None,
    registry: Optional[OptimizerRegistry] = None,
) -> OptimResult:
    """
    Best result over several optimizer runs on the circuit's angles.

    The first run starts from `initial_point` when given; every other run
    starts uniformly at random in [0, 2*pi)^d. A circuit without rotations is
    evaluated once.

    Args:
        problem: VQSD or VQE problem
        circuit: Circuit template
        method: Registered optimizer name
        restarts: Number of runs, at least 1
        rng: Generator for starting points, perturbations and shot noise
        budget: Evaluation budget per run
        params: SPSA hyperparameters for the SPSA-based methods
        noise: Optional noise model for the cost evaluation
        initial_point: Warm start for the first run
        registry: Optimizer lookup; the built-in registry when omitted

    Returns:
        The best run, with fevals_used summed over all runs and the traces chained
    """
    if restarts < 1:
        raise ValueError(f"restarts must be positive, got {restarts}")
    objective = problem_objective(problem, circuit, noise, rng)
    d = circuit.num_parameters
    if d == 0:
        value = float(objective(np.zeros(0)))
        return OptimResult(value, np.zeros(0), 1, [value], [1])

    optimizer = (registry or _DEFAULT_REGISTRY).get_optimizer(method)
    handle = ObjectiveHandle(objective, d, budget)
    best: Optional[OptimResult] = None
    trace: List[float] = []
    trace_fevals: List[int] = []
    total = 0
    for run in range(restarts):
        if run == 0 and initial_point is not None:
            x0 = handle.check_point(initial_point)
        else:
            x0 = rng.uniform(0.0, 2.0 * math.pi, size=d)
        result = optimizer(handle, x0, rng, params)
        running = best.best_value if best is not None else math.inf
        for value, fevals in zip(result.trace, result.trace_fevals):
            running = min(running, value)
            trace.append(running)
            trace_fevals.append(total + fevals)
        total += result.fevals_used
        if best is None or result.best_value < best.best_value:
            best = result
    logger.debug(f"{method} over {restarts} run(s): best {best.best_value:.3e} in {total} evaluations")
    return OptimResult(best.best_value, best.best_point, total, trace, trace_fevals)
