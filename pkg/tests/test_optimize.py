"""
Unit tests for the angle optimizers.
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np
from pydantic import ValidationError

# Add the parent directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from src.optimize.presets import SPSA_PRESETS, get_preset
from src.optimize.registry import OptimizerRegistry, default_registry, optimize_angles
from src.optimize.simplex import simplex_minimize
from src.optimize.spsa import adam_spsa_minimize, spsa_minimize
from src.optimize.types import ObjectiveHandle, OptimResult, SpsaParams
from src.quantum.gates import Circuit, Gate
from src.quantum.states import QuantumState, random_density_matrix
from src.vqa.problems import VqsdProblem


def quadratic(x: np.ndarray) -> float:
    return float(np.sum(np.asarray(x) ** 2))


def rosenbrock(x: np.ndarray) -> float:
    return float(100.0 * (x[1] - x[0] ** 2) ** 2 + (1.0 - x[0]) ** 2)


class TestSpsa(unittest.TestCase):
    """Test cases for SPSA and Adam-SPSA."""

    def setUp(self):
        self.params = SpsaParams(a=0.05, alpha=0.2, c=0.01, gamma_sp=0.101, max_fevals=2000)

    def test_quadratic_converges(self):
        obj = ObjectiveHandle(quadratic, 10, 2000)
        result = spsa_minimize(obj, np.ones(10), self.params, np.random.default_rng(0))
        self.assertLess(result.best_value, 1e-3)
        self.assertLessEqual(result.fevals_used, 2000)

    def test_budget_is_respected(self):
        calls = []

        def counted(x):
            calls.append(1)
            return quadratic(x)

        obj = ObjectiveHandle(counted, 3, 101)
        result = spsa_minimize(obj, np.ones(3), self.params, np.random.default_rng(1))
        self.assertEqual(len(calls), result.fevals_used)
        self.assertLessEqual(result.fevals_used, 101)

    def test_same_seed_same_result(self):
        obj = ObjectiveHandle(quadratic, 4, 200)
        a = spsa_minimize(obj, np.ones(4), self.params, np.random.default_rng(7))
        b = spsa_minimize(obj, np.ones(4), self.params, np.random.default_rng(7))
        self.assertEqual(a.best_value, b.best_value)
        np.testing.assert_array_equal(a.best_point, b.best_point)

    def test_budget_too_small(self):
        obj = ObjectiveHandle(quadratic, 2, 1)
        with self.assertRaises(ValueError):
            spsa_minimize(obj, np.ones(2), self.params, np.random.default_rng(0))

    def test_adam_spsa_stages(self):
        params = get_preset("H2-2")
        obj = ObjectiveHandle(quadratic, 4, 10 ** 6)
        result = adam_spsa_minimize(obj, np.ones(4), params, np.random.default_rng(3))
        self.assertLessEqual(result.fevals_used, sum(params.stages))
        self.assertLess(result.best_value, quadratic(np.ones(4)))

    def test_adam_spsa_needs_stages(self):
        obj = ObjectiveHandle(quadratic, 2, 100)
        with self.assertRaises(ValueError):
            adam_spsa_minimize(obj, np.ones(2), self.params, np.random.default_rng(0))

    def test_adam_spsa_needs_fewer_evaluations(self):
        budget = 2000
        shared = dict(a=0.5, alpha=0.602, c=0.01, gamma_sp=0.101, max_fevals=budget)
        plain = SpsaParams(**shared)
        staged = SpsaParams(**shared, beta1=0.5, beta2=0.9, stages=[1000, 600, 400], mode="continuous")
        spsa_counts, adam_counts = [], []
        for seed in range(20):
            obj = ObjectiveHandle(quadratic, 10, budget)
            spsa = spsa_minimize(obj, np.ones(10), plain, np.random.default_rng(seed))
            adam = adam_spsa_minimize(obj, np.ones(10), staged, np.random.default_rng(seed))
            spsa_counts.append(spsa.fevals_to_reach(1e-2) or budget + 1)
            adam_counts.append(adam.fevals_to_reach(1e-2) or budget + 1)
        self.assertLess(np.median(adam_counts), np.median(spsa_counts))
        self.assertLessEqual(np.median(adam_counts), budget)

    def test_trace_is_monotone(self):
        obj = ObjectiveHandle(quadratic, 3, 300)
        result = spsa_minimize(obj, np.ones(3), self.params, np.random.default_rng(2))
        self.assertTrue(all(b <= a for a, b in zip(result.trace, result.trace[1:])))
        self.assertTrue(all(b >= a for a, b in zip(result.trace_fevals, result.trace_fevals[1:])))


class TestSimplex(unittest.TestCase):
    """Test cases for the Nelder-Mead wrapper."""

    def test_one_dimension(self):
        obj = ObjectiveHandle(lambda x: (float(x[0]) - 1.0) ** 2, 1, 200)
        result = simplex_minimize(obj, np.array([3.0]))
        self.assertLess(result.best_value, 1e-8)
        self.assertLessEqual(result.fevals_used, 200)

    def test_rosenbrock(self):
        obj = ObjectiveHandle(rosenbrock, 2, 2000)
        result = simplex_minimize(obj, np.array([-1.2, 1.0]))
        self.assertLess(result.best_value, 1e-6)
        np.testing.assert_allclose(result.best_point, [1.0, 1.0], atol=1e-2)

    def test_zero_dimension_rejected(self):
        with self.assertRaises(ValueError):
            simplex_minimize(ObjectiveHandle(lambda x: 0.0, 0, 10), np.zeros(0))


class TestPresets(unittest.TestCase):
    """Test cases for the SPSA presets and parameters."""

    def test_staged_budget_is_raised(self):
        self.assertEqual(get_preset("LiH-4").max_fevals, 1667)
        self.assertEqual(get_preset("H2-2").max_fevals, 500)
        self.assertEqual(get_preset("H2-2").shots, 10 ** 3)
        self.assertEqual(get_preset("LiH-6").shots, 10 ** 8)
        for params in SPSA_PRESETS.values():
            self.assertLessEqual(sum(params.stages), params.max_fevals)

    def test_unknown_preset(self):
        with self.assertRaises(KeyError):
            get_preset("He-1")

    def test_stage_sum_above_budget(self):
        with self.assertRaises(ValidationError):
            SpsaParams(a=1.0, alpha=0.6, c=0.1, gamma_sp=0.1, max_fevals=10, stages=[8, 8])

    def test_lambda_alias_and_gains(self):
        params = SpsaParams(a=1.0, alpha=1.0, c=0.5, gamma_sp=1.0, max_fevals=10, **{"lambda": 0.5})
        self.assertEqual(params.lam, 0.5)
        self.assertEqual(params.gains(1), (0.5, 0.25))
        decayed = params.model_copy(update={"use_lambda_decay": True})
        self.assertEqual(decayed.gains(0, stage=2), (0.25, 0.5))


class TestOptimizeAngles(unittest.TestCase):
    """Test cases for the environment-facing entry point."""

    def setUp(self):
        self.problem = VqsdProblem(random_density_matrix(1, np.random.default_rng(9)))
        self.template = Circuit(1, [Gate("RZ", (0,), 0.0), Gate("RY", (0,), 0.0)])

    def test_diagonalizes_single_qubit_state(self):
        result = optimize_angles(self.problem, self.template, "simplex", 2, np.random.default_rng(0), 400)
        self.assertLess(result.best_value, 1e-8)
        self.assertLessEqual(result.fevals_used, 800)

    def test_circuit_without_rotations(self):
        problem = VqsdProblem(QuantumState.basis("0", density=True))
        result = optimize_angles(problem, Circuit(1, [Gate("H", (0,))]), "simplex", 3, np.random.default_rng(0), 50)
        self.assertEqual(result.fevals_used, 1)
        self.assertAlmostEqual(result.best_value, 0.5, places=12)

    def test_warm_start_is_used(self):
        rng = np.random.default_rng(0)
        seen = []
        registry = OptimizerRegistry()

        def first_point(obj, x0, rng, params):
            seen.append(np.array(x0))
            value = obj.evaluate(x0)
            return OptimResult(value, np.array(x0), 1, [value], [1])

        registry.register_function("first_point", "Evaluates the start point", first_point)
        optimize_angles(
            self.problem, self.template, "first_point", 2, rng, 10, initial_point=np.array([0.1, 0.2]), registry=registry
        )
        np.testing.assert_allclose(seen[0], [0.1, 0.2])
        self.assertTrue(np.all((seen[1] >= 0) & (seen[1] < 2 * math.pi)))

    def test_unknown_method(self):
        with self.assertRaises(KeyError):
            optimize_angles(self.problem, self.template, "bfgs", 1, np.random.default_rng(0), 10)

    def test_restarts_must_be_positive(self):
        with self.assertRaises(ValueError):
            optimize_angles(self.problem, self.template, "simplex", 0, np.random.default_rng(0), 10)

    def test_default_registry_names(self):
        self.assertEqual(sorted(default_registry().names()), ["adam_spsa", "simplex", "spsa"])


if __name__ == "__main__":
    unittest.main()
