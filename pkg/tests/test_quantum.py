"""
Unit tests for gates, circuits, states and the simulator.
"""

import math
import sys
import unittest
from pathlib import Path

import numpy as np

# Add the parent directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from src.quantum.gates import Circuit, Gate, GateKind, rotation_matrix
from src.quantum.simulator import apply_gate, run_circuit
from src.quantum.states import (
    QuantumState,
    dephase,
    diagonal_elements,
    partial_trace,
    purity,
    random_density_matrix,
    states_equal_up_to_phase,
)


def bell_circuit() -> Circuit:
    return Circuit(2, [Gate("H", (0,)), Gate("CNOT", (0, 1))])


class TestGates(unittest.TestCase):
    """Test cases for gate construction."""

    def test_rotation_requires_angle(self):
        with self.assertRaises(ValueError):
            Gate(GateKind.RX, (0,))
        with self.assertRaises(ValueError):
            Gate(GateKind.CNOT, (0, 1), 0.3)

    def test_arity_and_distinct_qubits(self):
        with self.assertRaises(ValueError):
            Gate("CNOT", (0,))
        with self.assertRaises(ValueError):
            Gate("CNOT", (1, 1))

    def test_non_finite_angle_rejected(self):
        with self.assertRaises(ValueError):
            Gate("RY", (0,), float("nan"))

    def test_rotation_matrices_are_unitary(self):
        for kind in (GateKind.RX, GateKind.RY, GateKind.RZ):
            m = rotation_matrix(kind, 0.731)
            np.testing.assert_allclose(m @ m.conj().T, np.eye(2), atol=1e-12)

    def test_inverse_gate(self):
        gate = Gate("RZ", (0,), 0.4)
        product = gate.inverse().matrix() @ gate.matrix()
        np.testing.assert_allclose(product, np.eye(2), atol=1e-12)


class TestCircuit(unittest.TestCase):
    """Test cases for circuit bookkeeping."""

    def test_depth_moments(self):
        circuit = Circuit(3)
        circuit.append(Gate("RX", (0,), 0.1)).append(Gate("RX", (0,), 0.2))
        self.assertEqual(circuit.depth, 2)
        circuit.append(Gate("CNOT", (0, 2)))
        self.assertEqual(circuit.moments, [3, 0, 3])
        circuit.append(Gate("RY", (1,), 0.3))
        self.assertEqual(circuit.depth, 3)
        self.assertEqual(circuit.depth, circuit.recompute_depth())

    def test_counts(self):
        circuit = bell_circuit().append(Gate("RY", (1,), 0.5)).append(Gate("CZ", (0, 1)))
        self.assertEqual(circuit.gate_count, 4)
        self.assertEqual(circuit.rotation_count, 1)
        self.assertEqual(circuit.cnot_count, 1)
        self.assertEqual(circuit.num_parameters, 1)

    def test_bind_keeps_structure(self):
        circuit = Circuit(2, [Gate("RX", (0,), 0.0), Gate("CNOT", (0, 1)), Gate("RZ", (1,), 0.0)])
        bound = circuit.bind([0.3, -0.2])
        self.assertEqual(bound.structure(), circuit.structure())
        np.testing.assert_allclose(bound.angles(), [0.3, -0.2])
        np.testing.assert_allclose(circuit.angles(), [0.0, 0.0])
        with self.assertRaises(ValueError):
            circuit.bind([0.1])

    def test_out_of_range_qubit(self):
        with self.assertRaises(IndexError):
            Circuit(2).append(Gate("H", (2,)))

    def test_qubit_count_bounds(self):
        with self.assertRaises(ValueError):
            Circuit(0)
        with self.assertRaises(ValueError):
            Circuit(11)


class TestStates(unittest.TestCase):
    """Test cases for state operations."""

    def test_basis_ordering(self):
        state = QuantumState.basis("01")
        self.assertEqual(int(np.argmax(np.abs(state.data))), 1)

    def test_validation(self):
        with self.assertRaises(ValueError):
            QuantumState.from_statevector([1.0, 1.0])
        with self.assertRaises(ValueError):
            QuantumState.from_density_matrix(np.diag([1.5, -0.5]))
        with self.assertRaises(ValueError):
            QuantumState.from_statevector([1.0, 0.0, 0.0])

    def test_purity(self):
        self.assertAlmostEqual(purity(QuantumState.zero(2, density=True)), 1.0)
        self.assertAlmostEqual(purity(QuantumState.maximally_mixed(2)), 0.25)

    def test_partial_trace_of_bell_pair(self):
        bell = run_circuit(bell_circuit(), QuantumState.zero(2))
        reduced = partial_trace(bell, [1])
        np.testing.assert_allclose(reduced.data, np.eye(2) / 2, atol=1e-12)

    def test_dephase_and_diagonal(self):
        rho = random_density_matrix(2, np.random.default_rng(3))
        dephased = dephase(rho)
        np.testing.assert_allclose(np.diag(dephased.data).real, diagonal_elements(rho))
        self.assertAlmostEqual(float(np.sum(np.abs(dephased.data - np.diag(np.diag(dephased.data))))), 0.0)

    def test_random_density_matrix_rank(self):
        rho = random_density_matrix(2, np.random.default_rng(0), rank=1)
        rho.validate()
        self.assertAlmostEqual(purity(rho), 1.0, places=10)


class TestSimulator(unittest.TestCase):
    """Test cases for circuit evolution."""

    def test_bell_state(self):
        out = run_circuit(bell_circuit(), QuantumState.zero(2))
        expected = QuantumState.from_statevector(np.array([1, 0, 0, 1]) / math.sqrt(2))
        self.assertTrue(states_equal_up_to_phase(out, expected))

    def test_ry_pi_flips_target(self):
        out = apply_gate(QuantumState.zero(2), Gate("RY", (1,), math.pi))
        self.assertAlmostEqual(float(diagonal_elements(out)[1]), 1.0)

    def test_vector_and_density_paths_agree(self):
        rng = np.random.default_rng(5)
        circuit = Circuit(3)
        for _ in range(12):
            circuit.append(Gate("RY", (int(rng.integers(3)),), float(rng.normal())))
            circuit.append(Gate("CNOT", tuple(int(q) for q in rng.permutation(3)[:2])))
        vector = run_circuit(circuit, QuantumState.zero(3))
        density = run_circuit(circuit, QuantumState.zero(3, density=True))
        np.testing.assert_allclose(vector.to_density().data, density.data, atol=1e-12)

    def test_size_mismatch(self):
        with self.assertRaises(ValueError):
            run_circuit(Circuit(2), QuantumState.zero(3))


if __name__ == "__main__":
    unittest.main()
