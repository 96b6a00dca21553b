"""
Unit tests for noise channels and the transfer-matrix simulator.
"""

import sys
import unittest
from pathlib import Path

import numpy as np

# Add the parent directory to the Python path
sys.path.append(str(Path(__file__).parent.parent))

from src.noise.channels import (
    NOISE_PRESETS,
    KrausChannel,
    NoiseSpec,
    amplitude_damping,
    apply_channel,
    depolarizing,
    random_x,
)
from src.noise.ptm import density_to_pauli, pauli_to_density, ptm_evolve, to_ptm
from src.quantum.gates import Circuit, Gate
from src.quantum.simulator import run_circuit
from src.quantum.states import QuantumState, random_density_matrix


def random_circuit(n: int, length: int, seed: int) -> Circuit:
    rng = np.random.default_rng(seed)
    circuit = Circuit(n)
    for _ in range(length):
        if n > 1 and rng.random() < 0.3:
            control, target = (int(q) for q in rng.permutation(n)[:2])
            circuit.append(Gate("CNOT", (control, target)))
        else:
            kind = ("RX", "RY", "RZ")[int(rng.integers(3))]
            circuit.append(Gate(kind, (int(rng.integers(n)),), float(rng.uniform(-np.pi, np.pi))))
    return circuit


class TestKrausChannels(unittest.TestCase):
    """Test cases for Kraus channels."""

    def test_builtin_channels_are_trace_preserving(self):
        for channel in (depolarizing(0.3), depolarizing(0.2, 2), amplitude_damping(0.4), random_x(0.1)):
            self.assertTrue(channel.is_trace_preserving())

    def test_rejects_non_trace_preserving(self):
        with self.assertRaises(ValueError):
            KrausChannel(1, [0.5 * np.eye(2)])

    def test_completeness_within_tolerance(self):
        composed = depolarizing(0.3).compose(amplitude_damping(0.2)).compose(random_x(0.05))
        product = amplitude_damping(0.7).tensor(depolarizing(0.1))
        for channel in (composed, product, depolarizing(1.0, 2)):
            np.testing.assert_allclose(channel.completeness(), np.eye(channel.dim), atol=1e-12)
        with self.assertRaises(ValueError):
            KrausChannel(1, [np.sqrt(1.0 - 1e-11) * np.eye(2)])

    def test_probability_range(self):
        with self.assertRaises(ValueError):
            depolarizing(1.5)
        with self.assertRaises(ValueError):
            amplitude_damping(-0.1)

    def test_full_depolarizing_gives_maximally_mixed(self):
        state = apply_channel(QuantumState.zero(1), depolarizing(1.0), [0])
        np.testing.assert_allclose(state.data, np.eye(2) / 2, atol=1e-12)

    def test_amplitude_damping_relaxes_excited_state(self):
        state = apply_channel(QuantumState.basis("1"), amplitude_damping(1.0), [0])
        np.testing.assert_allclose(state.data, np.diag([1.0, 0.0]), atol=1e-12)

    def test_channel_on_one_qubit_of_two(self):
        state = apply_channel(QuantumState.basis("00"), random_x(1.0), [1])
        self.assertAlmostEqual(float(state.data[1, 1].real), 1.0)


class TestNoiseSpec(unittest.TestCase):
    """Test cases for the per-gate noise model."""

    def test_trivial_spec(self):
        self.assertTrue(NoiseSpec().is_trivial)
        self.assertIsNone(NoiseSpec().channel_for(Gate("H", (0,))))

    def test_preset_channels(self):
        spec = NOISE_PRESETS["ibmq_mumbai_max"]
        self.assertFalse(spec.is_trivial)
        self.assertEqual(spec.channel_for(Gate("H", (0,))).n_qubits, 1)
        self.assertEqual(spec.channel_for(Gate("CNOT", (0, 1))).n_qubits, 2)

    def test_noise_lowers_purity(self):
        spec = NoiseSpec(one_qubit_depolarizing=0.05, two_qubit_depolarizing=0.1)
        out = run_circuit(random_circuit(2, 10, 1), QuantumState.zero(2), noise=spec)
        self.assertTrue(out.is_density)
        self.assertLess(float(np.trace(out.data @ out.data).real), 1.0)
        self.assertAlmostEqual(float(np.trace(out.data).real), 1.0, places=12)

    def test_no_promotion(self):
        spec = NoiseSpec(one_qubit_depolarizing=0.1)
        with self.assertRaises(ValueError):
            run_circuit(random_circuit(1, 2, 0), QuantumState.zero(1), noise=spec, promote=False)


class TestTransferMatrices(unittest.TestCase):
    """Test cases for the PTM representation."""

    def test_identity_ptm(self):
        np.testing.assert_allclose(to_ptm(np.eye(2)).matrix, np.eye(4), atol=1e-12)

    def test_depolarizing_ptm_is_diagonal(self):
        matrix = to_ptm(depolarizing(0.3)).matrix
        np.testing.assert_allclose(matrix, np.diag([1.0, 0.7, 0.7, 0.7]), atol=1e-12)

    def test_pauli_coefficients_invert(self):
        rho = random_density_matrix(3, np.random.default_rng(2)).data
        back = pauli_to_density(density_to_pauli(rho, 3), 3)
        np.testing.assert_allclose(back, rho, atol=1e-12)

    def test_ptm_matches_density_matrix_path(self):
        spec = NoiseSpec(
            one_qubit_depolarizing=0.02, two_qubit_depolarizing=0.05, amplitude_damping=0.01, random_x=0.01
        )
        rng = np.random.default_rng(2024)
        for seed in range(200):
            n = int(rng.integers(1, 4))
            circuit = random_circuit(n, int(rng.integers(1, 11)), seed)
            start = random_density_matrix(n, rng)
            expected = run_circuit(circuit, start, noise=spec)
            actual = ptm_evolve(circuit, start, noise=spec)
            np.testing.assert_allclose(actual.data, expected.data, atol=1e-10)

    def test_ptm_without_noise(self):
        circuit = random_circuit(2, 8, 7)
        expected = run_circuit(circuit, QuantumState.zero(2, density=True))
        actual = ptm_evolve(circuit, QuantumState.zero(2))
        np.testing.assert_allclose(actual.data, expected.data, atol=1e-10)


if __name__ == "__main__":
    unittest.main()
