"""
VQSD and VQE problems: cost evaluation, eigenvalue readout and eigenvector preparation.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..hamiltonian.pauli import PauliHamiltonian, exact_spectrum, expectation, fake_min_energy
from ..noise.channels import NoiseSpec
from ..noise.ptm import PTM_MAX_QUBITS, ptm_evolve
from ..quantum.gates import Circuit
from ..quantum.simulator import run_circuit
from ..quantum.states import QuantumState, diagonal_elements, purity

_RAYLEIGH_TOL = 1e-9


def evolve(circuit: Circuit, state: QuantumState, noise: Optional[NoiseSpec] = None) -> QuantumState:
    """
    Run a bound circuit, using PTM fusion for noisy circuits of up to six qubits.
    """
    if noise is None or noise.is_trivial:
        return run_circuit(circuit, state)
    if circuit.n <= PTM_MAX_QUBITS:
        return ptm_evolve(circuit, state, noise)
    return run_circuit(circuit, state, noise)


@dataclass
class VqsdProblem:
    """
    Diagonalize `target` in the computational basis.

    Args:
        target: Density matrix to diagonalize
    """
    target: QuantumState
    purity_cache: float = field(init=False)

    def __post_init__(self):
        self.target = self.target.to_density()
        self.purity_cache = purity(self.target)

    @property
    def n(self) -> int:
        return self.target.n

    def true_eigenvalues(self) -> np.ndarray:
        """Exact spectrum of the target, descending."""
        return np.sort(np.linalg.eigvalsh(self.target.data))[::-1]


@dataclass
class VqeProblem:
    """
    Minimize the energy of `hamiltonian` from |0...0>.

    Args:
        hamiltonian: Problem Hamiltonian
        ground_truth: Exact ground energy, when known
    """
    hamiltonian: PauliHamiltonian
    ground_truth: Optional[float] = None
    fake_min: float = field(init=False)

    def __post_init__(self):
        self.fake_min = fake_min_energy(self.hamiltonian)
        if self.ground_truth is not None and self.fake_min > self.ground_truth + _RAYLEIGH_TOL:
            raise ValueError(
                f"Fake minimum {self.fake_min} exceeds the ground energy {self.ground_truth}"
            )

    @classmethod
    def from_hamiltonian(cls, hamiltonian: PauliHamiltonian, with_oracle: bool = True) -> "VqeProblem":
        ground = float(exact_spectrum(hamiltonian)[0][0]) if with_oracle else None
        return cls(hamiltonian, ground)

    @property
    def n(self) -> int:
        return self.hamiltonian.n


def vqsd_cost(
    problem: VqsdProblem,
    circuit: Circuit,
    angles: Sequence[float],
    noise: Optional[NoiseSpec] = None,
) -> float:
    """
    Tr(rho~^2) - Tr(D(rho~)^2) for rho~ the circuit output on the target.

    Without noise Tr(rho~^2) is the cached purity of the target. Noisy
    channels change the purity, so the evolved state's own purity is used and
    the cost stays non-negative.

    Args:
        problem: VQSD target
        circuit: Circuit template; its angles are replaced by `angles`
        angles: One angle per rotation, in gate order
        noise: Optional per-gate noise model

    Returns:
        Cost, zero exactly when the evolved state is diagonal
    """
    rotated = evolve(circuit.bind(angles), problem.target, noise)
    diag = diagonal_elements(rotated)
    noisy = noise is not None and not noise.is_trivial
    total = purity(rotated) if noisy else problem.purity_cache
    return float(total - np.sum(diag ** 2))


def vqe_energy(
    problem: VqeProblem,
    circuit: Circuit,
    angles: Sequence[float],
    noise: Optional[NoiseSpec] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Energy of the circuit output on |0...0>.

    With a noise model carrying `shots`, the exact value is perturbed by the
    shot-noise model, which needs `rng`.
    """
    state = evolve(circuit.bind(angles), QuantumState.zero(problem.n), noise)
    shots = noise.shots if noise is not None else None
    return expectation(problem.hamiltonian, state, shots=shots, rng=rng)


def eigen_readout(
    problem: VqsdProblem,
    circuit: Circuit,
    angles: Sequence[float],
    noise: Optional[NoiseSpec] = None,
) -> Tuple[np.ndarray, List[str]]:
    """
    Inferred eigenvalues (descending) with the bitstrings they were read from.
    """
    rotated = evolve(circuit.bind(angles), problem.target, noise)
    diag = diagonal_elements(rotated)
    order = np.argsort(-diag, kind="stable")
    n = problem.n
    return diag[order], [format(int(i), f"0{n}b") for i in order]


def eigenvector_prepare(circuit: Circuit, angles: Sequence[float], bitstring: str) -> QuantumState:
    """Inferred eigenvector U(angles)^dagger |bitstring>."""
    if len(bitstring) != circuit.n:
        raise ValueError(f"Bitstring {bitstring!r} does not match {circuit.n} qubits")
    return run_circuit(circuit.bind(angles).inverse(), QuantumState.basis(bitstring))


def eigenvalue_error(true_vals: Sequence[float], inferred: Sequence[float], m: int) -> float:
    """Sum over the m largest of (lambda_i - inferred_i)^2; both lists descending."""
    true_vals = np.asarray(true_vals, dtype=float)
    inferred = np.asarray(inferred, dtype=float)
    if not 1 <= m <= min(true_vals.size, inferred.size):
        raise ValueError(f"m={m} out of range for lists of length {true_vals.size} and {inferred.size}")
    return float(np.sum((true_vals[:m] - inferred[:m]) ** 2))
