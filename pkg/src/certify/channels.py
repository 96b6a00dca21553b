"""
Quantum channels on up to three qubits and their Choi states.
"""

import itertools
from functools import reduce
from typing import List, Sequence

import numpy as np
from scipy.stats import unitary_group

from ..noise.channels import PAULIS, amplitude_damping as amplitude_damping_1q
from ..noise.channels import random_x as random_x_1q
from ..quantum.gates import Circuit
from ..quantum.simulator import run_circuit
from ..quantum.states import QuantumState

CHANNEL_MAX_QUBITS = 3
CPTP_TOL = 1e-12


class Channel:
    """A CPTP map on n <= 3 qubits held as Kraus operators."""

    def __init__(self, n: int, operators: Sequence[np.ndarray], label: str = "channel"):
        """
        Initialize a channel.

        Args:
            n: Qubit count
            operators: Kraus operators of dimension 2^n
            label: Human-readable name used in reports

        Raises:
            ValueError: On a size outside 1..3, bad shapes or incomplete operators
        """
        if not 1 <= n <= CHANNEL_MAX_QUBITS:
            raise ValueError(f"Channels act on 1..{CHANNEL_MAX_QUBITS} qubits, got {n}")
        dim = 2 ** n
        ops = [np.asarray(op, dtype=complex) for op in operators]
        if not ops:
            raise ValueError("A channel needs at least one Kraus operator")
        for op in ops:
            if op.shape != (dim, dim):
                raise ValueError(f"Kraus operator of shape {op.shape} does not match dimension {dim}")
        self.n = n
        self.operators: List[np.ndarray] = [op for op in ops if np.linalg.norm(op) > 1e-15] or ops[:1]
        self.label = label
        completeness = sum(op.conj().T @ op for op in self.operators)
        if not np.allclose(completeness, np.eye(dim), rtol=0.0, atol=CPTP_TOL * dim):
            raise ValueError(f"{label}: Kraus operators are not trace preserving")

    def __repr__(self) -> str:
        return f"Channel({self.label}, n={self.n}, kraus_rank={len(self.operators)})"

    @property
    def dim(self) -> int:
        return 2 ** self.n

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return sum(op @ rho @ op.conj().T for op in self.operators)

    @classmethod
    def identity(cls, n: int = 1) -> "Channel":
        return cls(n, [np.eye(2 ** n)], label="identity")

    @classmethod
    def unitary(cls, u: np.ndarray, label: str = "unitary") -> "Channel":
        u = np.asarray(u, dtype=complex)
        if not np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=1e-10):
            raise ValueError("Matrix is not unitary")
        return cls(int(np.log2(u.shape[0])), [u], label=label)

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "Channel":
        return cls.unitary(circuit_unitary(circuit), label=f"circuit[{circuit.gate_count} gates]")

    @classmethod
    def depolarizing(cls, gamma: float, n: int = 1) -> "Channel":
        """Global depolarizing channel written with n-qubit Pauli products."""
        if not 0.0 <= gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {gamma}")
        count = 4 ** n
        ops = []
        for idx, paulis in enumerate(itertools.product(PAULIS, repeat=n)):
            weight = 1.0 - gamma * (count - 1) / count if idx == 0 else gamma / count
            ops.append(np.sqrt(weight) * reduce(np.kron, paulis))
        return cls(n, ops, label=f"depolarizing({gamma:g})")

    @classmethod
    def amplitude_damping(cls, gamma: float, n: int = 1) -> "Channel":
        """Independent amplitude damping on every qubit."""
        return cls(n, _local_operators(amplitude_damping_1q(gamma).operators, n), label=f"amplitude_damping({gamma:g})")

    @classmethod
    def random_x(cls, gamma: float, n: int = 1) -> "Channel":
        """Independent random bit flips on every qubit."""
        return cls(n, _local_operators(random_x_1q(gamma).operators, n), label=f"random_x({gamma:g})")

    def compose(self, other: "Channel") -> "Channel":
        """Apply `self` first, then `other`."""
        if other.n != self.n:
            raise ValueError(f"Cannot compose channels on {self.n} and {other.n} qubits")
        ops = [b @ a for a in self.operators for b in other.operators]
        return Channel(self.n, ops, label=f"{self.label} -> {other.label}")

    @classmethod
    def random_channel(cls, n: int, kraus_rank: int, rng: np.random.Generator) -> "Channel":
        """
        Random channel from a Haar-random unitary on system and environment.

        The first 2^n columns of the unitary form an isometry whose blocks are
        the Kraus operators.
        """
        if kraus_rank < 1:
            raise ValueError(f"kraus_rank must be positive, got {kraus_rank}")
        dim = 2 ** n
        u = unitary_group.rvs(dim * kraus_rank, random_state=rng)
        isometry = np.atleast_2d(u)[:, :dim]
        ops = [isometry[k * dim:(k + 1) * dim, :] for k in range(kraus_rank)]
        return cls(n, ops, label=f"random(rank={kraus_rank})")


def _local_operators(single: Sequence[np.ndarray], n: int) -> List[np.ndarray]:
    return [reduce(np.kron, combo) for combo in itertools.product(single, repeat=n)]


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Dense unitary of a circuit, column j being the image of basis state j."""
    if circuit.n > CHANNEL_MAX_QUBITS:
        raise ValueError(f"Circuit unitaries are limited to {CHANNEL_MAX_QUBITS} qubits")
    dim = 2 ** circuit.n
    columns = []
    for j in range(dim):
        basis = QuantumState.basis(format(j, f"0{circuit.n}b"))
        columns.append(run_circuit(circuit, basis).data)
    return np.stack(columns, axis=1)


def choi_state(channel: Channel) -> QuantumState:
    """
    Normalized Choi state (I x channel)|Omega><Omega| on 2n qubits.

    The first n qubits carry the reference half of the maximally entangled
    state, the last n the channel output.
    """
    dim = channel.dim
    vectors = [(op.T / np.sqrt(dim)).reshape(-1) for op in channel.operators]
    rho = sum(np.outer(v, v.conj()) for v in vectors)
    return QuantumState.from_density_matrix(rho)

