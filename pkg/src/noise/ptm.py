"""
Pauli-transfer-matrix (PTM) representation of gates and noise channels.

Coefficients are taken over the normalized Pauli basis P/sqrt(2^k) in
(I, X, Y, Z) order, with the first qubit most significant, so a channel E
has R_ij = Tr(P_i E(P_j)) and acts on real coefficient vectors.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional, Tuple, Union

import numpy as np

from ..quantum.gates import Circuit, Gate
from ..quantum.kernels import apply_local
from ..quantum.states import QuantumState
from .channels import PAULIS, KrausChannel, NoiseSpec

PTM_MAX_QUBITS = 6


@lru_cache(maxsize=2)
def pauli_basis(n_qubits: int) -> np.ndarray:
    """Normalized Pauli strings as an array of shape (4^k, 2^k, 2^k)."""
    norm = np.sqrt(2.0) ** n_qubits
    mats = []
    for factors in itertools.product(PAULIS, repeat=n_qubits):
        m = factors[0]
        for f in factors[1:]:
            m = np.kron(m, f)
        mats.append(m / norm)
    basis = np.array(mats)
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class PTM:
    """Real 4^k x 4^k transfer matrix of a k-qubit operation."""
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return 1 if self.dim == 4 else 2


def to_ptm(op: Union[np.ndarray, KrausChannel]) -> PTM:
    """
    Transfer matrix of a unitary or a Kraus channel.

    Args:
        op: 2x2 / 4x4 unitary, or a 1- or 2-qubit KrausChannel

    Returns:
        PTM with R_ij = Tr(P_i E(P_j))

    Raises:
        ValueError: For any other dimension
    """
    if isinstance(op, KrausChannel):
        operators = op.operators
        dim = op.dim
    else:
        unitary = np.asarray(op, dtype=complex)
        if unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
            raise ValueError(f"Expected a square matrix, got shape {unitary.shape}")
        operators = [unitary]
        dim = unitary.shape[0]
    if dim not in (2, 4):
        raise ValueError(f"PTMs are supported for dimension 2 or 4, got {dim}")

    basis = pauli_basis(1 if dim == 2 else 2)
    images = sum(np.einsum("ab,jbc,dc->jad", k, basis, k.conj()) for k in operators)
    # Tr(P_i E(P_j)) = sum_ab P_i[a, b] E(P_j)[b, a]
    matrix = np.einsum("iab,jba->ij", basis, images)
    return PTM(np.ascontiguousarray(matrix.real))


def fuse(gate_ptm: PTM, noise_ptm: PTM) -> PTM:
    """PTM of the gate followed by the noise channel."""
    if gate_ptm.dim != noise_ptm.dim:
        raise ValueError(f"Cannot fuse PTMs of dimension {gate_ptm.dim} and {noise_ptm.dim}")
    return PTM(noise_ptm.matrix @ gate_ptm.matrix)


def _to_pauli_matrix() -> np.ndarray:
    # row a, column 2*r + c holds P_a[c, r]
    basis = pauli_basis(1)
    return np.transpose(basis, (0, 2, 1)).reshape(4, 4)


def _from_pauli_matrix() -> np.ndarray:
    # row 2*r + c, column a holds P_a[r, c]
    return pauli_basis(1).reshape(4, 4).T


def density_to_pauli(rho: np.ndarray, n: int) -> np.ndarray:
    """Pauli coefficient tensor of shape [4]*n for an n-qubit density matrix."""
    tensor = rho.reshape([2] * (2 * n))
    order = [axis for q in range(n) for axis in (q, n + q)]
    tensor = tensor.transpose(order).reshape([4] * n)
    change = _to_pauli_matrix()
    for q in range(n):
        tensor = apply_local(tensor, change, [q], dim=4)
    return tensor.real


def pauli_to_density(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Inverse of density_to_pauli."""
    tensor = coeffs.astype(complex)
    change = _from_pauli_matrix()
    for q in range(n):
        tensor = apply_local(tensor, change, [q], dim=4)
    tensor = tensor.reshape([2] * (2 * n))
    inverse = np.argsort([axis for q in range(n) for axis in (q, n + q)])
    dim = 2 ** n
    return tensor.transpose(inverse).reshape(dim, dim)


def ptm_evolve(circuit: Circuit, state: QuantumState, noise: Optional[NoiseSpec] = None) -> QuantumState:
    """
    Evolve a state by fused gate-noise PTMs.

    Each distinct (gate kind, angle) is converted and fused with its noise
    channel once per call.

    Args:
        circuit: Circuit of at most PTM_MAX_QUBITS qubits
        state: Input state of matching size
        noise: Optional per-gate noise model

    Returns:
        Output density-matrix state
    """
    n = circuit.n
    if n > PTM_MAX_QUBITS:
        raise ValueError(f"PTM evolution supports at most {PTM_MAX_QUBITS} qubits, got {n}")
    if state.n != n:
        raise ValueError(f"Circuit has {n} qubits but the state has {state.n}")

    noise_ptms: Dict[int, Optional[PTM]] = {1: None, 2: None}
    if noise is not None and not noise.is_trivial:
        for arity, sample_gate in ((1, Gate("X", (0,))), (2, Gate("CNOT", (0, 1)))):
            channel = noise.channel_for(sample_gate)
            noise_ptms[arity] = None if channel is None else to_ptm(channel)

    cache: Dict[Tuple[str, Optional[float]], np.ndarray] = {}
    coeffs = density_to_pauli(state.matrix, n)
    for gate in circuit:
        key = (gate.kind.value, gate.angle)
        local = cache.get(key)
        if local is None:
            fused = to_ptm(gate.matrix())
            noise_ptm = noise_ptms[gate.kind.arity]
            if noise_ptm is not None:
                fused = fuse(fused, noise_ptm)
            local = cache[key] = fused.matrix
        coeffs = apply_local(coeffs, local, gate.qubits, dim=4)
    return QuantumState(n, pauli_to_density(coeffs, n), is_density=True)
