"""
Quantum states (statevector or density matrix) and the state-level operations
the rest of the engine consumes: purity, partial trace, dephasing and the
computational-basis diagonal.
"""

from typing import Iterable, List, Optional, Sequence

import numpy as np

from .gates import MAX_QUBITS

NORM_TOL = 1e-10
PSD_TOL = 1e-10


class QuantumState:
    """
    State of n qubits held either as an amplitude vector (length 2^n) or as a
    density matrix (2^n x 2^n). Values are treated as immutable: every
    operation returns a new state.
    """

    __slots__ = ("n", "data", "is_density")

    def __init__(self, n: int, data: np.ndarray, is_density: bool):
        """
        Initialize a state without validation; use the class constructors.

        Args:
            n: Qubit count
            data: Amplitude vector or density matrix
            is_density: True when `data` is a density matrix
        """
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"Qubit count must be in 1..{MAX_QUBITS}, got {n}")
        dim = 2 ** n
        expected = (dim, dim) if is_density else (dim,)
        if data.shape != expected:
            raise ValueError(f"Expected array of shape {expected}, got {data.shape}")
        self.n = n
        self.data = np.asarray(data, dtype=complex)
        self.is_density = is_density

    def __repr__(self) -> str:
        kind = "density" if self.is_density else "vector"
        return f"QuantumState(n={self.n}, {kind})"

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @classmethod
    def from_statevector(cls, vector: Sequence[complex]) -> "QuantumState":
        vector = np.asarray(vector, dtype=complex).ravel()
        n = _qubits_for_dim(vector.shape[0])
        state = cls(n, vector.copy(), is_density=False)
        state.validate()
        return state

    @classmethod
    def from_density_matrix(cls, matrix: np.ndarray) -> "QuantumState":
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Density matrix must be square, got shape {matrix.shape}")
        n = _qubits_for_dim(matrix.shape[0])
        state = cls(n, matrix.copy(), is_density=True)
        state.validate()
        return state

    @classmethod
    def zero(cls, n: int, density: bool = False) -> "QuantumState":
        return cls.basis("0" * n, density=density)

    @classmethod
    def basis(cls, bitstring: str, density: bool = False) -> "QuantumState":
        """Computational basis state |b>, qubit 0 first in the bitstring."""
        if not bitstring or any(b not in "01" for b in bitstring):
            raise ValueError(f"Invalid bitstring: {bitstring!r}")
        n = len(bitstring)
        vector = np.zeros(2 ** n, dtype=complex)
        vector[int(bitstring, 2)] = 1.0
        state = cls(n, vector, is_density=False)
        return state.to_density() if density else state

    @classmethod
    def maximally_mixed(cls, n: int) -> "QuantumState":
        dim = 2 ** n
        return cls(n, np.eye(dim, dtype=complex) / dim, is_density=True)

    def to_density(self) -> "QuantumState":
        """Density-matrix form (outer product for a statevector)."""
        if self.is_density:
            return self
        return QuantumState(self.n, np.outer(self.data, self.data.conj()), is_density=True)

    @property
    def matrix(self) -> np.ndarray:
        return self.to_density().data

    def validate(self, tol: float = NORM_TOL) -> None:
        """
        Check the state invariants.

        Raises:
            ValueError: When the norm, trace, Hermiticity or positivity is off
        """
        if not self.is_density:
            norm = np.linalg.norm(self.data)
            if abs(norm - 1.0) > tol:
                raise ValueError(f"Statevector norm {norm} differs from 1")
            return
        rho = self.data
        if not np.allclose(rho, rho.conj().T, atol=tol):
            raise ValueError("Density matrix is not Hermitian")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > tol:
            raise ValueError(f"Density matrix trace {trace} differs from 1")
        smallest = np.linalg.eigvalsh(rho).min()
        if smallest < -PSD_TOL:
            raise ValueError(f"Density matrix has negative eigenvalue {smallest}")


def _qubits_for_dim(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else 0
    if n < 1 or 2 ** n != dim:
        raise ValueError(f"Dimension {dim} is not a power of two")
    return n


def purity(state: QuantumState) -> float:
    """Tr(rho^2); 1 for pure states, 1/2^n for the maximally mixed state."""
    if not state.is_density:
        return 1.0
    rho = state.data
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def partial_trace(state: QuantumState, keep: Iterable[int]) -> QuantumState:
    """
    Reduce a state onto the qubits in `keep`.

    Args:
        state: Input state
        keep: Qubits to keep; the reduced state orders them ascending

    Returns:
        Reduced density matrix on len(keep) qubits
    """
    keep = sorted(set(int(q) for q in keep))
    n = state.n
    if not keep:
        raise ValueError("keep must name at least one qubit")
    if keep[0] < 0 or keep[-1] >= n:
        raise IndexError(f"keep {keep} out of range for {n} qubits")
    rho = state.matrix
    if len(keep) == n:
        return QuantumState(n, rho.copy(), is_density=True)
    traced = [q for q in range(n) if q not in keep]
    dk, dt = 2 ** len(keep), 2 ** len(traced)
    perm = keep + traced + [n + q for q in keep] + [n + q for q in traced]
    tensor = rho.reshape([2] * (2 * n)).transpose(perm).reshape(dk, dt, dk, dt)
    reduced = np.einsum("ajbj->ab", tensor)
    return QuantumState(len(keep), reduced, is_density=True)


def dephase(state: QuantumState) -> QuantumState:
    """Computational-basis dephasing: keep the diagonal, zero the rest."""
    diag = np.diag(state.matrix)
    return QuantumState(state.n, np.diag(diag), is_density=True)


def diagonal_elements(state: QuantumState) -> np.ndarray:
    """<b|rho|b> for every bitstring b, as a real array indexed by int(b, 2)."""
    if state.is_density:
        return np.real(np.diag(state.data)).copy()
    return np.abs(state.data) ** 2


def bitstrings(n: int) -> List[str]:
    return [format(i, f"0{n}b") for i in range(2 ** n)]


def states_equal_up_to_phase(a: QuantumState, b: QuantumState, tol: float = 1e-10) -> bool:
    """Pure-state equality up to a global phase, via |<a|b>| = 1."""
    if a.n != b.n or a.is_density or b.is_density:
        return False
    return abs(abs(np.vdot(a.data, b.data)) - 1.0) <= tol


def random_statevector(n: int, rng: np.random.Generator) -> QuantumState:
    """Haar-random pure state."""
    vector = rng.normal(size=2 ** n) + 1j * rng.normal(size=2 ** n)
    return QuantumState(n, vector / np.linalg.norm(vector), is_density=False)


def random_density_matrix(n: int, rng: np.random.Generator, rank: Optional[int] = None) -> QuantumState:
    """
    Random mixed state from the Hilbert-Schmidt (Ginibre) ensemble.

    Args:
        n: Qubit count
        rng: Seeded generator
        rank: Rank of the state; full rank when omitted

    Returns:
        Density-matrix state
    """
    dim = 2 ** n
    rank = dim if rank is None else int(rank)
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must be in 1..{dim}, got {rank}")
    ginibre = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = ginibre @ ginibre.conj().T
    rho /= np.trace(rho).real
    return QuantumState(n, (rho + rho.conj().T) / 2.0, is_density=True)
