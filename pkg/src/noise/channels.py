"""
Kraus-operator channels and the per-gate noise model.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from ..quantum.gates import Gate
from ..quantum.kernels import conjugate_density
from ..quantum.states import QuantumState

COMPLETENESS_TOL = 1e-12
_DROP_TOL = 1e-15

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)


class KrausChannel:
    """
    A CPTP map on one or two qubits given by Kraus operators.

    Operators with negligible norm are dropped, so a zero-strength noise
    channel reduces to the single identity operator.
    """

    def __init__(self, n_qubits: int, operators: Sequence[np.ndarray]):
        """
        Initialize a channel.

        Args:
            n_qubits: Arity of the channel (1 or 2)
            operators: Kraus operators of dimension 2^n_qubits

        Raises:
            ValueError: On a bad arity, mismatched shapes or incomplete operators
        """
        if n_qubits not in (1, 2):
            raise ValueError(f"Kraus channels act on 1 or 2 qubits, got {n_qubits}")
        dim = 2 ** n_qubits
        ops: List[np.ndarray] = []
        for op in operators:
            op = np.asarray(op, dtype=complex)
            if op.shape != (dim, dim):
                raise ValueError(f"Kraus operator of shape {op.shape} does not match dimension {dim}")
            if np.linalg.norm(op) > _DROP_TOL:
                ops.append(op)
        if not ops:
            raise ValueError("A channel needs at least one nonzero Kraus operator")
        self.n_qubits = n_qubits
        self.operators = ops
        if not self.is_trace_preserving(COMPLETENESS_TOL):
            raise ValueError("Kraus operators do not satisfy sum K^dagger K = I")

    def __repr__(self) -> str:
        return f"KrausChannel(n_qubits={self.n_qubits}, operators={len(self.operators)})"

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    def completeness(self) -> np.ndarray:
        return sum(op.conj().T @ op for op in self.operators)

    def is_trace_preserving(self, atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.completeness(), np.eye(self.dim), rtol=0.0, atol=atol))

    def is_identity(self) -> bool:
        return len(self.operators) == 1 and np.allclose(self.operators[0], np.eye(self.dim), atol=1e-14)

    def compose(self, other: "KrausChannel") -> "KrausChannel":
        """Channel that applies `self` first and then `other`."""
        if other.n_qubits != self.n_qubits:
            raise ValueError("Cannot compose channels of different arity")
        return KrausChannel(self.n_qubits, [b @ a for a in self.operators for b in other.operators])

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        """Product channel with `self` on the more significant qubit."""
        if self.n_qubits + other.n_qubits > 2:
            raise ValueError("Tensor product would exceed two qubits")
        return KrausChannel(2, [np.kron(a, b) for a in self.operators for b in other.operators])

    def apply_matrix(self, rho: np.ndarray) -> np.ndarray:
        return sum(op @ rho @ op.conj().T for op in self.operators)


def _check_probability(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise ValueError(f"{name} must be in [0, 1], got {value}")
    return value


def identity_channel(n_qubits: int = 1) -> KrausChannel:
    return KrausChannel(n_qubits, [np.eye(2 ** n_qubits, dtype=complex)])


def depolarizing(gamma: float, n_qubits: int = 1) -> KrausChannel:
    """
    Depolarizing channel (1 - gamma) rho + gamma I / 2^k.

    Args:
        gamma: Depolarizing probability
        n_qubits: 1 or 2

    Returns:
        Channel with weights gamma/4^k on every non-identity Pauli string
    """
    gamma = _check_probability("gamma", gamma)
    if n_qubits not in (1, 2):
        raise ValueError(f"Depolarizing noise acts on 1 or 2 qubits, got {n_qubits}")
    count = 4 ** n_qubits
    strings = list(itertools.product(PAULIS, repeat=n_qubits))
    ops = []
    for index, factors in enumerate(strings):
        op = factors[0] if n_qubits == 1 else np.kron(factors[0], factors[1])
        # guard tiny negative values from rounding at gamma = 1
        weight = max(0.0, 1.0 - gamma * (count - 1) / count) if index == 0 else gamma / count
        ops.append(math.sqrt(weight) * op)
    return KrausChannel(n_qubits, ops)


def amplitude_damping(gamma: float) -> KrausChannel:
    """Energy relaxation |1> -> |0> with probability gamma."""
    gamma = _check_probability("gamma", gamma)
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return KrausChannel(1, [k0, k1])


def random_x(gamma: float) -> KrausChannel:
    """Bit flip: X applied with probability gamma."""
    gamma = _check_probability("gamma", gamma)
    return KrausChannel(1, [math.sqrt(1.0 - gamma) * PAULI_I, math.sqrt(gamma) * PAULI_X])


def apply_channel(state: QuantumState, channel: KrausChannel, qubits: Sequence[int]) -> QuantumState:
    """
    Apply a channel to the given qubits of a state.

    Args:
        state: Input state; a statevector is promoted to a density matrix
        channel: Channel whose arity equals len(qubits)
        qubits: Target qubits, most significant first

    Returns:
        Density-matrix state sum_k K rho K^dagger
    """
    qubits = [int(q) for q in qubits]
    if len(qubits) != channel.n_qubits:
        raise ValueError(f"Channel acts on {channel.n_qubits} qubit(s), got targets {qubits}")
    for q in qubits:
        if not 0 <= q < state.n:
            raise IndexError(f"Qubit {q} out of range for {state.n}-qubit state")
    rho = state.matrix
    out = np.zeros_like(rho)
    for op in channel.operators:
        out += conjugate_density(rho, op, qubits, state.n)
    return QuantumState(state.n, out, is_density=True)


@dataclass(frozen=True)
class NoiseSpec:
    """
    Per-gate noise model applied after every gate on the qubits it touched.

    A one-qubit gate is followed by one-qubit depolarizing noise, amplitude
    damping and random X in that order. A two-qubit gate is followed by
    two-qubit depolarizing noise and then amplitude damping and random X on
    each of its qubits.

    Args:
        one_qubit_depolarizing: Depolarizing probability after 1-qubit gates
        two_qubit_depolarizing: Depolarizing probability after 2-qubit gates
        amplitude_damping: Damping probability per touched qubit
        random_x: Bit-flip probability per touched qubit
        shots: Shot count of the expectation-level sampling model
    """
    one_qubit_depolarizing: float = 0.0
    two_qubit_depolarizing: float = 0.0
    amplitude_damping: float = 0.0
    random_x: float = 0.0
    shots: Optional[int] = None
    _one: Optional[KrausChannel] = field(default=None, init=False, repr=False, compare=False)
    _two: Optional[KrausChannel] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("one_qubit_depolarizing", "two_qubit_depolarizing", "amplitude_damping", "random_x"):
            _check_probability(name, getattr(self, name))
        if self.shots is not None and int(self.shots) < 1:
            raise ValueError(f"shots must be positive, got {self.shots}")

        local = amplitude_damping(self.amplitude_damping).compose(random_x(self.random_x))
        one = depolarizing(self.one_qubit_depolarizing, 1).compose(local)
        two = depolarizing(self.two_qubit_depolarizing, 2).compose(local.tensor(local))
        object.__setattr__(self, "_one", None if one.is_identity() else one)
        object.__setattr__(self, "_two", None if two.is_identity() else two)

    @property
    def is_trivial(self) -> bool:
        """True when no gate is followed by any channel."""
        return self._one is None and self._two is None

    def channel_for(self, gate: Gate) -> Optional[KrausChannel]:
        """Channel that follows `gate`, or None when it is noiseless."""
        return self._one if gate.kind.arity == 1 else self._two


# Maximum per-gate error rates of a 27-qubit superconducting device, as example values
IBMQ_MUMBAI_MAX = NoiseSpec(one_qubit_depolarizing=1.45e-3, two_qubit_depolarizing=2.30e-2)

NOISE_PRESETS = {"ibmq_mumbai_max": IBMQ_MUMBAI_MAX}
