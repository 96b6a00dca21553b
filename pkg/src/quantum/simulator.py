"""
Gate application and circuit evolution, with optional per-gate noise.
"""

from typing import TYPE_CHECKING, Optional

from .gates import Circuit, Gate
from .kernels import apply_to_vector, conjugate_density
from .states import QuantumState

if TYPE_CHECKING:
    from ..noise.channels import NoiseSpec


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """
    Apply one gate to a state.

    Args:
        state: Statevector or density-matrix state
        gate: Gate whose qubits are all < state.n

    Returns:
        U|psi> for a statevector, U rho U^dagger for a density matrix
    """
    for q in gate.qubits:
        if q >= state.n:
            raise IndexError(f"Qubit {q} out of range for {state.n}-qubit state")
    matrix = gate.matrix()
    if state.is_density:
        data = conjugate_density(state.data, matrix, gate.qubits, state.n)
    else:
        data = apply_to_vector(state.data, matrix, gate.qubits, state.n)
    return QuantumState(state.n, data, state.is_density)


def run_circuit(
    circuit: Circuit,
    state: QuantumState,
    noise: Optional["NoiseSpec"] = None,
    promote: bool = True,
) -> QuantumState:
    """
    Evolve a state through a circuit.

    When a non-trivial noise model is given, the channel for each gate is
    applied to that gate's qubits right after it, and the state is carried
    as a density matrix.

    Args:
        circuit: Circuit with circuit.n == state.n
        state: Input state
        noise: Optional per-gate noise model
        promote: Allow promoting a statevector input to a density matrix

    Returns:
        Output state

    Raises:
        ValueError: On a size mismatch, or noise on a statevector with promote=False
    """
    if circuit.n != state.n:
        raise ValueError(f"Circuit has {circuit.n} qubits but the state has {state.n}")
    noisy = noise is not None and not noise.is_trivial
    if noisy and not state.is_density:
        if not promote:
            raise ValueError("Noisy evolution needs a density matrix and promotion is disabled")
        state = state.to_density()

    if not noisy:
        for gate in circuit:
            state = apply_gate(state, gate)
        return state

    n = state.n
    rho = state.data
    for gate in circuit:
        rho = conjugate_density(rho, gate.matrix(), gate.qubits, n)
        channel = noise.channel_for(gate)
        if channel is not None:
            rho = sum(conjugate_density(rho, op, gate.qubits, n) for op in channel.operators)
    return QuantumState(n, rho, is_density=True)
