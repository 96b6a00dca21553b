"""
Tensor kernels shared by the simulator, the noise channels and the PTM path.
"""

from typing import Sequence

import numpy as np


def apply_local(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int], dim: int = 2) -> np.ndarray:
    """
    Contract a local operator into the given axes of a tensor.

    Args:
        tensor: Array whose axes all have size `dim`
        matrix: (dim**k, dim**k) operator; its row/column index is ordered
            with axes[0] most significant
        axes: The k tensor axes the operator acts on
        dim: Local dimension (2 for qubits, 4 for Pauli coefficients)

    Returns:
        New tensor with the same shape
    """
    k = len(axes)
    op = matrix.reshape([dim] * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def apply_to_vector(vector: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """U|psi> for a local U on `qubits` of an n-qubit amplitude vector."""
    tensor = vector.reshape([2] * n)
    return apply_local(tensor, matrix, qubits).reshape(-1)


def conjugate_density(rho: np.ndarray, matrix: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """K rho K^dagger for a local K on `qubits` of an n-qubit density matrix."""
    tensor = rho.reshape([2] * (2 * n))
    tensor = apply_local(tensor, matrix, qubits)
    tensor = apply_local(tensor, matrix.conj(), [n + q for q in qubits])
    dim = 2 ** n
    return tensor.reshape(dim, dim)
