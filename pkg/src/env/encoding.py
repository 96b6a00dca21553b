"""
Circuit-to-tensor encoding used as the agent's observation.

A circuit over N qubits with at most T moments is a binary tensor of shape
T x (N + 3) x N. A CNOT placed in moment m with control c and target t sets
[m, t, c]. A rotation about axis j (1=X, 2=Y, 3=Z) on qubit q in moment m sets
[m, N + j - 1, q].

IntegerEncoder is the gate-list alternative with one row per gate.
"""

from typing import List, Optional, Union

import numpy as np

from ..quantum.gates import AXIS_OF_KIND, Circuit, Gate, GateKind


class CircuitEncoder:
    """Incremental encoder; append gates in circuit order."""

    def __init__(self, max_depth: int, n: int):
        """
        Initialize an empty encoding.

        Args:
            max_depth: Number of depth slices T
            n: Qubit count N
        """
        if max_depth < 1 or n < 1:
            raise ValueError(f"Encoding needs positive sizes, got T={max_depth}, N={n}")
        self.max_depth = max_depth
        self.n = n
        self.tensor = np.zeros((max_depth, n + 3, n), dtype=np.int8)
        self.moments: List[int] = [0] * n

    @property
    def shape(self):
        return self.tensor.shape

    @property
    def depth(self) -> int:
        return max(self.moments)

    def append(self, gate: Gate) -> None:
        """
        Write one gate and advance the moments it touches.

        Raises:
            ValueError: For a gate outside {RX, RY, RZ, CNOT} or a depth overflow
        """
        n = self.n
        if gate.kind == GateKind.CNOT:
            ctrl, targ = gate.qubits
            slot = max(self.moments[ctrl], self.moments[targ])
            self._check_slot(slot)
            self.tensor[slot, targ, ctrl] = 1
            self.moments[ctrl] = self.moments[targ] = slot + 1
        elif gate.kind in AXIS_OF_KIND:
            q = gate.qubits[0]
            slot = self.moments[q]
            self._check_slot(slot)
            self.tensor[slot, n + AXIS_OF_KIND[gate.kind] - 1, q] = 1
            self.moments[q] = slot + 1
        else:
            raise ValueError(f"{gate.kind.value} gates cannot be encoded")

    def _check_slot(self, slot: int) -> None:
        if slot >= self.max_depth:
            raise ValueError(f"Circuit depth exceeds the {self.max_depth} encoding slices")

    def observation(self, last_cost: Optional[float] = None) -> np.ndarray:
        """Flattened float observation, with the last cost appended when given."""
        flat = self.tensor.reshape(-1).astype(float)
        if last_cost is None:
            return flat
        return np.append(flat, float(last_cost))


def encode(circuit: Circuit, max_depth: int, n: int) -> np.ndarray:
    """
    Encode a whole circuit.

    Args:
        circuit: Circuit of RX/RY/RZ/CNOT gates
        max_depth: Depth slices T
        n: Qubit count N, equal to circuit.n

    Returns:
        int8 tensor of shape (T, N + 3, N)
    """
    if circuit.n != n:
        raise ValueError(f"Circuit has {circuit.n} qubits, expected {n}")
    encoder = CircuitEncoder(max_depth, n)
    for gate in circuit:
        encoder.append(gate)
    return encoder.tensor


def observation_size(max_depth: int, n: int, append_cost: bool = False, encoding: str = "tensor") -> int:
    cells = max_depth * IntegerEncoder.ROW if encoding == "integer" else max_depth * (n + 3) * n
    return cells + (1 if append_cost else 0)


def occupied_slices(tensor: np.ndarray) -> int:
    return int(np.count_nonzero(tensor.reshape(tensor.shape[0], -1).any(axis=1)))


class IntegerEncoder:
    """
    Gate-list encoding: one row of four integers per gate, in circuit order.

    A CNOT with control c and target t is (c + 1, t + 1, 0, 0); a rotation
    about axis j on qubit q is (0, 0, q + 1, j). Unused rows stay zero.
    """

    ROW = 4

    def __init__(self, max_gates: int, n: int):
        if max_gates < 1 or n < 1:
            raise ValueError(f"Encoding needs positive sizes, got gates={max_gates}, N={n}")
        self.max_gates = max_gates
        self.n = n
        self.rows = np.zeros((max_gates, self.ROW), dtype=np.int16)
        self.count = 0

    @property
    def shape(self):
        return self.rows.shape

    def append(self, gate: Gate) -> None:
        if self.count >= self.max_gates:
            raise ValueError(f"Circuit exceeds the {self.max_gates} encoded gates")
        if gate.kind == GateKind.CNOT:
            ctrl, targ = gate.qubits
            self.rows[self.count] = (ctrl + 1, targ + 1, 0, 0)
        elif gate.kind in AXIS_OF_KIND:
            self.rows[self.count] = (0, 0, gate.qubits[0] + 1, AXIS_OF_KIND[gate.kind])
        else:
            raise ValueError(f"{gate.kind.value} gates cannot be encoded")
        self.count += 1

    def observation(self, last_cost: Optional[float] = None) -> np.ndarray:
        flat = self.rows.reshape(-1).astype(float)
        if last_cost is None:
            return flat
        return np.append(flat, float(last_cost))


ENCODERS = {"tensor": CircuitEncoder, "integer": IntegerEncoder}


def make_encoder(kind: str, max_depth: int, n: int) -> Union[CircuitEncoder, IntegerEncoder]:
    """Encoder registered under `kind` ("tensor" or "integer")."""
    if kind not in ENCODERS:
        raise ValueError(f"Unknown encoding '{kind}'. Available: {sorted(ENCODERS)}")
    return ENCODERS[kind](max_depth, n)
