"""
Gate and circuit types for the simulator.

Qubit 0 is the most significant bit of a basis-state index. Two-qubit gates
list their qubits as (control, target); the local 4x4 matrix of such a gate
uses the first listed qubit as its most significant bit.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

MAX_QUBITS = 10


class GateKind(str, Enum):
    """Supported gate kinds."""
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    CNOT = "CNOT"
    CZ = "CZ"
    X = "X"
    H = "H"

    @property
    def arity(self) -> int:
        return 2 if self in (GateKind.CNOT, GateKind.CZ) else 1

    @property
    def is_rotation(self) -> bool:
        return self in ROTATION_KINDS


ROTATION_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ})

# Rotation axis numbering used by the action encoding: 1=X, 2=Y, 3=Z.
AXIS_OF_KIND = {GateKind.RX: 1, GateKind.RY: 2, GateKind.RZ: 3}
KIND_OF_AXIS = {axis: kind for kind, axis in AXIS_OF_KIND.items()}

_SQRT2_INV = 1.0 / math.sqrt(2.0)
_FIXED_MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV,
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
}


def rotation_matrix(kind: GateKind, angle: float) -> np.ndarray:
    """
    Return the 2x2 matrix of a half-angle rotation.

    Args:
        kind: RX, RY or RZ
        angle: Rotation angle in radians

    Returns:
        Complex 2x2 unitary
    """
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    if kind == GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == GateKind.RZ:
        return np.array(
            [[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]], dtype=complex
        )
    raise ValueError(f"Not a rotation kind: {kind}")


@dataclass(frozen=True)
class Gate:
    """
    A gate application: kind, target qubits and (for rotations) an angle.

    Args:
        kind: Gate kind
        qubits: Target qubits; (control, target) for two-qubit kinds
        angle: Rotation angle, required for RX/RY/RZ and forbidden otherwise

    Raises:
        ValueError: On wrong arity, repeated qubits or a bad angle
    """
    kind: GateKind
    qubits: Tuple[int, ...]
    angle: Optional[float] = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        qubits = tuple(int(q) for q in self.qubits)
        angle = self.angle
        if len(qubits) != kind.arity:
            raise ValueError(f"{kind.value} acts on {kind.arity} qubit(s), got {qubits}")
        if len(set(qubits)) != len(qubits):
            raise ValueError(f"Gate qubits must be distinct, got {qubits}")
        if any(q < 0 for q in qubits):
            raise IndexError(f"Negative qubit index in {qubits}")
        if kind.is_rotation:
            if angle is None:
                raise ValueError(f"{kind.value} requires an angle")
            angle = float(angle)
            if not math.isfinite(angle):
                raise ValueError(f"Angle must be finite, got {angle}")
        elif angle is not None:
            raise ValueError(f"{kind.value} takes no angle")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "angle", angle)

    def __repr__(self) -> str:
        if self.angle is None:
            return f"Gate({self.kind.value}, {self.qubits})"
        return f"Gate({self.kind.value}, {self.qubits}, {self.angle:.6g})"

    @property
    def is_rotation(self) -> bool:
        return self.kind.is_rotation

    def with_angle(self, angle: float) -> "Gate":
        return Gate(self.kind, self.qubits, angle)

    def matrix(self) -> np.ndarray:
        """Local unitary of the gate (2x2 or 4x4)."""
        if self.kind.is_rotation:
            return rotation_matrix(self.kind, self.angle)
        return _FIXED_MATRICES[self.kind]

    def inverse(self) -> "Gate":
        if self.kind.is_rotation:
            return Gate(self.kind, self.qubits, -self.angle)
        # X, H, CNOT and CZ are self-inverse
        return self


class Circuit:
    """
    Ordered gate list over n qubits with per-qubit moment counters.

    A single-qubit gate advances the moment of its qubit by one; a two-qubit
    gate moves both of its qubits to max(moments) + 1. The depth is the
    largest moment.
    """

    def __init__(self, n: int, gates: Optional[Iterable[Gate]] = None):
        """
        Initialize a circuit.

        Args:
            n: Number of qubits (1..MAX_QUBITS)
            gates: Optional gates to append in order
        """
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"Qubit count must be in 1..{MAX_QUBITS}, got {n}")
        self.n = n
        self.gates: List[Gate] = []
        self.moments: List[int] = [0] * n
        for gate in gates or ():
            self.append(gate)

    def append(self, gate: Gate) -> "Circuit":
        """Append a gate, updating the moment counters."""
        for q in gate.qubits:
            if q >= self.n:
                raise IndexError(f"Qubit {q} out of range for {self.n}-qubit circuit")
        self.gates.append(gate)
        _advance_moments(self.moments, gate)
        return self

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def __repr__(self) -> str:
        return f"Circuit(n={self.n}, gates={self.gates!r})"

    @property
    def depth(self) -> int:
        return max(self.moments) if self.moments else 0

    def recompute_depth(self) -> int:
        """Depth recomputed from the gate list alone."""
        moments = [0] * self.n
        for gate in self.gates:
            _advance_moments(moments, gate)
        return max(moments)

    @property
    def gate_count(self) -> int:
        return len(self.gates)

    @property
    def rotation_count(self) -> int:
        return sum(1 for g in self.gates if g.is_rotation)

    @property
    def num_parameters(self) -> int:
        return self.rotation_count

    @property
    def cnot_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == GateKind.CNOT)

    def angles(self) -> np.ndarray:
        return np.array([g.angle for g in self.gates if g.is_rotation], dtype=float)

    def bind(self, angles: Sequence[float]) -> "Circuit":
        """
        Return a copy with rotation angles replaced in gate order.

        Args:
            angles: One angle per rotation gate

        Returns:
            New circuit with the same structure
        """
        angles = np.asarray(angles, dtype=float).ravel()
        if angles.size != self.num_parameters:
            raise ValueError(
                f"Expected {self.num_parameters} angles, got {angles.size}"
            )
        bound = Circuit(self.n)
        it = iter(angles)
        for gate in self.gates:
            bound.append(gate.with_angle(next(it)) if gate.is_rotation else gate)
        return bound

    def inverse(self) -> "Circuit":
        return Circuit(self.n, [g.inverse() for g in reversed(self.gates)])

    def copy(self) -> "Circuit":
        return Circuit(self.n, self.gates)

    def structure(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Angle-free description of the gates, handy for logs."""
        return [(g.kind.value, g.qubits) for g in self.gates]


def _advance_moments(moments: List[int], gate: Gate) -> None:
    if gate.kind.arity == 1:
        moments[gate.qubits[0]] += 1
    else:
        top = max(moments[q] for q in gate.qubits)
        for q in gate.qubits:
            moments[q] = top + 1
