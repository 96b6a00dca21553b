"""
Action codes and their enumeration.

An action is a 4-integer code over N qubits:

    [ctrl, offset, N, N]   CNOT with control ctrl and target (ctrl + offset) mod N
    [N, N, qubit, axis]    rotation on qubit about axis 1=X, 2=Y, 3=Z

Indices enumerate the 3N rotations first (qubit-major, axis-minor) and then
the N(N-1) CNOTs (control-major, offset-minor).
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..quantum.gates import AXIS_OF_KIND, KIND_OF_AXIS, Gate, GateKind


def action_count(n: int) -> int:
    return 3 * n + n * (n - 1)


@dataclass(frozen=True)
class Action:
    """A decoded action over n qubits."""
    code: Tuple[int, int, int, int]
    n: int

    def __post_init__(self):
        code = tuple(int(v) for v in self.code)
        n = int(self.n)
        if len(code) != 4:
            raise ValueError(f"Action code must have 4 entries, got {code}")
        if code[0] == n and code[1] == n:
            if not 0 <= code[2] < n or not 1 <= code[3] <= 3:
                raise ValueError(f"Invalid rotation code {code} for {n} qubits")
        elif code[2] == n and code[3] == n:
            if not 0 <= code[0] < n or not 1 <= code[1] <= n - 1:
                raise ValueError(f"Invalid CNOT code {code} for {n} qubits")
        else:
            raise ValueError(f"Action code {code} is neither a CNOT nor a rotation")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "n", n)

    @property
    def is_cnot(self) -> bool:
        return self.code[2] == self.n

    @property
    def qubits(self) -> Tuple[int, ...]:
        """(control, target) for a CNOT, (qubit,) for a rotation."""
        if self.is_cnot:
            return (self.code[0], (self.code[0] + self.code[1]) % self.n)
        return (self.code[2],)

    @property
    def axis(self) -> Optional[int]:
        return None if self.is_cnot else self.code[3]

    def to_gate(self, angle: float = 0.0) -> Gate:
        if self.is_cnot:
            return Gate(GateKind.CNOT, self.qubits)
        return Gate(KIND_OF_AXIS[self.code[3]], self.qubits, angle)

    @property
    def index(self) -> int:
        return encode_action(self)

    @classmethod
    def rotation(cls, n: int, qubit: int, axis: int) -> "Action":
        return cls((n, n, qubit, axis), n)

    @classmethod
    def cnot(cls, n: int, control: int, target: int) -> "Action":
        return cls((control, (target - control) % n, n, n), n)

    @classmethod
    def from_gate(cls, gate: Gate, n: int) -> "Action":
        if gate.kind == GateKind.CNOT:
            return cls.cnot(n, *gate.qubits)
        if gate.kind in AXIS_OF_KIND:
            return cls.rotation(n, gate.qubits[0], AXIS_OF_KIND[gate.kind])
        raise ValueError(f"{gate.kind.value} is not part of the action set")


def decode_action(index: int, n: int) -> Action:
    """
    Map an action index to its code.

    Raises:
        IndexError: When index is outside 0..3N + N(N-1) - 1
    """
    index = int(index)
    if not 0 <= index < action_count(n):
        raise IndexError(f"Action index {index} out of range for {n} qubits")
    if index < 3 * n:
        return Action.rotation(n, index // 3, index % 3 + 1)
    rest = index - 3 * n
    return Action((rest // (n - 1), rest % (n - 1) + 1, n, n), n)


def encode_action(action: Action) -> int:
    n = action.n
    if action.is_cnot:
        ctrl, offset = action.code[0], action.code[1]
        return 3 * n + ctrl * (n - 1) + offset - 1
    return 3 * action.code[2] + action.code[3] - 1


class ActionSpace:
    """
    The full action enumeration over n qubits, optionally restricting which
    CNOT (control, target) pairs may be chosen.
    """

    def __init__(self, n: int, allowed_pairs: Optional[Sequence[Tuple[int, int]]] = None):
        """
        Initialize an action space.

        Args:
            n: Qubit count
            allowed_pairs: Permitted (control, target) pairs; all pairs when omitted
        """
        if n < 1:
            raise ValueError(f"Qubit count must be positive, got {n}")
        self.n = n
        self.size = action_count(n)
        self.actions: List[Action] = [decode_action(i, n) for i in range(self.size)]
        self.allowed = np.ones(self.size, dtype=bool)
        if allowed_pairs is not None:
            pairs = {(int(c), int(t)) for c, t in allowed_pairs}
            for c, t in pairs:
                if not (0 <= c < n and 0 <= t < n) or c == t:
                    raise ValueError(f"Invalid CNOT pair ({c}, {t}) for {n} qubits")
            for i, action in enumerate(self.actions):
                if action.is_cnot and action.qubits not in pairs:
                    self.allowed[i] = False

    def __len__(self) -> int:
        return self.size

    def decode(self, index: int) -> Action:
        if not 0 <= index < self.size:
            raise IndexError(f"Action index {index} out of range for {self.n} qubits")
        return self.actions[index]
