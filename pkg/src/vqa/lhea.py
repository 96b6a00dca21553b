"""
Layered hardware-efficient ansatz (LHEA) builders.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple

from ..quantum.gates import Circuit, Gate, GateKind


class LheaFlavor(str, Enum):
    """Two-qubit block used by one LHEA layer."""
    RYCZ = "RYCZ"
    RZRX_CNOT = "RZRX_CNOT"
    RYRZRY_CNOT = "RYRZRY_CNOT"


# Single-qubit rotations placed on both qubits before and after the entangler
_BLOCKS = {
    LheaFlavor.RYCZ: ((GateKind.RY,), GateKind.CZ),
    LheaFlavor.RZRX_CNOT: ((GateKind.RZ, GateKind.RX), GateKind.CNOT),
    LheaFlavor.RYRZRY_CNOT: ((GateKind.RY, GateKind.RZ, GateKind.RY), GateKind.CNOT),
}


def nearest_neighbor_pairs(n: int) -> List[Tuple[int, int]]:
    return [(q, q + 1) for q in range(n - 1)]


@dataclass(frozen=True)
class LheaSpec:
    """
    Args:
        layers: Number of layers
        flavor: Two-qubit block
        connectivity: Qubit pairs per layer; nearest neighbors when omitted
    """
    layers: int
    flavor: LheaFlavor = LheaFlavor.RYRZRY_CNOT
    connectivity: Optional[Tuple[Tuple[int, int], ...]] = None

    def __post_init__(self):
        if self.layers < 1:
            raise ValueError(f"layers must be positive, got {self.layers}")
        object.__setattr__(self, "flavor", LheaFlavor(self.flavor))

    def pairs(self, n: int) -> List[Tuple[int, int]]:
        if self.connectivity is None:
            return nearest_neighbor_pairs(n)
        return [tuple(p) for p in self.connectivity]


def _rotations(circuit: Circuit, kinds: Sequence[GateKind], pair: Tuple[int, int]) -> None:
    for q in pair:
        for kind in kinds:
            circuit.append(Gate(kind, (q,), 0.0))


def build_lhea(n: int, spec: LheaSpec) -> Circuit:
    """
    Layered ansatz with zero placeholder angles.

    Each layer visits every pair in the connectivity and applies the flavor's
    rotations on both qubits, the entangler, then the rotations again.

    Args:
        n: Qubit count, at least 2
        spec: Layer count, flavor and connectivity

    Returns:
        Circuit template for `bind`
    """
    if n < 2:
        raise ValueError(f"LHEA needs at least 2 qubits, got {n}")
    kinds, entangler = _BLOCKS[LheaFlavor(spec.flavor)]
    circuit = Circuit(n)
    for _ in range(spec.layers):
        for pair in spec.pairs(n):
            _rotations(circuit, kinds, pair)
            circuit.append(Gate(entangler, pair))
            _rotations(circuit, kinds, pair)
    return circuit


def lhea_parameter_count(n: int, spec: LheaSpec) -> int:
    kinds, _ = _BLOCKS[LheaFlavor(spec.flavor)]
    return spec.layers * len(spec.pairs(n)) * 4 * len(kinds)


def build_certification_ansatz(n: int, layers: int, entangler: str = "CNOT") -> Circuit:
    """
    Layers of RY and RZ on every qubit, each followed by an entangler chain.

    Args:
        n: Qubit count
        layers: Number of layers
        entangler: "CNOT" or "CZ"

    Returns:
        Circuit template with zero placeholder angles
    """
    kind = GateKind(entangler.upper())
    if kind.arity != 2:
        raise ValueError(f"Entangler must be a two-qubit gate, got {entangler}")
    if layers < 1:
        raise ValueError(f"layers must be positive, got {layers}")
    circuit = Circuit(n)
    for _ in range(layers):
        for q in range(n):
            circuit.append(Gate(GateKind.RY, (q,), 0.0))
            circuit.append(Gate(GateKind.RZ, (q,), 0.0))
        for q in range(n - 1):
            circuit.append(Gate(kind, (q, q + 1)))
    return circuit
