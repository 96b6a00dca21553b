"""
Pauli-string Hamiltonians.

A Hamiltonian file holds one term per line, `<coefficient> <pauli-word>`,
where the word is a string over I, X, Y and Z with qubit 0 first. `#` starts
a comment and blank lines are ignored. Repeated words are merged.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from ..noise.channels import PAULI_I, PAULI_X, PAULI_Y, PAULI_Z
from ..quantum.gates import MAX_QUBITS
from ..quantum.states import QuantumState, partial_trace

logger = logging.getLogger(__name__)

PAULI_LETTERS = "IXYZ"
_PAULI_MATRICES = {"I": PAULI_I, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
_MERGE_TOL = 1e-15


@dataclass(frozen=True)
class PauliTerm:
    """A real coefficient times a Pauli word."""
    coefficient: float
    word: str

    def __post_init__(self):
        coefficient = float(self.coefficient)
        if not math.isfinite(coefficient):
            raise ValueError(f"Coefficient must be finite, got {self.coefficient}")
        word = str(self.word).upper()
        if not word or any(ch not in PAULI_LETTERS for ch in word):
            raise ValueError(f"Invalid Pauli word: {self.word!r}")
        object.__setattr__(self, "coefficient", coefficient)
        object.__setattr__(self, "word", word)

    @property
    def is_identity(self) -> bool:
        return set(self.word) == {"I"}

    def matrix(self) -> np.ndarray:
        m = np.array([[1.0]], dtype=complex)
        for ch in self.word:
            m = np.kron(m, _PAULI_MATRICES[ch])
        return self.coefficient * m


class PauliHamiltonian:
    """
    Weighted sum of n-qubit Pauli words with real coefficients.

    Terms are merged by word in first-seen order; merged coefficients that
    cancel are dropped.
    """

    def __init__(self, terms: Iterable[PauliTerm], n: Optional[int] = None):
        merged: Dict[str, float] = {}
        for term in terms:
            if n is None:
                n = len(term.word)
            if len(term.word) != n:
                raise ValueError(
                    f"Pauli word {term.word!r} has length {len(term.word)}, expected {n}"
                )
            merged[term.word] = merged.get(term.word, 0.0) + term.coefficient
        if n is None:
            raise ValueError("An empty Hamiltonian needs an explicit qubit count")
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"Qubit count must be in 1..{MAX_QUBITS}, got {n}")
        self.n = n
        self.terms: List[PauliTerm] = [
            PauliTerm(c, w) for w, c in merged.items() if abs(c) > _MERGE_TOL
        ]
        self._matrix: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"PauliHamiltonian(n={self.n}, terms={len(self.terms)})"

    def coefficient(self, word: str) -> float:
        word = word.upper()
        return next((t.coefficient for t in self.terms if t.word == word), 0.0)

    @property
    def identity_coefficient(self) -> float:
        return self.coefficient("I" * self.n)

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix, computed once."""
        if self._matrix is None:
            dim = 2 ** self.n
            m = np.zeros((dim, dim), dtype=complex)
            for term in self.terms:
                m += term.matrix()
            m.setflags(write=False)
            self._matrix = m
        return self._matrix

    def to_text(self) -> str:
        return "\n".join(f"{t.coefficient!r} {t.word}" for t in self.terms) + "\n"


def parse_hamiltonian(text: str) -> PauliHamiltonian:
    """
    Parse the Hamiltonian text format.

    Args:
        text: File contents

    Returns:
        Merged Hamiltonian

    Raises:
        ValueError: On a malformed line, an invalid letter or inconsistent word lengths
    """
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"Line {lineno}: expected '<coefficient> <pauli-word>', got {raw!r}")
        try:
            coefficient = float(parts[0])
        except ValueError:
            raise ValueError(f"Line {lineno}: malformed coefficient {parts[0]!r}") from None
        try:
            terms.append(PauliTerm(coefficient, parts[1]))
        except ValueError as e:
            raise ValueError(f"Line {lineno}: {e}") from None
    if not terms:
        raise ValueError("Hamiltonian text contains no terms")
    return PauliHamiltonian(terms)


def load_hamiltonian(path: Union[str, Path]) -> PauliHamiltonian:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Hamiltonian file not found: {path}")
    hamiltonian = parse_hamiltonian(path.read_text(encoding="utf-8"))
    logger.debug(f"Loaded {hamiltonian!r} from {path}")
    return hamiltonian


def heisenberg(n_spins: int) -> PauliHamiltonian:
    """
    Periodic Heisenberg ring sum_j (1/3)(X_j X_j+1 + Y_j Y_j+1 + Z_j Z_j+1).

    Args:
        n_spins: Even number of spins, at least 2

    Returns:
        Hamiltonian on n_spins qubits
    """
    if n_spins < 2 or n_spins % 2:
        raise ValueError(f"n_spins must be even and >= 2, got {n_spins}")
    terms = []
    for j in range(n_spins):
        k = (j + 1) % n_spins
        for letter in "XYZ":
            word = ["I"] * n_spins
            word[j] = word[k] = letter
            terms.append(PauliTerm(1.0 / 3.0, "".join(word)))
    return PauliHamiltonian(terms, n_spins)


def expectation(
    hamiltonian: PauliHamiltonian,
    state: QuantumState,
    shots: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> float:
    """
    Energy Tr(H rho), optionally perturbed by the shot-noise model.

    Args:
        hamiltonian: Observable
        state: State of the same size
        shots: When given, add Gaussian noise of std shot_noise_std(H, shots)
        rng: Generator for the noise draw; required with shots

    Returns:
        Energy estimate
    """
    if hamiltonian.n != state.n:
        raise ValueError(f"Hamiltonian has {hamiltonian.n} qubits but the state has {state.n}")
    h = hamiltonian.matrix()
    if state.is_density:
        value = float(np.real(np.einsum("ij,ji->", h, state.data)))
    else:
        value = float(np.real(np.vdot(state.data, h @ state.data)))
    if shots is None:
        return value
    if rng is None:
        raise ValueError("A seeded generator is required when shots are given")
    return value + float(rng.normal(0.0, shot_noise_std(hamiltonian, shots)))


def shot_noise_std(hamiltonian: PauliHamiltonian, shots: int) -> float:
    """Standard deviation sum_j |c_j| / sqrt(shots) of the shot-noise model."""
    if shots < 1:
        raise ValueError(f"shots must be positive, got {shots}")
    return sum(abs(t.coefficient) for t in hamiltonian.terms) / math.sqrt(shots)


def exact_spectrum(hamiltonian: PauliHamiltonian) -> Tuple[np.ndarray, np.ndarray]:
    """
    Dense eigendecomposition.

    Returns:
        Ascending eigenvalues and the matching eigenvectors as columns
    """
    if hamiltonian.n > MAX_QUBITS:
        raise ValueError(f"Exact diagonalization is capped at {MAX_QUBITS} qubits")
    values, vectors = linalg.eigh(hamiltonian.matrix())
    return values, vectors


def ground_state(hamiltonian: PauliHamiltonian) -> Tuple[float, QuantumState]:
    values, vectors = exact_spectrum(hamiltonian)
    return float(values[0]), QuantumState.from_statevector(vectors[:, 0])


def fake_min_energy(hamiltonian: PauliHamiltonian) -> float:
    """
    Lower bound c_I - sum |c_j| over the non-identity words.

    Every Pauli word has eigenvalues +-1, so this never exceeds the ground energy.
    """
    offset = hamiltonian.identity_coefficient
    return offset - sum(abs(t.coefficient) for t in hamiltonian.terms if not t.is_identity)


def heisenberg_reduced_state(n_spins: int, keep: Sequence[int]) -> QuantumState:
    """
    Reduced density matrix of the Heisenberg ring ground state.

    Args:
        n_spins: Ring size passed to heisenberg()
        keep: Spins kept after tracing out the rest

    Returns:
        Mixed state on len(keep) qubits
    """
    _, psi = ground_state(heisenberg(n_spins))
    return partial_trace(psi, keep)
