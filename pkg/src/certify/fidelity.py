"""
Fidelity between density matrices and the bounds used for certification.

Two conventions coexist: the sub- and super-fidelity sandwich the squared
fidelity F^2, while the truncated bounds sandwich F = Tr sqrt(sqrt(rho) sigma sqrt(rho)).
"""

import logging
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np
from scipy import linalg

from ..quantum.states import QuantumState

logger = logging.getLogger(__name__)

PSD_TOL = 1e-8

# Negative radicands clipped to zero, per bound
RADICAND_CLIPS: Counter = Counter()

StateLike = Union[QuantumState, np.ndarray]


class FidelityConvention(str, Enum):
    SQRT = "sqrt_fidelity"
    SQUARED = "squared_fidelity"


@dataclass(frozen=True)
class FidelityBounds:
    lower: float
    upper: float
    m: int
    convention: FidelityConvention = FidelityConvention.SQRT

    def __post_init__(self):
        if self.lower > self.upper + 1e-10:
            raise ValueError(f"Lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def to_dict(self) -> dict:
        return {"m": self.m, "lower": self.lower, "upper": self.upper, "convention": self.convention.value}


def _matrix(state: StateLike) -> np.ndarray:
    if isinstance(state, QuantumState):
        return state.to_density().data
    return np.asarray(state, dtype=complex)


def _check_pair(rho: np.ndarray, sigma: np.ndarray) -> None:
    if rho.shape != sigma.shape:
        raise ValueError(f"Dimension mismatch: {rho.shape} vs {sigma.shape}")


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    w, v = linalg.eigh(matrix)
    if w.min() < -PSD_TOL:
        raise ValueError(f"Matrix is not positive semidefinite (eigenvalue {w.min():.3e})")
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity_exact(rho: StateLike, sigma: StateLike) -> float:
    """
    Tr sqrt(sqrt(rho) sigma sqrt(rho)) through eigendecompositions.

    Raises:
        ValueError: On mismatched dimensions or a non-PSD input
    """
    r, s = _matrix(rho), _matrix(sigma)
    _check_pair(r, s)
    root = _psd_sqrt(r)
    inner = root @ s @ root
    w = linalg.eigvalsh((inner + inner.conj().T) / 2)
    if w.min() < -PSD_TOL:
        raise ValueError(f"sigma is not positive semidefinite (eigenvalue {w.min():.3e})")
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def _clipped_sqrt(value: float, name: str) -> float:
    if value < 0.0:
        RADICAND_CLIPS[name] += 1
        logger.debug(f"{name}: negative radicand {value:.3e} clipped to 0")
        return 0.0
    return float(np.sqrt(value))


def subfidelity(rho: StateLike, sigma: StateLike) -> float:
    """Tr(rho sigma) + sqrt(2[(Tr rho sigma)^2 - Tr(rho sigma rho sigma)]); a lower bound on F^2."""
    r, s = _matrix(rho), _matrix(sigma)
    _check_pair(r, s)
    rs = r @ s
    overlap = float(np.real(np.trace(rs)))
    radicand = 2.0 * (overlap ** 2 - float(np.real(np.trace(rs @ rs))))
    return overlap + _clipped_sqrt(radicand, "subfidelity")


def superfidelity(rho: StateLike, sigma: StateLike) -> float:
    """Tr(rho sigma) + sqrt((1 - Tr rho^2)(1 - Tr sigma^2)); an upper bound on F^2."""
    r, s = _matrix(rho), _matrix(sigma)
    _check_pair(r, s)
    overlap = float(np.real(np.trace(r @ s)))
    pr = float(np.real(np.trace(r @ r)))
    ps = float(np.real(np.trace(s @ s)))
    return overlap + _clipped_sqrt((1.0 - pr) * (1.0 - ps), "superfidelity")


def sub_super_bounds(rho: StateLike, sigma: StateLike) -> FidelityBounds:
    """Sub- and super-fidelity packed as bounds on the squared fidelity."""
    dim = _matrix(rho).shape[0]
    return FidelityBounds(
        lower=subfidelity(rho, sigma),
        upper=superfidelity(rho, sigma),
        m=dim,
        convention=FidelityConvention.SQUARED,
    )


def truncated_bounds(
    r: np.ndarray,
    vecs: np.ndarray,
    sigma: StateLike,
    m: int,
) -> FidelityBounds:
    """
    Truncated fidelity bounds from the m largest eigenpairs of rho.

    Args:
        r: Eigenvalues of rho, descending
        vecs: Matching eigenvectors as columns
        sigma: Second state
        m: Truncation rank

    Returns:
        Bounds on the (square-root) fidelity

    Raises:
        ValueError: For m outside 1..len(r) or negative eigenvalues
    """
    r = np.asarray(r, dtype=float)
    vecs = np.asarray(vecs, dtype=complex)
    s = _matrix(sigma)
    if not 1 <= m <= r.size:
        raise ValueError(f"Truncation rank must be in 1..{r.size}, got {m}")
    if vecs.shape[1] < m or vecs.shape[0] != s.shape[0]:
        raise ValueError(f"Eigenvector matrix of shape {vecs.shape} does not fit rank {m}")
    if r[:m].min() < -1e-12:
        raise ValueError(f"Eigenvalues must be nonnegative, got {r[:m].min():.3e}")
    rm = np.clip(r[:m], 0.0, None)
    basis = vecs[:, :m]
    sigma_block = basis.conj().T @ s @ basis
    roots = np.sqrt(rm)
    t = np.outer(roots, roots) * sigma_block
    lam = linalg.eigvalsh((t + t.conj().T) / 2)
    if lam.min() < -1e-10:
        logger.debug(f"T matrix eigenvalue {lam.min():.3e} clipped")
    lower = float(np.sum(np.sqrt(np.clip(lam, 0.0, None))))
    tail_rho = max(0.0, 1.0 - float(rm.sum()))
    tail_sigma = max(0.0, 1.0 - float(np.real(np.trace(sigma_block))))
    upper = lower + float(np.sqrt(tail_rho * tail_sigma))
    return FidelityBounds(lower=lower, upper=upper, m=m, convention=FidelityConvention.SQRT)
