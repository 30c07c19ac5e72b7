"""
Standard local operators.
Qubit basis order is (|+⟩, |-⟩) with σ_z = diag(1, -1).
"""

from functools import reduce
from typing import Sequence

import numpy as np

from ifelab.core.errors import InvalidInputError

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=np.complex128)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

KET_PLUS = np.array([1.0, 0.0], dtype=np.complex128)
KET_MINUS = np.array([0.0, 1.0], dtype=np.complex128)


def annihilation(d: int) -> np.ndarray:
    """Ladder operator on d Fock levels; a|d-1⟩ is chopped"""
    if d < 2:
        raise InvalidInputError(f"Fock cutoff must be ≥ 2, got {d}")
    return np.diag(np.sqrt(np.arange(1, d, dtype=float)), k=1).astype(np.complex128)


def number(d: int) -> np.ndarray:
    return np.diag(np.arange(d, dtype=float)).astype(np.complex128)


def fock_state(d: int, n: int) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    v[n] = 1.0
    return v


def embed(op: np.ndarray, site: int, local_dims: Sequence[int]) -> np.ndarray:
    """I⊗…⊗op⊗…⊗I with op at `site`"""
    factors = [op if i == site else np.eye(d, dtype=np.complex128) for i, d in enumerate(local_dims)]
    return reduce(np.kron, factors)


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v
