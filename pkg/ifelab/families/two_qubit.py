"""
Two interacting qubits with flip-flop coupling:

    H = ω_A σ_z⊗I + ω_B I⊗σ_z + γ(σ₋⊗σ₊ + σ₊⊗σ₋)

Eigenstates are labelled λ₁ = ω_A+ω_B (|++⟩), λ₂ = -ω_A-ω_B (|--⟩) and
λ₃,₄ = ∓√(γ² + (ω_B-ω_A)²) in the one-excitation sector. The closed-form
EigenSystem keeps this labelled order (not ascending) so supports and
coefficient vectors read the same as the labels.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState
from ifelab.core.numerics import EigenSystem, kron
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.operators import SIGMA_MINUS, SIGMA_PLUS, SIGMA_Z

logger = logging.getLogger(__name__)

# Index of |s_A s_B⟩ in the product basis
PP, PM, MP, MM = 0, 1, 2, 3

# Zero-based supports of the coefficient families that keep tr ρ² constant
GIFE_FAMILIES: Dict[str, Tuple[int, ...]] = {
    "c2c4": (1, 3),
    "c1c4": (0, 3),
    "c1c2": (0, 1),
    "c2c3": (1, 2),
    "c1c3": (0, 2),
}
IFE_FAMILY = "c1c2"

_DEGENERATE_NORM = 1e-14


def _one_excitation_vectors(omega_a: float, omega_b: float, gamma: float) -> Tuple[np.ndarray, np.ndarray]:
    detuning = omega_b - omega_a
    root = np.hypot(gamma, detuning)

    def vector(shift: float) -> np.ndarray:
        v = np.zeros(4, dtype=np.complex128)
        v[PM] = gamma
        v[MP] = detuning + shift
        return v

    v3, v4 = vector(-root), vector(root)
    n3, n4 = np.linalg.norm(v3), np.linalg.norm(v4)
    # γ = 0 leaves one (or both) closed-form vectors at zero length
    if n3 < _DEGENERATE_NORM and n4 < _DEGENERATE_NORM:
        v3, v4 = np.eye(4, dtype=np.complex128)[PM], np.eye(4, dtype=np.complex128)[MP]
    elif n3 < _DEGENERATE_NORM:
        v4 = v4 / n4
        v3 = np.zeros(4, dtype=np.complex128)
        v3[PM], v3[MP] = -np.conj(v4[MP]), np.conj(v4[PM])
    elif n4 < _DEGENERATE_NORM:
        v3 = v3 / n3
        v4 = np.zeros(4, dtype=np.complex128)
        v4[PM], v4[MP] = -np.conj(v3[MP]), np.conj(v3[PM])
    return v3 / np.linalg.norm(v3), v4 / np.linalg.norm(v4)


def closed_form_eigensystem(omega_a: float, omega_b: float, gamma: float) -> EigenSystem:
    """Eigenvalues (λ₁, λ₂, λ₃, λ₄) with matching eigenvector columns"""
    root = float(np.hypot(gamma, omega_b - omega_a))
    v3, v4 = _one_excitation_vectors(omega_a, omega_b, gamma)
    vectors = np.zeros((4, 4), dtype=np.complex128)
    vectors[PP, 0] = 1.0
    vectors[MM, 1] = 1.0
    vectors[:, 2], vectors[:, 3] = v3, v4
    values = np.array([omega_a + omega_b, -omega_a - omega_b, -root, root])
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def effective_frequency(eigenvalues: np.ndarray, support: Tuple[int, int]) -> float:
    """
    ω̃ such that ω̃(σ_z⊗I + I⊗σ_z) reproduces the relative phase of the two
    populated eigenstates; the one-excitation states sit at 0 and
    |++⟩, |--⟩ at ±2ω̃.
    """
    lam = eigenvalues
    i, j = support
    if (i, j) == (0, 1):
        return float((lam[0] - lam[1]) / 4.0)
    outer, inner = (i, j) if i in (0, 1) else (j, i)
    sign = 1.0 if outer == 0 else -1.0
    return float(sign * (lam[outer] - lam[inner]) / 2.0)


def two_qubit_xy(omega_a: float, omega_b: float, gamma: float, seed: int = 0) -> FamilyInstance:
    dims = BipartiteDims(2, 2)
    h_i = gamma * (kron(SIGMA_MINUS, SIGMA_PLUS) + kron(SIGMA_PLUS, SIGMA_MINUS))
    hamiltonian = BipartiteHamiltonian(dims, omega_a * SIGMA_Z, omega_b * SIGMA_Z, h_i)
    es = closed_form_eigensystem(omega_a, omega_b, gamma)
    rng = np.random.default_rng(seed)

    gife_states, ife_states = [], []
    for p in range(4):
        state = PureState.from_eigen_coefficients(dims, es, np.eye(4)[p], label=f"lambda{p + 1}")
        gife_states.append(state)
        if p in (0, 1):
            ife_states.append(state)
    for name, support in GIFE_FAMILIES.items():
        c = np.zeros(4, dtype=np.complex128)
        c[list(support)] = rng.normal(size=len(support)) + 1j * rng.normal(size=len(support))
        state = PureState.from_eigen_coefficients(dims, es, c, normalize=True, label=name)
        gife_states.append(state)
        if name == IFE_FAMILY:
            ife_states.append(state)

    omega_tilde = {
        name: effective_frequency(es.eigenvalues, support)
        for name, support in GIFE_FAMILIES.items() if name != IFE_FAMILY
    }
    metadata = {
        "omega_a": omega_a,
        "omega_b": omega_b,
        "gamma": gamma,
        "seed": seed,
        "eigenvalues": es.eigenvalues,
        "gife_families": {name: list(s) for name, s in GIFE_FAMILIES.items()},
        "ife_family": IFE_FAMILY,
        "effective_frequency": omega_tilde,
    }
    logger.debug(f"[FAMILY] two_qubit_xy ωA={omega_a} ωB={omega_b} γ={gamma}")
    return FamilyInstance(
        family="two_qubit_xy",
        hamiltonian=hamiltonian,
        known_gife_states=gife_states,
        known_ife_states=ife_states,
        metadata=metadata,
        eigensystem=es,
    )
