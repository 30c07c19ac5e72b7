"""
Pure dephasing: H = Σ_k P_k ⊗ Z_k with Z_k = ε_k I + H_B + B_k.

Populations of A in the computational basis are conserved; coherences pick
up c_kl(t) = tr(e^{-iZ_k t} ρ_B e^{iZ_l t}).
"""

import logging
from typing import List, Sequence

import numpy as np

from ifelab.core.dynamics import TimeGrid
from ifelab.core.errors import InvalidInputError, ShapeError, UsageError
from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState
from ifelab.core.numerics import (
    EigenSystem,
    as_complex_matrix,
    eig_hermitian,
    kron,
    propagator,
    require_hermitian,
)
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.operators import annihilation, basis_vector, number

logger = logging.getLogger(__name__)

FAMILY = "pure_dephasing"
DENSITY_TOLERANCE = 1e-10
SCALAR_TOLERANCE = 1e-12


def _is_scalar(B: np.ndarray) -> bool:
    shift = np.trace(B) / B.shape[0]
    return float(np.max(np.abs(B - shift * np.eye(B.shape[0])))) <= SCALAR_TOLERANCE * max(1.0, float(np.max(np.abs(B))))


def pure_dephasing(epsilons: Sequence[float], h_b, b_ops: Sequence) -> FamilyInstance:
    epsilons = np.asarray(epsilons, dtype=float)
    dim_a = epsilons.shape[0]
    if len(b_ops) != dim_a:
        raise ShapeError(f"{len(b_ops)} coupling operators for {dim_a} levels")
    h_b = require_hermitian(h_b, "H_B")
    dim_b = h_b.shape[0]
    couplings = []
    for k, B in enumerate(b_ops):
        B = require_hermitian(B, f"B_{k}")
        if B.shape != h_b.shape:
            raise ShapeError(f"B_{k} has shape {B.shape}, expected {h_b.shape}")
        couplings.append(B)

    dims = BipartiteDims(dim_a, dim_b)
    projectors = [np.outer(basis_vector(dim_a, k), basis_vector(dim_a, k)) for k in range(dim_a)]
    h_i = sum(kron(P, B) for P, B in zip(projectors, couplings))
    hamiltonian = BipartiteHamiltonian(dims, np.diag(epsilons), h_b, h_i)

    env = basis_vector(dim_b, 0)
    gife_states, ife_states = [], []
    ife_sectors = []
    for k, B in enumerate(couplings):
        state = PureState.product(dims, basis_vector(dim_a, k), env, label=f"|{k}⟩⊗|0⟩")
        scalar = _is_scalar(B)
        ife_sectors.append(scalar)
        (ife_states if scalar else gife_states).append(state)

    metadata = {
        "epsilons": epsilons,
        "ife_sectors": ife_sectors,
        "environment_hamiltonians": [h_b + B for B in couplings],
    }
    logger.debug(f"[FAMILY] pure_dephasing dimA={dim_a} dimB={dim_b}")
    return FamilyInstance(
        family=FAMILY,
        hamiltonian=hamiltonian,
        known_dfs_bases=[basis_vector(dim_a, k)[:, np.newaxis] for k in range(dim_a)],
        known_gife_states=gife_states,
        known_ife_states=ife_states,
        metadata=metadata,
    )


def sector_generators(instance: FamilyInstance) -> List[np.ndarray]:
    """Z_k read back from the stored Hamiltonian"""
    if instance.family != FAMILY:
        raise UsageError(f"dephasing coefficients need a {FAMILY} instance, got {instance.family}")
    H = instance.hamiltonian
    dim_a, dim_b = H.dims.dim_a, H.dims.dim_b
    blocks = H.h_i.reshape(dim_a, dim_b, dim_a, dim_b)
    identity = np.eye(dim_b)
    return [H.h_a[k, k] * identity + H.h_b + blocks[k, :, k, :] for k in range(dim_a)]


def require_density_matrix(rho, dim: int, name: str = "ρ") -> np.ndarray:
    rho = as_complex_matrix(rho, name)
    if rho.shape != (dim, dim):
        raise ShapeError(f"{name} has shape {rho.shape}, expected ({dim}, {dim})")
    rho = require_hermitian(rho, name)
    trace = np.trace(rho).real
    if abs(trace - 1.0) > DENSITY_TOLERANCE:
        raise InvalidInputError(f"{name} has trace {trace:.12f}")
    lowest = float(np.linalg.eigvalsh(rho)[0])
    if lowest < -DENSITY_TOLERANCE:
        raise InvalidInputError(f"{name} has negative eigenvalue {lowest:.3e}")
    return rho


def dephasing_coefficients(instance: FamilyInstance, rho_b, grid: TimeGrid) -> np.ndarray:
    """
    c_kl(t) for every sample, shape (T, dimA, dimA).

    Raises:
        UsageError: instance was not built by pure_dephasing.
    """
    generators = sector_generators(instance)
    rho_b = require_density_matrix(rho_b, instance.hamiltonian.dims.dim_b, "ρ_B")
    systems: List[EigenSystem] = [eig_hermitian(Z) for Z in generators]
    out = np.empty((len(grid), len(generators), len(generators)), dtype=np.complex128)
    for n, t in enumerate(grid.samples):
        U = np.stack([propagator(None, t, es) for es in systems])
        # tr(U_k ρ U_l†) = Σ_ij (U_k ρ)_ij conj(U_l)_ij
        out[n] = np.einsum("kij,lij->kl", U @ rho_b, U.conj())
    return out


def dephased_reduced_state(instance: FamilyInstance, rho_a, rho_b, grid: TimeGrid) -> np.ndarray:
    """ρ_A(t) = Σ_kl c_kl(t) P_k ρ_A P_l, shape (T, dimA, dimA)"""
    coefficients = dephasing_coefficients(instance, rho_b, grid)
    rho_a = require_density_matrix(rho_a, instance.hamiltonian.dims.dim_a, "ρ_A")
    return coefficients * rho_a[np.newaxis, :, :]


def bosonic_dephasing(epsilons: Sequence[float], mode_frequency: float,
                      couplings: Sequence[float], fock_cutoff: int) -> FamilyInstance:
    """pure_dephasing with H_B = ω a†a and B_k = g_k (a + a†) on one truncated mode"""
    if len(couplings) != len(epsilons):
        raise ShapeError(f"{len(couplings)} couplings for {len(epsilons)} levels")
    a = annihilation(fock_cutoff)
    quadrature = a + a.conj().T
    return pure_dephasing(epsilons, mode_frequency * number(fock_cutoff),
                          [g * quadrature for g in couplings])
