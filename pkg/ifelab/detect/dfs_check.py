"""
Decoherence-free subspace checks.
Subsystem A plays the system, B the environment.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_TOLERANCE, ORTHONORMAL_TOLERANCE
from ifelab.core.dynamics import TimeGrid
from ifelab.core.errors import InvalidInputError, ShapeError
from ifelab.core.model import BipartiteHamiltonian, eigensystem_for
from ifelab.core.numerics import (
    as_complex_vector,
    eig_hermitian,
    operator_schmidt_decompose,
    propagate_state,
    reduced_density_matrix,
)
from ifelab.detect.ife_check import IfeVerdict, ife_subspace_check

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DfsVerdict:
    is_dfs: bool
    scalars: Tuple[float, ...]
    weights: Tuple[float, ...]
    effective_env_hamiltonian: Optional[np.ndarray]
    residuals: Tuple[float, ...]
    tolerance: float
    method: str = "zanardi"

    def to_dict(self) -> dict:
        H = self.effective_env_hamiltonian
        return {
            "isDfs": self.is_dfs,
            "scalars": list(self.scalars),
            "weights": list(self.weights),
            "effectiveEnvHamiltonian": None if H is None else np.stack([H.real, H.imag], -1).tolist(),
            "residuals": list(self.residuals),
            "tolerance": self.tolerance,
            "method": self.method,
        }


def orthonormal_columns(basis, dim: int, name: str = "basis") -> np.ndarray:
    """Stack a vector list (or accept a column matrix) and check orthonormality"""
    if isinstance(basis, np.ndarray) and basis.ndim == 2:
        B = basis.astype(np.complex128)
    else:
        B = np.column_stack([as_complex_vector(v, name) for v in basis])
    if B.shape[0] != dim:
        raise ShapeError(f"{name} vectors have length {B.shape[0]}, expected {dim}")
    gram_error = float(np.max(np.abs(B.conj().T @ B - np.eye(B.shape[1]))))
    if gram_error > ORTHONORMAL_TOLERANCE:
        raise InvalidInputError(f"{name} is not orthonormal: max|B†B - I| = {gram_error:.3e}")
    return B


def _leakage(op: np.ndarray, B: np.ndarray) -> float:
    """‖(I - Π)·op·Π‖ for Π = B B†"""
    image = op @ B
    return float(np.linalg.norm(image - B @ (B.conj().T @ image), 2))


def dfs_check(H: BipartiteHamiltonian, subspace_basis, tol: float = DEFAULT_TOLERANCE) -> DfsVerdict:
    """
    Zanardi conditions on span(subspace_basis) ⊂ A: every system factor S_α
    acts as a real scalar c_α there, and the subspace is H_A-invariant.
    """
    B = orthonormal_columns(subspace_basis, H.dims.dim_a, "subspace basis")
    rank = B.shape[1]
    residuals = [_leakage(H.h_a, B)]
    scalars, weights = [], []
    H_eff = H.h_b.copy()
    for term in operator_schmidt_decompose(H.h_i, H.dims.dim_a, H.dims.dim_b):
        compressed = B.conj().T @ term.system_factor @ B
        c = complex(np.trace(compressed)) / rank
        scalar_error = float(np.linalg.norm(compressed - c * np.eye(rank), 2))
        residuals.append(max(scalar_error, _leakage(term.system_factor, B), abs(c.imag)))
        scalars.append(c.real)
        weights.append(term.weight)
        H_eff = H_eff + term.weight * c.real * term.environment_factor
    is_dfs = all(r <= tol for r in residuals)
    logger.debug(f"[DFS] rank={rank} terms={len(scalars)} max residual={max(residuals):.3e}")
    return DfsVerdict(
        is_dfs=is_dfs,
        scalars=tuple(scalars),
        weights=tuple(weights),
        effective_env_hamiltonian=H_eff,
        residuals=tuple(residuals),
        tolerance=tol,
    )


def dfs_to_ife_bridge(H: BipartiteHamiltonian, dfs_basis, env_basis,
                      tol: float = DEFAULT_TOLERANCE) -> IfeVerdict:
    """
    C_DFS⊗C_E is IFE when C_E is H_B-invariant and the environment correction
    H_E^eff - H_B acts on C_E as a single scalar a; the product subspace is
    then confirmed by ife_subspace_check with the common phase a.
    """
    dfs = dfs_check(H, dfs_basis, tol)
    if not dfs.is_dfs:
        return IfeVerdict(False, float("nan"), (), None, tol, "bridge", dfs.residuals)

    S = orthonormal_columns(dfs_basis, H.dims.dim_a, "DFS basis")
    E = orthonormal_columns(env_basis, H.dims.dim_b, "environment basis")
    correction = dfs.effective_env_hamiltonian - H.h_b
    compressed = E.conj().T @ correction @ E
    a = complex(np.trace(compressed)) / E.shape[1]
    conditions = [
        _leakage(H.h_b, E),
        float(np.linalg.norm(compressed - a * np.eye(E.shape[1]), 2)),
        _leakage(correction, E),
        abs(a.imag),
    ]

    subspace = ife_subspace_check(H, np.kron(S, E), tol)
    states_ok = subspace.is_ife and abs(subspace.phase - a.real) <= tol

    is_ife = states_ok and all(c <= tol for c in conditions)
    logger.info(f"[DFS] bridge: conditions={['%.2e' % c for c in conditions]} isIfe={is_ife}")
    return IfeVerdict(
        is_ife=is_ife,
        phase=a.real,
        krylov_residuals=subspace.krylov_residuals,
        dynamic_fidelity_deficit=None,
        tolerance=tol,
        method="bridge",
        condition_residuals=tuple(conditions),
    )


def _trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


def dfs_dynamic_check(H: BipartiteHamiltonian, subspace_basis, env_states: Sequence,
                      grid: TimeGrid, tol: float = DEFAULT_TOLERANCE) -> DfsVerdict:
    """
    Direct test of unitary reduced dynamics: for each environment state and
    each trial system state (basis vectors and their uniform superposition),
    ρ_A(t) must equal e^{-iH_A t}ρ_A e^{iH_A t}. Residuals are the maximal
    trace distances, one per environment state.
    """
    B = orthonormal_columns(subspace_basis, H.dims.dim_a, "subspace basis")
    trials = list(B.T) + [B.sum(axis=1) / np.sqrt(B.shape[1])]
    es = eigensystem_for(H)
    es_a = eig_hermitian(H.h_a)
    residuals = []
    for phi in env_states:
        phi = as_complex_vector(phi, "environment state")
        phi = phi / np.linalg.norm(phi)
        worst = 0.0
        for s in trials:
            rows = propagate_state(None, np.kron(s, phi), grid.samples, eigensystem=es)
            local = propagate_state(None, s, grid.samples, eigensystem=es_a)
            for row, expected in zip(rows, local):
                rho = reduced_density_matrix(row, H.dims.dim_a, H.dims.dim_b, keep="A")
                worst = max(worst, _trace_distance(rho, np.outer(expected, expected.conj())))
        residuals.append(worst)
    return DfsVerdict(
        is_dfs=all(r <= tol for r in residuals),
        scalars=(),
        weights=(),
        effective_env_hamiltonian=None,
        residuals=tuple(residuals),
        tolerance=tol,
        method="dynamic",
    )
