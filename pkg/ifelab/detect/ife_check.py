"""
Interaction-free evolution checks
=================================
Algebraic test on the H_0-cyclic (Krylov) subspace and the dynamic fidelity
test against free evolution.

Lemma used by the algebraic test: if K is H_0-invariant, contains χ, and
H_I q = a·q for every q in K, then H = H_0 + a on K, so
e^{-iHt}χ = e^{-iat}e^{-iH_0 t}χ. Conversely the n=0 condition forces
a = ⟨χ|H_I|χ⟩.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from config.settings import DEFAULT_TOLERANCE, KRYLOV_CUTOFF
from ifelab.core.dynamics import TimeGrid
from ifelab.core.model import (
    BipartiteHamiltonian,
    eigensystem_for,
    local_eigensystem,
    state_vector,
)
from ifelab.core.numerics import propagate_state, require_hermitian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IfeVerdict:
    is_ife: bool
    phase: float
    krylov_residuals: Tuple[float, ...]
    dynamic_fidelity_deficit: Optional[float]
    tolerance: float
    method: str
    condition_residuals: Tuple[float, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "isIfe": self.is_ife,
            "phase": self.phase if np.isfinite(self.phase) else None,
            "krylovResiduals": list(self.krylov_residuals),
            "dynamicFidelityDeficit": self.dynamic_fidelity_deficit,
            "conditionResiduals": list(self.condition_residuals),
            "tolerance": self.tolerance,
            "method": self.method,
        }


def krylov_basis(H0: np.ndarray, start: np.ndarray, cutoff: float = KRYLOV_CUTOFF) -> np.ndarray:
    """
    Orthonormal basis of span{H0^n v : n ≥ 0, v a column of start}.

    Modified Gram-Schmidt with one re-orthogonalization pass; a new direction
    is dropped when its residual is ≤ cutoff relative to its norm before
    projection.
    """
    start = np.asarray(start, dtype=np.complex128)
    if start.ndim == 1:
        start = start[:, np.newaxis]
    D = start.shape[0]
    basis = []

    def extend(w: np.ndarray) -> bool:
        reference = np.linalg.norm(w)
        if reference == 0.0 or len(basis) >= D:
            return False
        for _ in range(2):
            for q in basis:
                w = w - np.vdot(q, w) * q
        norm = np.linalg.norm(w)
        if norm <= cutoff * reference:
            return False
        basis.append(w / norm)
        return True

    frontier = [basis[-1] for col in start.T if extend(col)]
    while frontier:
        frontier = [basis[-1] for q in frontier if extend(H0 @ q)]
    return np.stack(basis, axis=1) if basis else np.zeros((D, 0), dtype=np.complex128)


def _scalar_action_residuals(H_I: np.ndarray, Q: np.ndarray, a: float) -> np.ndarray:
    return np.linalg.norm(H_I @ Q - a * Q, axis=0)


def ife_algebraic_check(H: BipartiteHamiltonian, chi, tol: float = DEFAULT_TOLERANCE) -> IfeVerdict:
    amps = state_vector(chi, H.dims)
    H_I = require_hermitian(H.h_i, "H_I")
    a = complex(np.vdot(amps, H_I @ amps))
    Q = krylov_basis(H.free_part, amps)
    residuals = _scalar_action_residuals(H_I, Q, a.real)
    is_ife = abs(a.imag) <= tol and bool(np.all(residuals <= tol))
    logger.debug(f"[IFE] algebraic: krylov dim={Q.shape[1]} max residual={residuals.max():.3e}")
    return IfeVerdict(
        is_ife=is_ife,
        phase=a.real,
        krylov_residuals=tuple(float(r) for r in residuals),
        dynamic_fidelity_deficit=None,
        tolerance=tol,
        method="algebraic",
    )


def ife_dynamic_check(H: BipartiteHamiltonian, chi, grid: TimeGrid,
                      tol: float = DEFAULT_TOLERANCE) -> IfeVerdict:
    """max_t 1 - |⟨U_0(t)χ|U(t)χ⟩|"""
    amps = state_vector(chi, H.dims)
    full = propagate_state(None, amps, grid.samples, eigensystem=eigensystem_for(H))
    free = propagate_state(None, amps, grid.samples, eigensystem=local_eigensystem(H.h_a, H.h_b))
    overlaps = np.abs(np.einsum("td,td->t", free.conj(), full))
    deficit = float(max(0.0, np.max(1.0 - overlaps)))
    phase = float(np.vdot(amps, H.h_i @ amps).real)
    logger.debug(f"[IFE] dynamic: deficit={deficit:.3e}")
    return IfeVerdict(
        is_ife=deficit <= tol,
        phase=phase,
        krylov_residuals=(),
        dynamic_fidelity_deficit=deficit,
        tolerance=tol,
        method="dynamic",
    )


def ife_subspace_check(H: BipartiteHamiltonian, basis: np.ndarray,
                       tol: float = DEFAULT_TOLERANCE) -> IfeVerdict:
    """
    Whole-subspace IFE test: H_I must act as one scalar a on the joint
    H_0-cyclic closure of the columns of basis (orthonormal, total space).
    """
    B = np.asarray(basis, dtype=np.complex128)
    if B.ndim == 1:
        B = B[:, np.newaxis]
    H_I = require_hermitian(H.h_i, "H_I")
    a = complex(np.trace(B.conj().T @ H_I @ B)) / B.shape[1]
    Q = krylov_basis(H.free_part, B)
    residuals = _scalar_action_residuals(H_I, Q, a.real)
    return IfeVerdict(
        is_ife=abs(a.imag) <= tol and bool(np.all(residuals <= tol)),
        phase=a.real,
        krylov_residuals=tuple(float(r) for r in residuals),
        dynamic_fidelity_deficit=None,
        tolerance=tol,
        method="subspace",
    )
