"""
Projector family
================
Given projectors Π_A, Π_B onto S_A, S_B and local operators commuting with
them, the interaction

    H_I = Δ_A⊗Π_B + Π_A⊗Δ_B + Δ⊥,      Δ⊥ = Q M Q,  Q = I - Π_A⊗Π_B

makes every state of S_A⊗S_B evolve under the corrected local Hamiltonians
H_A + Δ_A and H_B + Δ_B. When Δ also commutes with H on each side, products
of common eigenvectors inside S_A⊗S_B are interaction-free with phase rate
α + β (the Δ_A, Δ_B eigenvalues).
"""

import logging
from dataclasses import replace
from typing import List, Optional

import numpy as np

from config.settings import DEFAULT_SEED
from ifelab.core.errors import InvalidInputError, ShapeError
from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState
from ifelab.core.numerics import (
    as_complex_matrix,
    kron,
    random_hermitian,
    random_state,
    random_unitary,
    require_hermitian,
)
from ifelab.families.family_instance import FamilyInstance
from ifelab.gife.gife_effective import effective_split

logger = logging.getLogger(__name__)

FAMILY = "projector_family"
PROJECTOR_TOLERANCE = 1e-12
COMMUTATOR_TOLERANCE = 1e-10


# ─────────────────────  VALIDATION  ──────────────────────────────────────────

def _require_projector(P, name: str) -> np.ndarray:
    P = as_complex_matrix(P, name)
    if P.shape[0] != P.shape[1]:
        raise ShapeError(f"{name} must be square, got {P.shape}")
    idempotency = float(np.max(np.abs(P @ P - P)))
    hermiticity = float(np.max(np.abs(P - P.conj().T)))
    if max(idempotency, hermiticity) > PROJECTOR_TOLERANCE:
        raise InvalidInputError(
            f"{name} is not an orthogonal projector: |Π²-Π| = {idempotency:.3e}, |Π-Π†| = {hermiticity:.3e}"
        )
    return P


def _require_commuting(X: np.ndarray, P: np.ndarray, name: str) -> None:
    if X.shape != P.shape:
        raise ShapeError(f"{name} has shape {X.shape}, expected {P.shape}")
    norm = float(np.linalg.norm(X @ P - P @ X, 2))
    if norm > COMMUTATOR_TOLERANCE:
        raise InvalidInputError(f"‖[{name}, Π]‖ = {norm:.3e} exceeds {COMMUTATOR_TOLERANCE:g}")


def range_basis(P: np.ndarray) -> np.ndarray:
    """Orthonormal columns spanning the range of a projector"""
    values, vectors = np.linalg.eigh(P)
    return vectors[:, values > 0.5]


# ─────────────────────  GENERATORS  ──────────────────────────────────────────

def projector_family(pi_a, pi_b, h_a, h_b, delta_a, delta_b,
                     seed: int = DEFAULT_SEED, perp_scale: float = 1.0) -> FamilyInstance:
    """
    Args:
        perp_scale: weight of Δ⊥; 0 drops it.

    Raises:
        InvalidInputError: a projector is not idempotent/Hermitian or a
            commutator with Π is above tolerance (message carries the norm).
    """
    pi_a = _require_projector(pi_a, "Π_A")
    pi_b = _require_projector(pi_b, "Π_B")
    h_a, h_b = require_hermitian(h_a, "H_A"), require_hermitian(h_b, "H_B")
    delta_a, delta_b = require_hermitian(delta_a, "Δ_A"), require_hermitian(delta_b, "Δ_B")
    for X, P, name in ((h_a, pi_a, "H_A"), (delta_a, pi_a, "Δ_A"),
                       (h_b, pi_b, "H_B"), (delta_b, pi_b, "Δ_B")):
        _require_commuting(X, P, name)

    dims = BipartiteDims(pi_a.shape[0], pi_b.shape[0])
    rng = np.random.default_rng(seed)
    Q = np.eye(dims.total) - kron(pi_a, pi_b)
    perp = perp_scale * (Q @ random_hermitian(dims.total, rng) @ Q)
    h_i = kron(delta_a, pi_b) + kron(pi_a, delta_b) + perp
    hamiltonian = BipartiteHamiltonian(dims, h_a, h_b, h_i)

    h_a_eff, h_b_eff = h_a + delta_a, h_b + delta_b
    h_i_eff = effective_split(hamiltonian, h_a_eff, h_b_eff).h_i

    basis_a, basis_b = range_basis(pi_a), range_basis(pi_b)
    gife_states = [
        PureState.product(dims, basis_a[:, i], basis_b[:, j], label=f"S_A[{i}]⊗S_B[{j}]")
        for i in range(basis_a.shape[1]) for j in range(basis_b.shape[1])
    ]
    mix = random_state(basis_a.shape[1] * basis_b.shape[1], rng)
    gife_states.append(PureState.from_amplitudes(
        dims, kron(basis_a, basis_b) @ mix, normalize=True, label="S_AB random"))

    free = float(np.max(np.abs(h_i))) == 0.0
    metadata = {
        "seed": seed,
        "perp_scale": perp_scale,
        "rank_a": basis_a.shape[1],
        "rank_b": basis_b.shape[1],
        "h_a_eff": h_a_eff,
        "h_b_eff": h_b_eff,
        "h_i_eff": h_i_eff,
        "delta_perp": perp,
    }
    logger.debug(f"[FAMILY] projector dims=({dims.dim_a}, {dims.dim_b}) ranks=({basis_a.shape[1]}, {basis_b.shape[1]})")
    return FamilyInstance(
        family=FAMILY,
        hamiltonian=hamiltonian,
        known_gife_states=gife_states,
        known_ife_states=list(gife_states) if free else [],
        metadata=metadata,
    )


def _block_operator(V: np.ndarray, rank: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian operator commuting with V[:, :rank]V[:, :rank]†"""
    d = V.shape[0]
    block = np.zeros((d, d), dtype=np.complex128)
    block[:rank, :rank] = random_hermitian(rank, rng)
    if rank < d:
        block[rank:, rank:] = random_hermitian(d - rank, rng)
    return V @ block @ V.conj().T


def random_projector_family(dim_a: int, dim_b: int, rank_a: int, rank_b: int,
                            seed: int = DEFAULT_SEED, commuting: bool = False) -> FamilyInstance:
    """
    Seeded instance with random projectors of the given ranks.
    With commuting=True, H and Δ on each side share the eigenbasis of the
    projector and the products of eigenvectors inside S_A⊗S_B are listed as
    IFE states with their phase rate.
    """
    for rank, dim, name in ((rank_a, dim_a, "rank_a"), (rank_b, dim_b, "rank_b")):
        if not 1 <= rank <= dim:
            raise InvalidInputError(f"{name} must be in [1, {dim}], got {rank}")
    local_seq, perp_seq = np.random.SeedSequence(seed).spawn(2)
    perp_seed = int(perp_seq.generate_state(1)[0])
    rng = np.random.default_rng(local_seq)
    V_a, V_b = random_unitary(dim_a, rng), random_unitary(dim_b, rng)
    pi_a = V_a[:, :rank_a] @ V_a[:, :rank_a].conj().T
    pi_b = V_b[:, :rank_b] @ V_b[:, :rank_b].conj().T

    phases: Optional[List[np.ndarray]] = None
    if commuting:
        spectra = [rng.normal(size=d) for d in (dim_a, dim_a, dim_b, dim_b)]
        h_a, delta_a = (V_a @ np.diag(s) @ V_a.conj().T for s in spectra[:2])
        h_b, delta_b = (V_b @ np.diag(s) @ V_b.conj().T for s in spectra[2:])
        phases = [spectra[1], spectra[3]]
    else:
        h_a, delta_a = _block_operator(V_a, rank_a, rng), _block_operator(V_a, rank_a, rng)
        h_b, delta_b = _block_operator(V_b, rank_b, rng), _block_operator(V_b, rank_b, rng)

    instance = projector_family(pi_a, pi_b, h_a, h_b, delta_a, delta_b, seed=perp_seed)
    metadata = dict(instance.metadata, commuting=commuting, seed=seed, perp_seed=perp_seed)
    if phases is None:
        return replace(instance, metadata=metadata)

    dims = instance.hamiltonian.dims
    ife_states, ife_phases = [], []
    for i in range(rank_a):
        for j in range(rank_b):
            label = f"C_A[{i}]⊗C_B[{j}]"
            ife_states.append(PureState.product(dims, V_a[:, i], V_b[:, j], label=label))
            ife_phases.append({"state": label, "phase": float(phases[0][i] + phases[1][j])})
    metadata["ife_phases"] = ife_phases
    return replace(instance, known_ife_states=ife_states, metadata=metadata)
