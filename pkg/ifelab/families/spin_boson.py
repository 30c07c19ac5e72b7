"""
N spins dephased by a set of truncated bosonic modes.

    H_A = Σ_k Ω_k σ_z^(k)
    H_B = Σ_j ω_j a_j†a_j
    H_I = J_z ⊗ Σ_j g_j (a_j + a_j†),   J_z = Σ_k σ_z^(k)

Each J_z eigenspace is decoherence-free. In the sector with eigenvalue m the
environment moves under H_B + m·G; the m = 0 sector is interaction-free.
"""

import logging
from itertools import product as cartesian
from typing import List, Sequence

import numpy as np

from config.settings import MAX_TOTAL_DIMENSION
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError
from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState
from ifelab.core.numerics import kron
from ifelab.families.family_instance import FamilyInstance
from ifelab.families.operators import SIGMA_Z, annihilation, basis_vector, embed, fock_state, number

logger = logging.getLogger(__name__)


def _spin_label(index: int, n_spins: int) -> str:
    bits = format(index, f"0{n_spins}b")
    return "".join("+" if b == "0" else "-" for b in bits)


def _check_sizes(n_spins: int, omegas, mode_frequencies, couplings, fock_cutoff: int) -> None:
    if n_spins < 1:
        raise InvalidInputError(f"need at least one spin, got {n_spins}")
    if len(omegas) != n_spins:
        raise ShapeError(f"{len(omegas)} spin frequencies for {n_spins} spins")
    if len(mode_frequencies) < 1:
        raise InvalidInputError("need at least one bosonic mode")
    if len(couplings) != len(mode_frequencies):
        raise ShapeError(f"{len(couplings)} couplings for {len(mode_frequencies)} modes")
    if fock_cutoff < 2:
        raise InvalidInputError(f"Fock cutoff must be ≥ 2, got {fock_cutoff}")
    total = (2 ** n_spins) * fock_cutoff ** len(mode_frequencies)
    if total > MAX_TOTAL_DIMENSION:
        raise CapacityError(f"spin-boson dimension {total} exceeds max {MAX_TOTAL_DIMENSION}")


def spin_boson_dephasing(n_spins: int, omegas: Sequence[float], mode_frequencies: Sequence[float],
                         couplings: Sequence[float], fock_cutoff: int) -> FamilyInstance:
    _check_sizes(n_spins, omegas, mode_frequencies, couplings, fock_cutoff)
    spin_dims = [2] * n_spins
    mode_dims = [fock_cutoff] * len(mode_frequencies)

    h_a = sum(w * embed(SIGMA_Z, k, spin_dims) for k, w in enumerate(omegas))
    j_z = sum(embed(SIGMA_Z, k, spin_dims) for k in range(n_spins))
    a = annihilation(fock_cutoff)
    h_b = sum(w * embed(number(fock_cutoff), j, mode_dims) for j, w in enumerate(mode_frequencies))
    field = sum(g * embed(a + a.conj().T, j, mode_dims) for j, g in enumerate(couplings))

    dims = BipartiteDims(2 ** n_spins, int(np.prod(mode_dims)))
    hamiltonian = BipartiteHamiltonian(dims, h_a, h_b, kron(j_z, field))

    # J_z is diagonal in the computational basis
    m_values = np.rint(np.real(np.diag(j_z))).astype(int)
    sectors = sorted(set(m_values.tolist()), reverse=True)

    # Occupations up to d-2 in the first mode, others empty
    env_states = []
    for n in range(fock_cutoff - 1):
        occupation = (n,) + (0,) * (len(mode_dims) - 1)
        vector = fock_state(fock_cutoff, occupation[0])
        for extra in occupation[1:]:
            vector = np.kron(vector, fock_state(fock_cutoff, extra))
        env_states.append((occupation, vector))

    dfs_bases: List[np.ndarray] = []
    gife_states, ife_states = [], []
    sector_docs, env_hamiltonians = [], {}
    for m in sectors:
        members = np.flatnonzero(m_values == m)
        basis = np.stack([basis_vector(dims.dim_a, i) for i in members], axis=1)
        dfs_bases.append(basis)
        kind = "IFE" if m == 0 else "GIFE"
        sector_docs.append({"m": m, "kind": kind, "dimension": len(members),
                            "spins": [_spin_label(i, n_spins) for i in members]})
        env_hamiltonians[str(m)] = h_b + m * field

        target = ife_states if m == 0 else gife_states
        for i, (occupation, env) in cartesian(members, env_states[:2]):
            label = f"|{_spin_label(i, n_spins)}⟩⊗|{','.join(map(str, occupation))}⟩"
            target.append(PureState.product(dims, basis_vector(dims.dim_a, i), env, label=label))
        if len(members) > 1:
            spread = basis.sum(axis=1)
            target.append(PureState.product(dims, spread, env_states[0][1], label=f"m={m} uniform⊗vacuum"))

    metadata = {
        "n_spins": n_spins,
        "omegas": list(omegas),
        "mode_frequencies": list(mode_frequencies),
        "couplings": list(couplings),
        "fock_cutoff": fock_cutoff,
        "sectors": sector_docs,
        "environment_hamiltonians": env_hamiltonians,
    }
    logger.debug(f"[FAMILY] spin_boson N={n_spins} modes={len(mode_dims)} d={fock_cutoff} D={dims.total}")
    return FamilyInstance(
        family="spin_boson_dephasing",
        hamiltonian=hamiltonian,
        known_dfs_bases=dfs_bases,
        known_gife_states=gife_states,
        known_ife_states=ife_states,
        metadata=metadata,
    )
