"""
Time evolution and conserved functionals
========================================
Pure-state evolution on a TimeGrid, trace powers tr(ρ_B^k), entropies and
continuity-tracked Schmidt trajectories, plus CSV export.
"""

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.settings import DEFAULT_SAMPLES, DEFAULT_T_MAX, SCHMIDT_DEGENERACY_GAP, RANK_CUTOFF
from ifelab.core.errors import InvalidInputError, ShapeError
from ifelab.core.model import BipartiteDims, PureState, state_vector
from ifelab.core.numerics import (
    EigenSystem,
    SchmidtDecomposition,
    as_complex_matrix,
    eig_hermitian,
    propagate_state,
    require_hermitian,
)

logger = logging.getLogger(__name__)


# ─────────────────────────────  VALUE TYPES  ─────────────────────────────────

@dataclass(frozen=True, eq=False)
class TimeGrid:
    samples: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.samples, dtype=float)
        if t.ndim != 1 or t.shape[0] < 2:
            raise InvalidInputError("time grid needs at least 2 samples")
        if not np.all(np.isfinite(t)):
            raise InvalidInputError("time grid contains non-finite samples")
        if t[0] != 0.0:
            raise InvalidInputError(f"time grid must start at t=0, got {t[0]}")
        if np.any(np.diff(t) <= 0.0):
            raise InvalidInputError("time grid samples must be strictly increasing")
        object.__setattr__(self, "samples", t)

    @classmethod
    def uniform(cls, t_max: float = DEFAULT_T_MAX, samples: int = DEFAULT_SAMPLES) -> "TimeGrid":
        if samples < 2:
            raise InvalidInputError(f"time grid needs at least 2 samples, got {samples}")
        if not t_max > 0.0:
            raise InvalidInputError(f"tMax must be positive, got {t_max}")
        return cls(np.linspace(0.0, t_max, samples))

    def __len__(self) -> int:
        return int(self.samples.shape[0])


@dataclass(frozen=True, eq=False)
class FunctionalTrajectory:
    """tr(ρ_B(t)^k) per grid sample"""
    k: int
    times: np.ndarray
    values: np.ndarray

    @property
    def drift(self) -> float:
        """Peak-to-peak variation"""
        return float(np.ptp(self.values))


@dataclass(frozen=True, eq=False)
class SchmidtTrajectory:
    """Continuity-tracked Schmidt decompositions, one per grid sample"""
    times: np.ndarray
    decompositions: Tuple[SchmidtDecomposition, ...]
    degenerate_tracking: bool = False

    def __len__(self) -> int:
        return len(self.decompositions)

    def __getitem__(self, i: int) -> SchmidtDecomposition:
        return self.decompositions[i]

    def __iter__(self) -> Iterator[SchmidtDecomposition]:
        return iter(self.decompositions)

    def active_channels(self) -> np.ndarray:
        """Channels whose coefficient exceeds the rank cutoff at some sample"""
        full = np.stack([d.coefficients for d in self.decompositions])
        scale = max(float(np.max(full)), 1e-300)
        return np.any(full > RANK_CUTOFF * scale, axis=0)

    def coefficient_matrix(self, drop_zeros: bool = True) -> np.ndarray:
        """Shape (samples, channels); zero-weight channels are left out unless drop_zeros=False"""
        full = np.stack([d.coefficients for d in self.decompositions])
        return full[:, self.active_channels()] if drop_zeros else full

    def coefficient_drift(self) -> np.ndarray:
        return np.ptp(self.coefficient_matrix(), axis=0)


# ─────────────────────────────  EVOLUTION  ───────────────────────────────────

def _eigensystem(H_total, eigensystem: Optional[EigenSystem]) -> EigenSystem:
    if eigensystem is not None:
        return eigensystem
    return eig_hermitian(require_hermitian(H_total, "H_total"))


def evolve_amplitudes(H_total, chi0: PureState, grid: TimeGrid,
                      eigensystem: Optional[EigenSystem] = None) -> np.ndarray:
    """Amplitude rows χ(t_m), shape (samples, D)"""
    es = _eigensystem(H_total, eigensystem)
    amps = state_vector(chi0, chi0.dims)
    if amps.shape[0] != es.dimension:
        raise ShapeError(f"state length {amps.shape[0]} does not match Hamiltonian size {es.dimension}")
    return propagate_state(None, amps, grid.samples, eigensystem=es)


def evolve(H_total, chi0: PureState, grid: TimeGrid,
           eigensystem: Optional[EigenSystem] = None) -> List[PureState]:
    rows = evolve_amplitudes(H_total, chi0, grid, eigensystem)
    return [PureState(chi0.dims, row, label=chi0.label) for row in rows]


# ─────────────────────────────  FUNCTIONALS  ─────────────────────────────────

def _spectrum(rho: np.ndarray) -> np.ndarray:
    p = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    return np.clip(p, 0.0, None)


def trace_power(rho, k: int) -> float:
    """Σ_l p_l^k over the eigenvalues of ρ"""
    if k < 1:
        raise InvalidInputError(f"trace power needs k ≥ 1, got {k}")
    rho = as_complex_matrix(rho, "rho")
    return float(np.sum(_spectrum(rho) ** k))


def entropies(rho) -> Tuple[float, float]:
    """(von Neumann entropy, natural log; linear entropy 1 - tr ρ²)"""
    p = _spectrum(as_complex_matrix(rho, "rho"))
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz))), float(1.0 - np.sum(p ** 2))


def _reduced_spectra(rows: np.ndarray, dims: BipartiteDims) -> np.ndarray:
    """
    Spectra of ρ_B(t) for each amplitude row, as squared singular values of
    the amplitude matrix; equals eigvals of partial_trace(|χ⟩⟨χ|, keep=B) on
    its n = min(dimA, dimB) support.
    """
    M = rows.reshape(rows.shape[0], dims.dim_a, dims.dim_b)
    s = np.linalg.svd(M, compute_uv=False)
    return s ** 2


def functional_trajectories(H_total, chi0: PureState, grid: TimeGrid, k_max: int,
                            eigensystem: Optional[EigenSystem] = None) -> List[FunctionalTrajectory]:
    n = chi0.dims.schmidt_rank_bound
    if k_max < 1 or k_max > n:
        raise InvalidInputError(f"kMax must lie in [1, {n}], got {k_max}")
    rows = evolve_amplitudes(H_total, chi0, grid, eigensystem)
    spectra = _reduced_spectra(rows, chi0.dims)
    return [
        FunctionalTrajectory(k=k, times=grid.samples, values=np.sum(spectra ** k, axis=1))
        for k in range(1, k_max + 1)
    ]


def entropy_trajectories(H_total, chi0: PureState, grid: TimeGrid,
                         eigensystem: Optional[EigenSystem] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(von Neumann, linear) entropy of ρ_B(t) per sample"""
    rows = evolve_amplitudes(H_total, chi0, grid, eigensystem)
    spectra = _reduced_spectra(rows, chi0.dims)
    safe = np.where(spectra > 0.0, spectra, 1.0)
    plogp = spectra * np.log(safe)
    return -np.sum(plogp, axis=1), 1.0 - np.sum(spectra ** 2, axis=1)


# ─────────────────────────────  SCHMIDT TRACKING  ────────────────────────────

def _match_channels(prev_u: np.ndarray, prev_v: np.ndarray,
                    u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Greedy maximal-overlap assignment; perm[l] = new channel placed at slot l"""
    score = np.abs(prev_u.conj().T @ u) * np.abs(prev_v.conj().T @ v)
    n = score.shape[0]
    perm = np.full(n, -1)
    used_old, used_new = set(), set()
    for flat in np.argsort(-score, axis=None, kind="stable"):
        old, new = divmod(int(flat), n)
        if old in used_old or new in used_new:
            continue
        perm[old] = new
        used_old.add(old)
        used_new.add(new)
        if len(used_old) == n:
            break
    return perm


def _has_degenerate_coefficients(s: np.ndarray) -> bool:
    nonzero = s[s > RANK_CUTOFF * max(float(s[0]), 1e-300)]
    return nonzero.shape[0] > 1 and bool(np.any(np.abs(np.diff(np.sort(nonzero))) < SCHMIDT_DEGENERACY_GAP))


def track_schmidt_frames(rows: np.ndarray, dims: BipartiteDims) -> Tuple[List[SchmidtDecomposition], bool]:
    """
    Full-length (n = min(dimA, dimB)) Schmidt decompositions of each row,
    order- and phase-matched to the previous sample. The right vectors are
    rotated so ⟨ψ_l(t_prev)|ψ_l(t)⟩ ≥ 0 and the left vectors absorb the phase.
    """
    decompositions: List[SchmidtDecomposition] = []
    degenerate = False
    prev_u = prev_v = None
    for row in rows:
        U, s, Vh = np.linalg.svd(row.reshape(dims.dim_a, dims.dim_b), full_matrices=False)
        V = Vh.T
        degenerate = degenerate or _has_degenerate_coefficients(s)
        if prev_u is not None:
            perm = _match_channels(prev_u, prev_v, U, V)
            U, s, V = U[:, perm], s[perm], V[:, perm]
            overlap = np.einsum("il,il->l", prev_v.conj(), V)
            magnitude = np.abs(overlap)
            phase = np.ones_like(overlap)
            nonzero = magnitude > 0.0
            phase[nonzero] = overlap[nonzero] / magnitude[nonzero]
            V = V * phase.conj()[np.newaxis, :]
            U = U * phase[np.newaxis, :]
        decompositions.append(SchmidtDecomposition(coefficients=s, left_vectors=U, right_vectors=V))
        prev_u, prev_v = U, V
    return decompositions, degenerate


def schmidt_trajectory(H_total, chi0: PureState, grid: TimeGrid,
                       eigensystem: Optional[EigenSystem] = None) -> SchmidtTrajectory:
    rows = evolve_amplitudes(H_total, chi0, grid, eigensystem)
    decompositions, degenerate = track_schmidt_frames(rows, chi0.dims)
    if degenerate:
        logger.warning("[SCHMIDT] degenerate Schmidt coefficients (gap < 1e-8); tracking by overlap")
    return SchmidtTrajectory(times=grid.samples, decompositions=tuple(decompositions),
                             degenerate_tracking=degenerate)


# ─────────────────────────────  CSV EXPORT  ──────────────────────────────────

PathLike = Union[str, Path]


def write_functional_csv(trajectories: Sequence[FunctionalTrajectory], path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "k", "value"])
        for traj in trajectories:
            for t, value in zip(traj.times, traj.values):
                writer.writerow([repr(float(t)), traj.k, repr(float(value))])
    return path


def write_schmidt_csv(trajectory: SchmidtTrajectory, path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "l", "p_l"])
        active = np.flatnonzero(trajectory.active_channels())
        for t, decomposition in zip(trajectory.times, trajectory.decompositions):
            for l in active:
                p = decomposition.probabilities[l]
                writer.writerow([repr(float(t)), int(l), repr(float(p))])
    return path


def write_entropy_csv(times: np.ndarray, von_neumann: np.ndarray, linear: np.ndarray,
                      path: PathLike) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(["t", "von_neumann", "linear"])
        for row in zip(times, von_neumann, linear):
            writer.writerow([repr(float(x)) for x in row])
    return path
