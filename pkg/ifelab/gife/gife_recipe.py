"""
Eigenbasis recipe for GIFE states
=================================
Expanding tr_B(ρ_B(t)^k) in the eigenbasis of H gives a sum of exponentials
e^{-iδt}, one per 2k-tuple (i₁,j₁,…,i_k,j_k), with δ = Σλ_i - Σλ_j. Tuples
sharing a frequency form a resonance class; conservation of the trace power
requires the class sum

    Σ_{class} c_{i₁}c*_{j₁}…c_{i_k}c*_{j_k} · tr_B(M_{i₁j₁}…M_{i_kj_k}),
    M_ij = tr_A|λ_i⟩⟨λ_j|,

to vanish for every class with δ ≠ 0.

Tuples are addressed by flat index ((i₁·D + j₁)·D + i₂)·D + j₂ … so one
numpy array per order covers deltas, class labels and traces.
"""

import itertools
import logging
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import (
    CLUSTER_RELATIVE_TOL,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    DEFAULT_TRIALS,
    RESONANCE_BUDGET,
    SUPPORT_SEARCH_MAX_DIM,
)
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError
from ifelab.core.model import BipartiteDims, BipartiteHamiltonian
from ifelab.core.numerics import EigenSystem
from ifelab.detect.ife_check import ife_algebraic_check

logger = logging.getLogger(__name__)

ClassKey = Tuple[int, float]


# ─────────────────────────────  RESONANCE CLASSES  ───────────────────────────

@dataclass(frozen=True, eq=False)
class ResonanceClass:
    order: int
    delta: float
    members: np.ndarray
    resonant: bool
    dimension: int

    @property
    def key(self) -> ClassKey:
        return (self.order, self.delta)

    @property
    def tuples(self) -> List[Tuple[int, ...]]:
        shape = (self.dimension,) * (2 * self.order)
        return list(zip(*(axis.tolist() for axis in np.unravel_index(self.members, shape))))

    def __len__(self) -> int:
        return int(self.members.shape[0])


def default_cluster_tol(eigenvalues) -> float:
    """1e-9 · spectral range, or 1e-12 for a fully degenerate spectrum"""
    spread = float(np.ptp(eigenvalues)) if len(eigenvalues) else 0.0
    return CLUSTER_RELATIVE_TOL * spread if spread > 0.0 else 1e-12


def _check_budget(D: int, k: int) -> None:
    count = D ** (2 * k)
    if count > RESONANCE_BUDGET:
        raise CapacityError(
            f"resonance enumeration needs D^(2k) = {D}^{2 * k} = {count} tuples, "
            f"budget is {RESONANCE_BUDGET}"
        )


def tuple_deltas(eigenvalues, k: int) -> np.ndarray:
    """δ for every 2k-tuple, in flat-index order"""
    lam = np.asarray(eigenvalues, dtype=float)
    _check_budget(lam.shape[0], k)
    pair = np.subtract.outer(lam, lam).reshape(-1)
    deltas = pair
    for _ in range(k - 1):
        deltas = np.add.outer(deltas, pair).reshape(-1)
    return deltas


def _cluster(deltas: np.ndarray, cluster_tol: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Label every tuple: -1 for the resonant class (|δ| ≤ tol), otherwise
    0..m-1 in ascending δ, splitting the sorted deltas at gaps > tol.
    Returns (labels, representative delta per label).
    """
    labels = np.full(deltas.shape[0], -1, dtype=np.int64)
    nonresonant = np.flatnonzero(np.abs(deltas) > cluster_tol)
    if nonresonant.size == 0:
        return labels, np.zeros(0)
    order = np.argsort(deltas[nonresonant], kind="stable")
    ranked = deltas[nonresonant][order]
    cluster_ids = np.concatenate([[0], np.cumsum(np.diff(ranked) > cluster_tol)])
    labels[nonresonant[order]] = cluster_ids
    counts = np.bincount(cluster_ids)
    representatives = np.bincount(cluster_ids, weights=ranked) / counts
    return labels, representatives


def resonance_classes(eigenvalues, k: int, cluster_tol: Optional[float] = None) -> List[ResonanceClass]:
    """
    Partition all 2k-tuples by clustered δ. The resonant class (if any)
    comes first, then the nonresonant classes in ascending δ.
    """
    if k < 1:
        raise InvalidInputError(f"order k must be ≥ 1, got {k}")
    lam = np.asarray(eigenvalues, dtype=float)
    tol = default_cluster_tol(lam) if cluster_tol is None else cluster_tol
    deltas = tuple_deltas(lam, k)
    labels, representatives = _cluster(deltas, tol)
    D = lam.shape[0]

    classes = []
    resonant = np.flatnonzero(labels < 0)
    if resonant.size:
        classes.append(ResonanceClass(k, float(np.mean(deltas[resonant])), resonant, True, D))
    if representatives.size:
        order = np.argsort(labels, kind="stable")
        sorted_labels = labels[order]
        starts = np.searchsorted(sorted_labels, np.arange(representatives.shape[0]))
        ends = np.append(starts[1:], sorted_labels.shape[0])
        for label, (lo, hi) in enumerate(zip(starts, ends)):
            members = np.sort(order[lo:hi])
            classes.append(ResonanceClass(k, float(representatives[label]), members, False, D))
    return classes


# ─────────────────────────────  TRACE TABLES  ────────────────────────────────

def _chain_trace_subscripts(k: int) -> str:
    """'axy,byx->ab' style subscripts for tr(P_{a} P_{b} …) over pair indices"""
    pairs = string.ascii_lowercase[:k]
    mats = string.ascii_lowercase[k:2 * k]
    operands = [f"{pairs[s]}{mats[s]}{mats[(s + 1) % k]}" for s in range(k)]
    return ",".join(operands) + "->" + pairs


@dataclass
class _OrderTable:
    traces: np.ndarray
    labels: np.ndarray
    representatives: np.ndarray


@dataclass
class RecipeTables:
    """
    Per-Hamiltonian precomputation for orders k = 2..k_max: the D² matrices
    M_ij, the chain traces of every tuple and the class labels. Residuals
    for any coefficient vector (optionally restricted to a support) then
    reduce to products and bincounts.
    """
    eigensystem: EigenSystem
    dims: BipartiteDims
    k_max: int
    cluster_tol: Optional[float] = None
    orders: Dict[int, _OrderTable] = field(default_factory=dict, init=False)

    def __post_init__(self):
        es, dims = self.eigensystem, self.dims
        D = es.dimension
        if D != dims.total:
            raise ShapeError(f"eigensystem size {D} does not match total dimension {dims.total}")
        if self.k_max > dims.schmidt_rank_bound:
            raise InvalidInputError(f"kMax {self.k_max} exceeds min(dimA, dimB) = {dims.schmidt_rank_bound}")
        if self.cluster_tol is None:
            self.cluster_tol = default_cluster_tol(es.eigenvalues)
        for k in range(2, self.k_max + 1):
            _check_budget(D, k)
        L = es.eigenvectors.T.reshape(D, dims.dim_a, dims.dim_b)
        pair_matrices = np.einsum("iak,jal->ijkl", L, L.conj()).reshape(D * D, dims.dim_b, dims.dim_b)
        for k in range(2, self.k_max + 1):
            traces = np.einsum(_chain_trace_subscripts(k), *([pair_matrices] * k), optimize=True)
            labels, representatives = _cluster(tuple_deltas(es.eigenvalues, k), self.cluster_tol)
            self.orders[k] = _OrderTable(traces.reshape(-1), labels, representatives)
        logger.debug(f"[RECIPE] tables built D={D} kMax={self.k_max} clusterTol={self.cluster_tol:.2e}")

    def class_sums(self, coefficients, k: int, support: Optional[Sequence[int]] = None) -> np.ndarray:
        """Complex class sums for one order, indexed by class label"""
        table = self.orders[k]
        D = self.eigensystem.dimension
        c = np.asarray(coefficients, dtype=np.complex128)
        traces, labels = table.traces, table.labels
        if support is not None:
            idx = np.asarray(support, dtype=np.int64)
            grid = np.ix_(*([idx] * (2 * k)))
            shape = (D,) * (2 * k)
            traces = traces.reshape(shape)[grid].reshape(-1)
            labels = labels.reshape(shape)[grid].reshape(-1)
            if c.shape[0] == D:
                c = c[idx]
        pair_weights = np.outer(c, c.conj()).reshape(-1)
        products = pair_weights
        for _ in range(k - 1):
            products = np.multiply.outer(products, pair_weights).reshape(-1)
        terms = products * traces
        keep = labels >= 0
        m = table.representatives.shape[0]
        real = np.bincount(labels[keep], weights=terms[keep].real, minlength=m)
        imag = np.bincount(labels[keep], weights=terms[keep].imag, minlength=m)
        return real + 1j * imag

    def residuals(self, coefficients, support: Optional[Sequence[int]] = None) -> Dict[ClassKey, float]:
        out: Dict[ClassKey, float] = {}
        for k, table in self.orders.items():
            magnitudes = np.abs(self.class_sums(coefficients, k, support))
            for label, value in enumerate(magnitudes):
                out[(k, float(table.representatives[label]))] = float(value)
        return out

    def max_residual(self, coefficients, support: Optional[Sequence[int]] = None) -> float:
        worst = 0.0
        for k in self.orders:
            sums = self.class_sums(coefficients, k, support)
            if sums.size:
                worst = max(worst, float(np.max(np.abs(sums))))
        return worst


def gife_algebraic_residuals(es: EigenSystem, dims: BipartiteDims, coefficients, k: int,
                             cluster_tol: Optional[float] = None) -> Dict[ClassKey, float]:
    """|class sum| for every nonresonant class of order k, keyed by (k, δ)"""
    if k < 2:
        raise InvalidInputError(f"order k must be ≥ 2, got {k}")
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.shape[0] != es.dimension:
        raise ShapeError(f"{c.shape[0]} coefficients for an eigensystem of size {es.dimension}")
    tables = RecipeTables(es, dims, k, cluster_tol)
    magnitudes = np.abs(tables.class_sums(c, k))
    representatives = tables.orders[k].representatives
    return {(k, float(d)): float(v) for d, v in zip(representatives, magnitudes)}


# ─────────────────────────────  SUPPORT SEARCH  ──────────────────────────────

@dataclass(frozen=True)
class SupportPattern:
    indices: Tuple[int, ...]
    max_residual: float
    is_proper_gife: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "support": list(self.indices),
            "maxResidual": self.max_residual,
            "isProperGife": self.is_proper_gife,
        }


@dataclass(frozen=True)
class SupportSearchResult:
    maximal_supports: Tuple[SupportPattern, ...]
    eigenstate_supports: Tuple[SupportPattern, ...]
    seed: int
    trials: int
    k_max: int
    tolerance: float

    def supports(self) -> List[Tuple[int, ...]]:
        return [p.indices for p in self.maximal_supports]

    def to_dict(self) -> dict:
        return {
            "maximalSupports": [p.to_dict() for p in self.maximal_supports],
            "eigenstateSupports": [p.to_dict() for p in self.eigenstate_supports],
            "seed": self.seed,
            "trials": self.trials,
            "kMax": self.k_max,
            "tolerance": self.tolerance,
        }


def support_draws(support: Sequence[int], trials: int, seed: int) -> np.ndarray:
    """Normalized complex Gaussian draws, seeded by (seed, support) so order of evaluation is irrelevant"""
    rng = np.random.default_rng([seed, *support])
    draws = rng.normal(size=(trials, len(support))) + 1j * rng.normal(size=(trials, len(support)))
    return draws / np.linalg.norm(draws, axis=1, keepdims=True)


def _next_candidates(qualified: List[Tuple[int, ...]]) -> List[Tuple[int, ...]]:
    """Apriori join: size-(m+1) sets whose every size-m subset qualified"""
    known = set(qualified)
    candidates = []
    for a, b in itertools.combinations(sorted(qualified), 2):
        if a[:-1] != b[:-1]:
            continue
        candidate = a + (b[-1],)
        if all(sub in known for sub in itertools.combinations(candidate, len(candidate) - 1)):
            candidates.append(candidate)
    return sorted(candidates)


def _proper_flag(hamiltonian: Optional[BipartiteHamiltonian], es: EigenSystem,
                 support: Tuple[int, ...], draw: np.ndarray, tol: float) -> Optional[bool]:
    if hamiltonian is None:
        return None
    amplitudes = es.eigenvectors[:, list(support)] @ draw
    return not ife_algebraic_check(hamiltonian, amplitudes / np.linalg.norm(amplitudes), tol).is_ife


def find_gife_supports(es: EigenSystem, dims: BipartiteDims, k_max: Optional[int] = None,
                       trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED,
                       tol: float = DEFAULT_TOLERANCE, cluster_tol: Optional[float] = None,
                       hamiltonian: Optional[BipartiteHamiltonian] = None,
                       workers: int = 1) -> SupportSearchResult:
    """
    Supports S of eigenstate indices such that every coefficient vector on S
    is GIFE, witnessed by `trials` random draws. Qualifying supports are
    closed under subsets, so only sets whose every proper subset qualified
    are tested. Reports the maximal supports of size ≥ 2 and, separately,
    the eigenstate singletons. With `hamiltonian` given, each support gets an
    isProperGife flag from ife_algebraic_check on its first draw.
    """
    D = es.dimension
    if D > SUPPORT_SEARCH_MAX_DIM:
        raise CapacityError(f"support search enumerates 2^D subsets; D = {D} exceeds {SUPPORT_SEARCH_MAX_DIM}")
    if trials < 1:
        raise InvalidInputError(f"trials must be ≥ 1, got {trials}")
    k_max = dims.schmidt_rank_bound if k_max is None else k_max
    tables = RecipeTables(es, dims, k_max, cluster_tol)

    def score(support: Tuple[int, ...]) -> float:
        return max(tables.max_residual(c, support) for c in support_draws(support, trials, seed))

    qualified: Dict[Tuple[int, ...], float] = {(i,): 0.0 for i in range(D)}
    level = [(i,) for i in range(D)]
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        while level:
            candidates = _next_candidates(level)
            scores = list(executor.map(score, candidates))
            level = [s for s, r in zip(candidates, scores) if r <= tol]
            qualified.update({s: r for s, r in zip(candidates, scores) if r <= tol})
            if candidates:
                logger.info(f"[SEARCH] size {len(candidates[0])}: {len(level)}/{len(candidates)} supports qualify")

    multi = [s for s in qualified if len(s) >= 2]
    maximal = sorted(s for s in multi if not any(set(s) < set(t) for t in multi))

    def pattern(support: Tuple[int, ...]) -> SupportPattern:
        draw = support_draws(support, 1, seed)[0]
        return SupportPattern(support, qualified[support], _proper_flag(hamiltonian, es, support, draw, tol))

    return SupportSearchResult(
        maximal_supports=tuple(pattern(s) for s in maximal),
        eigenstate_supports=tuple(pattern((i,)) for i in range(D)),
        seed=seed,
        trials=trials,
        k_max=k_max,
        tolerance=tol,
    )
