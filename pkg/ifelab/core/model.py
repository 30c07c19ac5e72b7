"""
Bipartite system description
============================
BipartiteHamiltonian (H_A, H_B, H_I), PureState, total-Hamiltonian assembly,
eigenbasis expansion and the validation report.
"""

import hashlib
import logging
import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np

from config.settings import MAX_TOTAL_DIMENSION, NORM_TOLERANCE
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError
from ifelab.core.numerics import (
    EigenSystem,
    as_complex_matrix,
    as_complex_vector,
    eig_hermitian,
    hermiticity_residual,
    is_hermitian,
    kron,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BipartiteDims:
    dim_a: int
    dim_b: int

    def __post_init__(self):
        if self.dim_a < 2 or self.dim_b < 2:
            raise ShapeError(f"subsystem dimensions must be ≥ 2, got ({self.dim_a}, {self.dim_b})")
        if self.dim_a * self.dim_b > MAX_TOTAL_DIMENSION:
            raise CapacityError(
                f"total dimension {self.dim_a * self.dim_b} exceeds max {MAX_TOTAL_DIMENSION}"
            )

    @property
    def total(self) -> int:
        return self.dim_a * self.dim_b

    @property
    def schmidt_rank_bound(self) -> int:
        """n = min(dimA, dimB)"""
        return min(self.dim_a, self.dim_b)


@dataclass(frozen=True, eq=False)
class BipartiteHamiltonian:
    """
    H = H_A⊗I + I⊗H_B + H_I.
    Parts are stored as given; `validate` reports problems and
    `assemble_total` raises on shape mismatch.
    """
    dims: BipartiteDims
    h_a: np.ndarray
    h_b: np.ndarray
    h_i: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h_a", as_complex_matrix(self.h_a, "H_A"))
        object.__setattr__(self, "h_b", as_complex_matrix(self.h_b, "H_B"))
        object.__setattr__(self, "h_i", as_complex_matrix(self.h_i, "H_I"))

    @classmethod
    def free(cls, h_a, h_b) -> "BipartiteHamiltonian":
        h_a = as_complex_matrix(h_a, "H_A")
        h_b = as_complex_matrix(h_b, "H_B")
        dims = BipartiteDims(h_a.shape[0], h_b.shape[0])
        return cls(dims, h_a, h_b, np.zeros((dims.total, dims.total), dtype=np.complex128))

    @cached_property
    def total(self) -> np.ndarray:
        return assemble_total(self)

    @cached_property
    def free_part(self) -> np.ndarray:
        """H_0 = H_A⊗I + I⊗H_B"""
        _check_shapes(self)
        return (kron(self.h_a, np.eye(self.dims.dim_b))
                + kron(np.eye(self.dims.dim_a), self.h_b))

    @cached_property
    def content_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(f"{self.dims.dim_a}x{self.dims.dim_b}".encode("utf-8"))
        for part in (self.h_a, self.h_b, self.h_i):
            digest.update(np.ascontiguousarray(part).tobytes())
        return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit-norm vector in the tensor-product space, optionally with eigen-coefficients"""
    dims: BipartiteDims
    amplitudes: np.ndarray
    eigen_coefficients: Optional[np.ndarray] = None
    eigensystem_key: Optional[str] = None
    label: Optional[str] = None

    def __post_init__(self):
        amps = as_complex_vector(self.amplitudes, "amplitudes")
        if amps.shape[0] != self.dims.total:
            raise ShapeError(
                f"amplitude length {amps.shape[0]} does not match total dimension {self.dims.total}"
            )
        require_unit_norm(amps)
        object.__setattr__(self, "amplitudes", amps)
        if self.eigen_coefficients is not None:
            object.__setattr__(self, "eigen_coefficients",
                               as_complex_vector(self.eigen_coefficients, "eigen coefficients"))

    @classmethod
    def from_amplitudes(cls, dims: BipartiteDims, amplitudes, normalize: bool = False,
                        label: Optional[str] = None) -> "PureState":
        amps = as_complex_vector(amplitudes, "amplitudes")
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0.0:
                raise InvalidInputError("cannot normalize the zero vector")
            amps = amps / norm
        return cls(dims, amps, label=label)

    @classmethod
    def product(cls, dims: BipartiteDims, psi_a, psi_b, label: Optional[str] = None) -> "PureState":
        a = as_complex_vector(psi_a, "ψ_A")
        b = as_complex_vector(psi_b, "ψ_B")
        if a.shape[0] != dims.dim_a or b.shape[0] != dims.dim_b:
            raise ShapeError(f"factor lengths ({a.shape[0]}, {b.shape[0]}) do not match dims")
        return cls.from_amplitudes(dims, np.kron(a, b), normalize=True, label=label)

    @classmethod
    def from_eigen_coefficients(cls, dims: BipartiteDims, es: EigenSystem, coefficients,
                                key: Optional[str] = None, normalize: bool = False,
                                label: Optional[str] = None) -> "PureState":
        c = as_complex_vector(coefficients, "eigen coefficients")
        if c.shape[0] != es.dimension:
            raise ShapeError(f"{c.shape[0]} coefficients for an eigensystem of size {es.dimension}")
        if normalize:
            c = c / np.linalg.norm(c)
        return cls(dims, es.eigenvectors @ c, eigen_coefficients=c, eigensystem_key=key, label=label)


@dataclass
class ValidationCheck:
    name: str
    passed: bool
    value: Optional[float] = None
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[ValidationCheck] = field(default_factory=list)
    norms: Dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> List[ValidationCheck]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "checks": [vars(c) for c in self.checks],
            "norms": dict(self.norms),
        }


def require_unit_norm(v: np.ndarray, tolerance: float = NORM_TOLERANCE) -> None:
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > tolerance:
        raise InvalidInputError(f"state is not normalized: ‖χ‖ = {norm:.12f}")


def state_vector(chi, dims: BipartiteDims) -> np.ndarray:
    """Amplitudes of a PureState or raw array, checked for length and unit norm"""
    amps = chi.amplitudes if isinstance(chi, PureState) else as_complex_vector(chi, "state")
    if amps.shape[0] != dims.total:
        raise ShapeError(f"state length {amps.shape[0]} does not match total dimension {dims.total}")
    require_unit_norm(amps)
    return amps


def _check_shapes(H: BipartiteHamiltonian) -> None:
    dims = H.dims
    expected = {
        "H_A": (H.h_a, (dims.dim_a, dims.dim_a)),
        "H_B": (H.h_b, (dims.dim_b, dims.dim_b)),
        "H_I": (H.h_i, (dims.total, dims.total)),
    }
    for name, (part, shape) in expected.items():
        if part.shape != shape:
            raise ShapeError(f"{name} has shape {part.shape}, expected {shape}")


def assemble_total(H: BipartiteHamiltonian) -> np.ndarray:
    """H_A⊗I + I⊗H_B + H_I"""
    _check_shapes(H)
    return H.free_part + H.h_i


def expand_in_eigenbasis(chi, es: EigenSystem) -> np.ndarray:
    """c_i = ⟨λ_i|χ⟩"""
    amps = chi.amplitudes if isinstance(chi, PureState) else as_complex_vector(chi, "state")
    if amps.shape[0] != es.dimension:
        raise ShapeError(f"state length {amps.shape[0]} does not match eigensystem size {es.dimension}")
    return es.eigenvectors.conj().T @ amps


def validate(H: BipartiteHamiltonian) -> ValidationReport:
    report = ValidationReport()
    dims = H.dims
    shapes = {
        "H_A": (H.h_a, (dims.dim_a, dims.dim_a)),
        "H_B": (H.h_b, (dims.dim_b, dims.dim_b)),
        "H_I": (H.h_i, (dims.total, dims.total)),
    }
    for name, (part, shape) in shapes.items():
        shape_ok = part.shape == shape
        report.checks.append(ValidationCheck(
            name=f"{name}.shape", passed=shape_ok,
            detail=f"got {part.shape}, expected {shape}",
        ))
        if not shape_ok:
            continue
        report.checks.append(ValidationCheck(
            name=f"{name}.hermitian", passed=is_hermitian(part),
            value=hermiticity_residual(part),
        ))
        report.norms[name] = float(np.linalg.norm(part, 2)) if part.size else 0.0
    if not report.ok:
        logger.warning(f"[MODEL] validation failed: {[c.name for c in report.failures()]}")
    return report


# ─────────────────────  EIGENSYSTEM CACHE  ───────────────────────────────────
# Keyed by content hash of the Hamiltonian; shared by all checks in a process.
_EIGEN_CACHE: Dict[str, EigenSystem] = {}
_EIGEN_LOCK = threading.Lock()
_EIGEN_CACHE_LIMIT = 64


def eigensystem_for(H: BipartiteHamiltonian) -> EigenSystem:
    key = H.content_hash
    with _EIGEN_LOCK:
        cached = _EIGEN_CACHE.get(key)
    if cached is not None:
        return cached
    es = eig_hermitian(H.total)
    with _EIGEN_LOCK:
        if len(_EIGEN_CACHE) >= _EIGEN_CACHE_LIMIT:
            _EIGEN_CACHE.pop(next(iter(_EIGEN_CACHE)))
        _EIGEN_CACHE[key] = es
    logger.debug(f"[MODEL] eigensystem cached for {key[:12]} (D={es.dimension})")
    return es


def local_eigensystem(h_a, h_b) -> EigenSystem:
    """Eigensystem of h_a⊗I + I⊗h_b from the two local problems (not sorted)"""
    es_a = eig_hermitian(h_a)
    es_b = eig_hermitian(h_b)
    return EigenSystem(
        eigenvalues=np.add.outer(es_a.eigenvalues, es_b.eigenvalues).reshape(-1),
        eigenvectors=kron(es_a.eigenvectors, es_b.eigenvectors),
    )


def as_pure_state(chi, dims: BipartiteDims) -> PureState:
    if isinstance(chi, PureState):
        return chi
    return PureState(dims, state_vector(chi, dims))
