"""
Dense complex linear algebra
============================
Tensor products, partial traces, Schmidt decompositions and propagators.
Every routine takes and returns plain numpy arrays (complex128) and never
mutates its inputs.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from config.settings import HERMITIAN_RTOL, MAX_TOTAL_DIMENSION, RANK_CUTOFF
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError

_SIDES = ("A", "B")


# ─────────────────────────────  VALUE TYPES  ─────────────────────────────────

@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues (ascending unless built from a closed form) and column eigenvectors"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dimension(self) -> int:
        return int(self.eigenvalues.shape[0])

    def vector(self, i: int) -> np.ndarray:
        return self.eigenvectors[:, i]

    def residual(self, H: np.ndarray) -> float:
        """max_i ‖H|λ_i⟩ - λ_i|λ_i⟩‖"""
        R = H @ self.eigenvectors - self.eigenvectors * self.eigenvalues[np.newaxis, :]
        return float(np.max(np.linalg.norm(R, axis=0))) if R.size else 0.0

    def orthonormality_error(self) -> float:
        G = self.eigenvectors.conj().T @ self.eigenvectors
        return float(np.max(np.abs(G - np.eye(G.shape[0])))) if G.size else 0.0


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """χ = Σ_l s_l |φ_l⟩⊗|ψ_l⟩ with φ_l, ψ_l the columns of left/right_vectors"""
    coefficients: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients ** 2

    @property
    def rank(self) -> int:
        return int(self.coefficients.shape[0])

    def reconstruct(self) -> np.ndarray:
        M = (self.left_vectors * self.coefficients[np.newaxis, :]) @ self.right_vectors.T
        return M.reshape(-1)


@dataclass(frozen=True, eq=False)
class OperatorSchmidtTerm:
    """One term weight·S⊗E of an operator-Schmidt expansion; S, E Hermitian with unit HS norm"""
    weight: float
    system_factor: np.ndarray
    environment_factor: np.ndarray


# ─────────────────────────────  VALIDATION  ──────────────────────────────────

def as_complex_matrix(M, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D complex128 array"""
    arr = np.asarray(M, dtype=np.complex128)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def as_complex_vector(v, name: str = "vector") -> np.ndarray:
    arr = np.asarray(v, dtype=np.complex128)
    if arr.ndim != 1:
        raise ShapeError(f"{name} must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


def hermiticity_residual(M: np.ndarray) -> float:
    """max|M - M†|"""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(np.max(np.abs(M - M.conj().T)))


def is_hermitian(M: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    return hermiticity_residual(M) <= rtol * scale


def require_hermitian(M, name: str = "matrix") -> np.ndarray:
    arr = as_complex_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    if not is_hermitian(arr):
        raise InvalidInputError(
            f"{name} is not Hermitian: max|M - M†| = {hermiticity_residual(arr):.3e}"
        )
    return arr


def _require_dims(dim_a: int, dim_b: int) -> None:
    if dim_a < 1 or dim_b < 1:
        raise ShapeError(f"subsystem dimensions must be positive, got ({dim_a}, {dim_b})")


# ─────────────────────────────  TENSOR PRODUCTS  ─────────────────────────────

def kron(A, B, max_dimension: Optional[int] = None) -> np.ndarray:
    """
    Tensor product with (A⊗B)[(i·rB+k),(j·cB+l)] = A[i,j]·B[k,l].

    Raises:
        CapacityError: when either side of the result exceeds the max dimension.
    """
    A = as_complex_matrix(A, "A")
    B = as_complex_matrix(B, "B")
    limit = MAX_TOTAL_DIMENSION if max_dimension is None else max_dimension
    rows, cols = A.shape[0] * B.shape[0], A.shape[1] * B.shape[1]
    if max(rows, cols) > limit:
        raise CapacityError(
            f"kron result {rows}x{cols} exceeds max total dimension {limit}"
        )
    return np.kron(A, B)


# ─────────────────────────────  SPECTRAL  ────────────────────────────────────

def eig_hermitian(H) -> EigenSystem:
    """Ascending eigenvalues and orthonormal eigenvectors of a Hermitian matrix"""
    H = require_hermitian(H, "H")
    Hs = 0.5 * (H + H.conj().T)
    eigenvalues, eigenvectors = np.linalg.eigh(Hs)
    return EigenSystem(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def propagator(H, t: float, eigensystem: Optional[EigenSystem] = None) -> np.ndarray:
    """exp(-iHt) = V diag(e^{-iλt}) V†"""
    es = eigensystem if eigensystem is not None else eig_hermitian(H)
    V = es.eigenvectors
    return (V * np.exp(-1j * es.eigenvalues * t)[np.newaxis, :]) @ V.conj().T


def propagate_state(H, chi, times, eigensystem: Optional[EigenSystem] = None) -> np.ndarray:
    """
    exp(-iHt)χ for every t in times.

    Returns:
        Array of shape (len(times), D), one evolved amplitude vector per row.
    """
    es = eigensystem if eigensystem is not None else eig_hermitian(H)
    chi = as_complex_vector(chi, "state")
    if chi.shape[0] != es.dimension:
        raise ShapeError(
            f"state dimension {chi.shape[0]} does not match Hamiltonian dimension {es.dimension}"
        )
    V = es.eigenvectors
    coeffs = V.conj().T @ chi
    phases = np.exp(-1j * np.outer(np.asarray(times, dtype=float), es.eigenvalues))
    return (phases * coeffs[np.newaxis, :]) @ V.T


# ─────────────────────────────  PARTIAL TRACE  ───────────────────────────────

def partial_trace(rho, dim_a: int, dim_b: int, keep: str = "B") -> np.ndarray:
    """Reduced operator on the kept side of a (dimA·dimB)² operator"""
    rho = as_complex_matrix(rho, "rho")
    _require_dims(dim_a, dim_b)
    if keep not in _SIDES:
        raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")
    D = dim_a * dim_b
    if rho.shape != (D, D):
        raise ShapeError(f"operator shape {rho.shape} does not match dims ({dim_a}, {dim_b})")
    T = rho.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "B":
        return np.einsum("ikil->kl", T)
    return np.einsum("ikjk->ij", T)


def reduced_density_matrix(chi, dim_a: int, dim_b: int, keep: str = "B") -> np.ndarray:
    """partial_trace(|χ⟩⟨χ|) computed from amplitudes, without the D×D projector"""
    chi = as_complex_vector(chi, "state")
    _require_dims(dim_a, dim_b)
    if chi.shape[0] != dim_a * dim_b:
        raise ShapeError(f"state dimension {chi.shape[0]} does not match dims ({dim_a}, {dim_b})")
    M = chi.reshape(dim_a, dim_b)
    if keep == "B":
        return M.T @ M.conj()
    if keep == "A":
        return M @ M.conj().T
    raise InvalidInputError(f"keep must be 'A' or 'B', got {keep!r}")


# ─────────────────────────────  SCHMIDT  ─────────────────────────────────────

def schmidt_decompose(chi, dim_a: int, dim_b: int, drop_zeros: bool = True) -> SchmidtDecomposition:
    """
    Schmidt decomposition by SVD of the amplitude matrix χ[(i,k)] -> M[i,k].

    Args:
        drop_zeros: drop coefficients ≤ 1e-12 relative to the largest; keep
            all min(dimA, dimB) channels when False (used for tracking).
    """
    chi = as_complex_vector(chi, "state")
    _require_dims(dim_a, dim_b)
    if chi.shape[0] != dim_a * dim_b:
        raise ShapeError(f"state dimension {chi.shape[0]} does not match dims ({dim_a}, {dim_b})")
    if not np.any(chi):
        raise InvalidInputError("cannot Schmidt-decompose the zero vector")
    U, s, Vh = np.linalg.svd(chi.reshape(dim_a, dim_b), full_matrices=False)
    if drop_zeros:
        keep = s > RANK_CUTOFF * s[0]
        U, s, Vh = U[:, keep], s[keep], Vh[keep, :]
    return SchmidtDecomposition(coefficients=s, left_vectors=U, right_vectors=Vh.T)


# ─────────────────────────────  OPERATOR SCHMIDT  ────────────────────────────

def hermitian_basis(d: int) -> np.ndarray:
    """
    Orthonormal (Hilbert-Schmidt) basis of d×d Hermitian matrices, shape (d², d, d).
    Order: E_jj, then (E_jk+E_kj)/√2, then -i(E_jk-E_kj)/√2 over j<k.
    """
    basis = np.zeros((d * d, d, d), dtype=np.complex128)
    for j in range(d):
        basis[j, j, j] = 1.0
    rows, cols = np.triu_indices(d, 1)
    m = rows.shape[0]
    r2 = 1.0 / np.sqrt(2.0)
    for n, (j, k) in enumerate(zip(rows, cols)):
        basis[d + n, j, k] = basis[d + n, k, j] = r2
        basis[d + m + n, j, k] = -1j * r2
        basis[d + m + n, k, j] = 1j * r2
    return basis


def _to_hermitian_coordinates(X: np.ndarray, d: int) -> np.ndarray:
    """Coordinates ⟨G_a, X⟩ along the first two axes of X (shape (d, d, ...))"""
    rows, cols = np.triu_indices(d, 1)
    diag = X[np.arange(d), np.arange(d)]
    upper, lower = X[rows, cols], X[cols, rows]
    r2 = 1.0 / np.sqrt(2.0)
    return np.concatenate([diag, (upper + lower) * r2, 1j * (upper - lower) * r2], axis=0)


def _from_hermitian_coordinates(v: np.ndarray, d: int) -> np.ndarray:
    rows, cols = np.triu_indices(d, 1)
    m = rows.shape[0]
    r2 = 1.0 / np.sqrt(2.0)
    X = np.zeros((d, d), dtype=np.complex128)
    X[np.arange(d), np.arange(d)] = v[:d]
    sym, asym = v[d:d + m], v[d + m:]
    X[rows, cols] = (sym - 1j * asym) * r2
    X[cols, rows] = (sym + 1j * asym) * r2
    return X


def operator_schmidt_decompose(H_I, dim_a: int, dim_b: int) -> List[OperatorSchmidtTerm]:
    """
    H_I = Σ_α w_α S_α⊗E_α by reshuffling and SVD.

    The reshuffled matrix is written in Hermitian operator bases on both
    sides, where it is real, so every S_α and E_α comes out Hermitian.
    Terms with weight ≤ 1e-12 relative to the largest are dropped.
    """
    H = require_hermitian(H_I, "H_I")
    _require_dims(dim_a, dim_b)
    D = dim_a * dim_b
    if H.shape != (D, D):
        raise ShapeError(f"H_I shape {H.shape} does not match dims ({dim_a}, {dim_b})")

    # T[i,j,k,l] = H[(i,k),(j,l)]
    T = H.reshape(dim_a, dim_b, dim_a, dim_b).transpose(0, 2, 1, 3)
    X = _to_hermitian_coordinates(T.reshape(dim_a, dim_a, dim_b * dim_b), dim_a)
    Y = _to_hermitian_coordinates(X.T.reshape(dim_b, dim_b, dim_a * dim_a), dim_b)
    C = Y.T.real

    U, s, Vt = np.linalg.svd(C, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return []
    terms = []
    for alpha in np.flatnonzero(s > RANK_CUTOFF * s[0]):
        terms.append(OperatorSchmidtTerm(
            weight=float(s[alpha]),
            system_factor=_from_hermitian_coordinates(U[:, alpha], dim_a),
            environment_factor=_from_hermitian_coordinates(Vt[alpha, :], dim_b),
        ))
    return terms


# ─────────────────────────────  RANDOM INSTANCES  ────────────────────────────

def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    """Gaussian Hermitian matrix rescaled to spectral norm 1"""
    X = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    H = 0.5 * (X + X.conj().T)
    return H / np.linalg.norm(H, 2)


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR"""
    X = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(X)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases[np.newaxis, :]


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)
