import numpy as np
import pytest
from scipy.linalg import expm

from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError
from ifelab.core.numerics import (
    eig_hermitian,
    hermitian_basis,
    hermiticity_residual,
    kron,
    operator_schmidt_decompose,
    partial_trace,
    propagate_state,
    propagator,
    random_hermitian,
    random_state,
    random_unitary,
    reduced_density_matrix,
    require_hermitian,
    schmidt_decompose,
)
from ifelab.families.operators import SIGMA_PLUS, SIGMA_Z

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)


class TestValidation:
    def test_residual_of_hermitian_is_zero(self, rng):
        assert hermiticity_residual(random_hermitian(4, rng)) == 0.0

    def test_non_hermitian_rejected(self):
        with pytest.raises(InvalidInputError, match="not Hermitian"):
            require_hermitian(SIGMA_PLUS)

    def test_non_square_rejected(self):
        with pytest.raises(ShapeError):
            require_hermitian(np.zeros((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(InvalidInputError):
            require_hermitian(np.array([[np.nan, 0], [0, 1]]))


class TestKron:
    def test_matches_numpy(self, rng):
        A, B = random_hermitian(2, rng), random_hermitian(3, rng)
        np.testing.assert_allclose(kron(A, B), np.kron(A, B))

    def test_index_convention(self):
        A = np.arange(4).reshape(2, 2)
        B = np.arange(9).reshape(3, 3)
        K = kron(A, B)
        assert K[1 * 3 + 2, 0 * 3 + 1] == A[1, 0] * B[2, 1]

    def test_capacity(self):
        with pytest.raises(CapacityError):
            kron(np.eye(2), np.eye(2), max_dimension=3)


class TestSpectral:
    def test_eigensystem_residual(self, rng):
        H = random_hermitian(6, rng)
        es = eig_hermitian(H)
        assert es.residual(H) < 1e-12
        assert es.orthonormality_error() < 1e-12
        assert np.all(np.diff(es.eigenvalues) >= 0)

    def test_propagator_matches_expm(self, rng):
        H = random_hermitian(5, rng)
        for t in (0.0, 0.3, 7.5):
            np.testing.assert_allclose(propagator(H, t), expm(-1j * H * t), atol=1e-12)

    def test_propagator_group_law(self, rng):
        H = random_hermitian(6, rng)
        for t, s in ((0.4, 1.1), (3.0, -0.7), (0.0, 2.5)):
            np.testing.assert_allclose(propagator(H, t + s), propagator(H, t) @ propagator(H, s), atol=1e-12)

    def test_propagate_state_rows(self, rng):
        H = random_hermitian(4, rng)
        chi = random_state(4, rng)
        times = np.array([0.0, 0.5, 2.0])
        rows = propagate_state(H, chi, times)
        assert rows.shape == (3, 4)
        for t, row in zip(times, rows):
            np.testing.assert_allclose(row, expm(-1j * H * t) @ chi, atol=1e-12)

    def test_propagate_state_shape_mismatch(self, rng):
        with pytest.raises(ShapeError):
            propagate_state(random_hermitian(4, rng), np.ones(3), [0.0, 1.0])


class TestPartialTrace:
    def test_product_operator(self, rng):
        a, b = random_state(2, rng), random_state(3, rng)
        rho_a, rho_b = np.outer(a, a.conj()), np.outer(b, b.conj())
        rho = np.kron(rho_a, rho_b)
        np.testing.assert_allclose(partial_trace(rho, 2, 3, keep="B"), rho_b, atol=1e-14)
        np.testing.assert_allclose(partial_trace(rho, 2, 3, keep="A"), rho_a, atol=1e-14)

    def test_reduced_matches_partial_trace(self, rng):
        chi = random_state(6, rng)
        rho = np.outer(chi, chi.conj())
        for side in ("A", "B"):
            np.testing.assert_allclose(reduced_density_matrix(chi, 2, 3, keep=side),
                                       partial_trace(rho, 2, 3, keep=side), atol=1e-14)

    def test_bad_side(self):
        with pytest.raises(InvalidInputError):
            partial_trace(np.eye(4), 2, 2, keep="C")

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            partial_trace(np.eye(5), 2, 2)


class TestSchmidt:
    def test_reconstruct(self, rng):
        chi = random_state(12, rng)
        sd = schmidt_decompose(chi, 3, 4)
        np.testing.assert_allclose(sd.reconstruct(), chi, atol=1e-12)
        assert abs(np.sum(sd.probabilities) - 1.0) < 1e-12
        assert sd.rank == 3

    def test_bell_state(self):
        bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
        sd = schmidt_decompose(bell, 2, 2)
        np.testing.assert_allclose(sd.coefficients, [1 / np.sqrt(2)] * 2, atol=1e-14)

    def test_product_state_has_rank_one(self, rng):
        chi = np.kron(random_state(2, rng), random_state(3, rng))
        assert schmidt_decompose(chi, 2, 3).rank == 1
        assert schmidt_decompose(chi, 2, 3, drop_zeros=False).rank == 2

    def test_zero_vector(self):
        with pytest.raises(InvalidInputError):
            schmidt_decompose(np.zeros(4), 2, 2)


class TestOperatorSchmidt:
    def test_hermitian_basis_orthonormal(self):
        basis = hermitian_basis(3)
        gram = np.einsum("aij,bij->ab", basis.conj(), basis)
        np.testing.assert_allclose(gram, np.eye(9), atol=1e-14)
        for G in basis:
            assert hermiticity_residual(G) == 0.0

    def test_single_product_term(self):
        terms = operator_schmidt_decompose(np.kron(SIGMA_Z, SIGMA_X), 2, 2)
        assert len(terms) == 1
        assert terms[0].weight == pytest.approx(2.0)

    def test_reconstructs_random_interaction(self, rng):
        H = random_hermitian(6, rng)
        terms = operator_schmidt_decompose(H, 2, 3)
        rebuilt = sum(t.weight * np.kron(t.system_factor, t.environment_factor) for t in terms)
        np.testing.assert_allclose(rebuilt, H, atol=1e-12)
        for t in terms:
            assert hermiticity_residual(t.system_factor) < 1e-14
            assert hermiticity_residual(t.environment_factor) < 1e-14
            assert np.linalg.norm(t.system_factor) == pytest.approx(1.0)

    def test_flip_flop_weights(self, two_qubit):
        terms = operator_schmidt_decompose(two_qubit.hamiltonian.h_i, 2, 2)
        np.testing.assert_allclose(sorted(t.weight for t in terms), [0.3, 0.3], atol=1e-12)

    def test_zero_interaction(self):
        assert operator_schmidt_decompose(np.zeros((4, 4)), 2, 2) == []


class TestRandomInstances:
    def test_hermitian_norm(self, rng):
        H = random_hermitian(5, rng)
        assert np.linalg.norm(H, 2) == pytest.approx(1.0)

    def test_unitary(self, rng):
        U = random_unitary(4, rng)
        np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-12)

    def test_seeded(self):
        a = random_state(3, np.random.default_rng(5))
        b = random_state(3, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)
