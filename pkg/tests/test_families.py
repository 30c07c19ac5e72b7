import json

import numpy as np
import pytest

from ifelab.core.dynamics import TimeGrid
from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError, UsageError
from ifelab.core.model import PureState
from ifelab.core.numerics import propagate_state, random_hermitian, random_state, reduced_density_matrix
from ifelab.detect import dfs_check, ife_algebraic_check, ife_dynamic_check
from ifelab.families import (
    bosonic_dephasing,
    dephasing_coefficients,
    projector_family,
    random_projector_family,
    spin_boson_dephasing,
    two_qubit_xy,
)
from ifelab.families.dephasing import dephased_reduced_state, sector_generators
from ifelab.families.operators import SIGMA_Z, fock_state
from ifelab.families.registry import build_family
from ifelab.families.two_qubit import closed_form_eigensystem
from ifelab.gife.gife_check import gife_dynamic_check


def _trace_distance(rho, sigma):
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(rho - sigma))))


class TestTwoQubit:
    def test_eigenvalues(self, two_qubit):
        root = np.sqrt(0.18)
        np.testing.assert_allclose(two_qubit.eigensystem.eigenvalues, [1.7, -1.7, -root, root], atol=1e-12)
        np.testing.assert_allclose(np.sort(two_qubit.eigensystem.eigenvalues),
                                   np.linalg.eigvalsh(two_qubit.hamiltonian.total), atol=1e-12)

    def test_eigenvectors_match_numerics(self, two_qubit):
        es = two_qubit.eigensystem
        H = two_qubit.hamiltonian.total
        assert es.residual(H) <= 1e-12
        assert es.orthonormality_error() <= 1e-12
        values, vectors = np.linalg.eigh(H)
        for i, lam in enumerate(es.eigenvalues):
            j = int(np.argmin(np.abs(values - lam)))
            assert abs(np.vdot(vectors[:, j], es.vector(i))) >= 1 - 1e-10

    def test_symmetric_case(self):
        es = closed_form_eigensystem(1.0, 1.0, 0.4)
        singlet = np.array([0, -1, 1, 0]) / np.sqrt(2)
        triplet = np.array([0, 1, 1, 0]) / np.sqrt(2)
        assert abs(np.vdot(singlet, es.vector(2))) == pytest.approx(1.0)
        assert abs(np.vdot(triplet, es.vector(3))) == pytest.approx(1.0)

    @pytest.mark.parametrize("omega_a,omega_b", [(1.0, 0.7), (0.5, 0.5)])
    def test_uncoupled(self, omega_a, omega_b):
        instance = two_qubit_xy(omega_a, omega_b, 0.0)
        es = instance.eigensystem
        local = np.add.outer([omega_a, -omega_a], [omega_b, -omega_b]).reshape(-1)
        np.testing.assert_allclose(np.sort(es.eigenvalues), np.sort(local), atol=1e-14)
        assert es.residual(instance.hamiltonian.total) <= 1e-12
        assert es.orthonormality_error() <= 1e-12

    def test_known_states(self, two_qubit, default_grid):
        H = two_qubit.hamiltonian
        for state in two_qubit.known_gife_states:
            assert gife_dynamic_check(H, state, default_grid).is_gife, state.label
        for state in two_qubit.known_ife_states:
            assert ife_algebraic_check(H, state).is_ife, state.label
            assert ife_dynamic_check(H, state, default_grid).is_ife, state.label
        labels = {s.label for s in two_qubit.known_ife_states}
        assert labels == {"lambda1", "lambda2", "c1c2"}

    def test_metadata_is_json(self, two_qubit):
        doc = json.loads(json.dumps(two_qubit.metadata_document()))
        assert doc["family"] == "two_qubit_xy"
        assert len(doc["eigenvalues"]) == 4
        assert "c1c2" not in doc["parameters"]["effective_frequency"]


class TestSpinBoson:
    def test_sectors(self, spin_boson):
        sectors = spin_boson.metadata["sectors"]
        assert [s["m"] for s in sectors] == [2, 0, -2]
        assert [s["dimension"] for s in sectors] == [1, 2, 1]
        assert sectors[1]["kind"] == "IFE"

    def test_known_dfs(self, spin_boson):
        for basis in spin_boson.known_dfs_bases:
            assert dfs_check(spin_boson.hamiltonian, basis).is_dfs

    def test_zero_sector_states_are_ife(self, spin_boson, default_grid):
        H = spin_boson.hamiltonian
        assert spin_boson.known_ife_states
        for state in spin_boson.known_ife_states:
            assert ife_algebraic_check(H, state).is_ife, state.label
            assert ife_dynamic_check(H, state, default_grid).is_ife, state.label

    def test_charged_sector_states_are_proper_gife(self, spin_boson, default_grid):
        H = spin_boson.hamiltonian
        ife = {id(s) for s in spin_boson.known_ife_states}
        charged = [s for s in spin_boson.known_gife_states if id(s) not in ife]
        assert charged
        for state in charged:
            verdict = gife_dynamic_check(H, state, default_grid)
            assert verdict.is_gife, state.label
            assert verdict.is_proper_gife, state.label

    def test_product_with_vacuum(self, spin_boson, default_grid):
        H = spin_boson.hamiltonian
        chi = PureState.product(H.dims, [1, 0, 0, 0], fock_state(4, 0))
        assert gife_dynamic_check(H, chi, default_grid).is_gife
        assert not ife_algebraic_check(H, chi).is_ife

    def test_uncoupled_everything_is_ife(self, rng):
        instance = spin_boson_dephasing(2, [1.0, 0.5], [0.9], [0.0], 3)
        chi = random_state(instance.hamiltonian.dims.total, rng)
        assert ife_algebraic_check(instance.hamiltonian, chi).is_ife

    def test_capacity(self):
        with pytest.raises(CapacityError):
            spin_boson_dephasing(12, [1.0] * 12, [0.9], [0.2], 4)

    def test_bad_inputs(self):
        with pytest.raises(InvalidInputError):
            spin_boson_dephasing(2, [1.0, 1.0], [0.9], [0.2], 1)
        with pytest.raises(ShapeError):
            spin_boson_dephasing(2, [1.0], [0.9], [0.2], 3)


class TestDephasing:
    def test_reduced_state_matches_full_evolution(self, dephasing):
        H = dephasing.hamiltonian
        grid = TimeGrid.uniform(10.0, 50)
        for seed in range(5):
            rng = np.random.default_rng(seed)
            psi_a, phi_b = random_state(2, rng), random_state(3, rng)
            rho_a, rho_b = np.outer(psi_a, psi_a.conj()), np.outer(phi_b, phi_b.conj())
            predicted = dephased_reduced_state(dephasing, rho_a, rho_b, grid)
            rows = propagate_state(H.total, np.kron(psi_a, phi_b), grid.samples)
            for rho, row in zip(predicted, rows):
                exact = reduced_density_matrix(row, 2, 3, keep="A")
                assert _trace_distance(rho, exact) <= 1e-10

    def test_coefficient_structure(self, dephasing):
        grid = TimeGrid.uniform(10.0, 50)
        c = dephasing_coefficients(dephasing, np.diag([1.0, 0.0, 0.0]), grid)
        assert c.shape == (50, 2, 2)
        np.testing.assert_allclose(c[0], np.ones((2, 2)), atol=1e-14)
        np.testing.assert_allclose(np.einsum("tkk->tk", c), 1.0, atol=1e-12)
        for gram in c:
            assert np.linalg.eigvalsh(0.5 * (gram + gram.conj().T))[0] >= -1e-12
        assert np.min(np.abs(c[:, 0, 1])) < 1 - 1e-3

    def test_sector_generators(self, dephasing):
        Z = sector_generators(dephasing)
        assert len(Z) == 2
        np.testing.assert_allclose(Z[0] - Z[1], np.eye(3) + 0.4 * (np.diag(np.sqrt([1.0, 2.0]), 1)
                                                                  + np.diag(np.sqrt([1.0, 2.0]), -1)),
                                   atol=1e-14)

    def test_identical_sectors_keep_coherence(self):
        instance = bosonic_dephasing([0.3, 0.3], 0.9, [0.2, 0.2], 3)
        c = dephasing_coefficients(instance, np.eye(3) / 3, TimeGrid.uniform(5.0, 20))
        np.testing.assert_allclose(c, 1.0, atol=1e-12)

    def test_known_states(self, dephasing, default_grid):
        H = dephasing.hamiltonian
        assert not dephasing.known_ife_states
        for state in dephasing.known_gife_states:
            assert gife_dynamic_check(H, state, default_grid).is_gife
            assert not ife_algebraic_check(H, state).is_ife

    def test_wrong_family(self, two_qubit):
        with pytest.raises(UsageError):
            dephasing_coefficients(two_qubit, np.eye(2) / 2, TimeGrid.uniform(1.0, 2))

    def test_rejects_non_density(self, dephasing):
        with pytest.raises(InvalidInputError, match="trace"):
            dephasing_coefficients(dephasing, np.eye(3), TimeGrid.uniform(1.0, 2))


class TestProjector:
    def test_effective_interaction_annihilates_subspace(self, default_grid):
        for seed in range(10):
            instance = random_projector_family(4, 4, 2, 2, seed=seed)
            H = instance.hamiltonian
            h_i_eff = instance.metadata["h_i_eff"]
            assert len(instance.known_gife_states) == 5
            for state in instance.known_gife_states:
                assert np.linalg.norm(h_i_eff @ state.amplitudes) <= 1e-10, (seed, state.label)
                assert gife_dynamic_check(H, state, default_grid).is_gife, (seed, state.label)

    def test_perp_term_vanishes_on_subspace(self):
        instance = random_projector_family(4, 4, 2, 2, seed=3)
        V = np.stack([s.amplitudes for s in instance.known_gife_states[:4]], axis=1)
        P = V @ V.conj().T
        assert np.max(np.abs(P @ instance.metadata["delta_perp"])) <= 1e-13

    def test_seeded_streams_are_independent(self):
        first = random_projector_family(4, 4, 2, 2, seed=7)
        again = random_projector_family(4, 4, 2, 2, seed=7)
        np.testing.assert_array_equal(first.hamiltonian.total, again.hamiltonian.total)

        perp_seed = first.metadata["perp_seed"]
        assert first.metadata["seed"] == 7 and perp_seed != 7
        V = np.stack([s.amplitudes for s in first.known_gife_states[:4]], axis=1)
        Q = np.eye(16) - V @ V.conj().T
        expected = Q @ random_hermitian(16, np.random.default_rng(perp_seed)) @ Q
        np.testing.assert_allclose(first.metadata["delta_perp"], expected, atol=1e-12)
        same_seed = Q @ random_hermitian(16, np.random.default_rng(7)) @ Q
        assert not np.allclose(first.metadata["delta_perp"], same_seed)

    def test_commuting_case_is_ife(self, default_grid):
        instance = random_projector_family(3, 3, 2, 2, seed=5, commuting=True)
        H = instance.hamiltonian
        phases = {p["state"]: p["phase"] for p in instance.metadata["ife_phases"]}
        assert len(instance.known_ife_states) == 4
        for state in instance.known_ife_states:
            verdict = ife_algebraic_check(H, state)
            assert verdict.is_ife, state.label
            assert verdict.phase == pytest.approx(phases[state.label], abs=1e-10)
            assert ife_dynamic_check(H, state, default_grid).is_ife

    def test_no_interaction_makes_subspace_ife(self, rng):
        pi = np.diag([1.0, 0.0])
        h = np.diag([0.3, -0.2])
        instance = projector_family(pi, pi, h, h, np.zeros((2, 2)), np.zeros((2, 2)), perp_scale=0.0)
        assert instance.known_ife_states == instance.known_gife_states

    def test_rejects_non_commuting(self):
        pi = np.diag([1.0, 0.0])
        sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]])
        with pytest.raises(InvalidInputError, match=r"‖\[H_A, Π\]‖"):
            projector_family(pi, pi, sigma_x, SIGMA_Z, SIGMA_Z, SIGMA_Z)

    def test_rejects_non_projector(self):
        with pytest.raises(InvalidInputError, match="projector"):
            projector_family(np.diag([2.0, 0.0]), np.diag([1.0, 0.0]), SIGMA_Z, SIGMA_Z, SIGMA_Z, SIGMA_Z)


class TestRegistry:
    def test_build_by_name(self):
        instance = build_family("two_qubit_xy", {"omega_a": 1.0, "omega_b": 0.7, "gamma": 0.3})
        assert instance.family == "two_qubit_xy"

    def test_pure_dephasing_from_pairs(self):
        zero = [[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
        h_b = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
        instance = build_family("pure_dephasing", {"epsilons": [0.5, -0.5], "h_b": h_b, "b_ops": [zero, zero]})
        assert len(instance.known_ife_states) == 2

    def test_unknown_family(self):
        with pytest.raises(InvalidInputError, match="unknown family"):
            build_family("heisenberg", {})

    def test_bad_parameters(self):
        with pytest.raises(InvalidInputError, match="bad parameters"):
            build_family("two_qubit_xy", {"omega": 1.0})

    @pytest.mark.parametrize("name,params", [
        ("spin_boson_dephasing", {"n_spins": 2, "omegas": [1.0, 1.0], "mode_frequencies": [0.9],
                                  "couplings": [0.2], "fock_cutoff": 3}),
        ("bosonic_dephasing", {"epsilons": [0.5, -0.5], "mode_frequency": 0.9,
                               "couplings": [0.2, -0.2], "fock_cutoff": 3}),
        ("projector_family", {"dim_a": 3, "dim_b": 3, "rank_a": 2, "rank_b": 2, "seed": 1}),
    ])
    def test_metadata_documents_serialize(self, name, params):
        json.dumps(build_family(name, params).metadata_document())
