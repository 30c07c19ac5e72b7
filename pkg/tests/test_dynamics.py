import csv

import numpy as np
import pytest
from scipy.linalg import expm

from ifelab.core.dynamics import (
    TimeGrid,
    entropies,
    entropy_trajectories,
    evolve,
    functional_trajectories,
    schmidt_trajectory,
    trace_power,
    write_entropy_csv,
    write_functional_csv,
    write_schmidt_csv,
)
from ifelab.core.errors import InvalidInputError
from ifelab.core.model import BipartiteDims, BipartiteHamiltonian, PureState
from ifelab.core.numerics import partial_trace, random_hermitian, random_state


@pytest.fixture
def interacting(rng):
    return BipartiteHamiltonian(BipartiteDims(2, 3), random_hermitian(2, rng),
                                random_hermitian(3, rng), random_hermitian(6, rng))


class TestTimeGrid:
    def test_uniform(self):
        grid = TimeGrid.uniform(10.0, 11)
        assert len(grid) == 11
        assert grid.samples[0] == 0.0 and grid.samples[-1] == 10.0

    @pytest.mark.parametrize("t_max,samples", [(0.0, 10), (-1.0, 10), (1.0, 1)])
    def test_rejects_bad_uniform(self, t_max, samples):
        with pytest.raises(InvalidInputError):
            TimeGrid.uniform(t_max, samples)

    def test_must_start_at_zero(self):
        with pytest.raises(InvalidInputError, match="t=0"):
            TimeGrid(np.array([0.5, 1.0]))

    def test_strictly_increasing(self):
        with pytest.raises(InvalidInputError):
            TimeGrid(np.array([0.0, 1.0, 1.0]))


class TestFunctionals:
    def test_trace_power_and_entropies(self):
        rho = np.eye(2) / 2
        assert trace_power(rho, 1) == pytest.approx(1.0)
        assert trace_power(rho, 2) == pytest.approx(0.5)
        vn, lin = entropies(rho)
        assert vn == pytest.approx(np.log(2))
        assert lin == pytest.approx(0.5)

    def test_trace_power_order(self):
        with pytest.raises(InvalidInputError):
            trace_power(np.eye(2), 0)

    def test_pure_state_entropy(self):
        vn, lin = entropies(np.diag([1.0, 0.0]))
        assert vn == pytest.approx(0.0)
        assert lin == pytest.approx(0.0)


class TestEvolution:
    def test_matches_expm(self, interacting, rng):
        chi = PureState(interacting.dims, random_state(6, rng))
        grid = TimeGrid.uniform(3.0, 4)
        states = evolve(interacting.total, chi, grid)
        for t, state in zip(grid.samples, states):
            np.testing.assert_allclose(state.amplitudes, expm(-1j * interacting.total * t) @ chi.amplitudes,
                                       atol=1e-12)

    def test_normalization_functional_is_one(self, interacting, rng, short_grid):
        chi = PureState(interacting.dims, random_state(6, rng))
        trajectories = functional_trajectories(interacting.total, chi, short_grid, 2)
        assert [t.k for t in trajectories] == [1, 2]
        np.testing.assert_allclose(trajectories[0].values, 1.0, atol=1e-12)

    def test_purity_matches_partial_trace(self, interacting, rng):
        chi = PureState(interacting.dims, random_state(6, rng))
        grid = TimeGrid.uniform(2.0, 5)
        purity = functional_trajectories(interacting.total, chi, grid, 2)[1]
        for t, value in zip(grid.samples, purity.values):
            psi = expm(-1j * interacting.total * t) @ chi.amplitudes
            rho_b = partial_trace(np.outer(psi, psi.conj()), 2, 3, keep="B")
            assert value == pytest.approx(trace_power(rho_b, 2), abs=1e-12)

    def test_interaction_moves_purity(self, interacting, rng, default_grid):
        chi = PureState.product(interacting.dims, random_state(2, rng), random_state(3, rng))
        purity = functional_trajectories(interacting.total, chi, default_grid, 2)[1]
        assert purity.drift > 1e-3

    def test_free_evolution_is_flat(self, rng, default_grid):
        H = BipartiteHamiltonian.free(random_hermitian(2, rng), random_hermitian(3, rng))
        chi = PureState(H.dims, random_state(6, rng))
        for traj in functional_trajectories(H.total, chi, default_grid, 2):
            assert traj.drift < 1e-12
        vn, lin = entropy_trajectories(H.total, chi, default_grid)
        assert np.ptp(vn) < 1e-10
        assert np.ptp(lin) < 1e-12

    def test_k_max_range(self, interacting, rng, short_grid):
        chi = PureState(interacting.dims, random_state(6, rng))
        with pytest.raises(InvalidInputError):
            functional_trajectories(interacting.total, chi, short_grid, 3)


class TestSchmidtTrajectory:
    def test_free_evolution_keeps_coefficients(self, rng, default_grid):
        H = BipartiteHamiltonian.free(random_hermitian(2, rng), random_hermitian(3, rng))
        chi = PureState(H.dims, random_state(6, rng))
        trajectory = schmidt_trajectory(H.total, chi, default_grid)
        assert len(trajectory) == len(default_grid)
        assert np.all(trajectory.coefficient_drift() < 1e-10)
        assert not trajectory.degenerate_tracking

    def test_product_state_reports_one_channel(self, rng, short_grid, tmp_path):
        H = BipartiteHamiltonian.free(random_hermitian(2, rng), random_hermitian(3, rng))
        chi = PureState.product(H.dims, random_state(2, rng), random_state(3, rng))
        trajectory = schmidt_trajectory(H.total, chi, short_grid)
        np.testing.assert_allclose(trajectory.coefficient_matrix(), np.ones((len(short_grid), 1)), atol=1e-12)
        assert trajectory.coefficient_matrix(drop_zeros=False).shape == (len(short_grid), 2)

        with open(write_schmidt_csv(trajectory, tmp_path / "s.csv"), newline="") as f:
            rows = list(csv.DictReader(f))
        assert len(rows) == len(short_grid)
        assert {r["l"] for r in rows} == {"0"}

    def test_frames_reconstruct_state(self, interacting, rng, short_grid):
        chi = PureState(interacting.dims, random_state(6, rng))
        trajectory = schmidt_trajectory(interacting.total, chi, short_grid)
        rows = [s.amplitudes for s in evolve(interacting.total, chi, short_grid)]
        for decomposition, row in zip(trajectory, rows):
            np.testing.assert_allclose(decomposition.reconstruct(), row, atol=1e-10)

    def test_right_frames_phase_continuous(self, interacting, rng, short_grid):
        chi = PureState(interacting.dims, random_state(6, rng))
        trajectory = schmidt_trajectory(interacting.total, chi, short_grid)
        for prev, cur in zip(trajectory.decompositions, trajectory.decompositions[1:]):
            overlap = np.einsum("il,il->l", prev.right_vectors.conj(), cur.right_vectors)
            assert np.all(overlap.real >= -1e-12)
            np.testing.assert_allclose(overlap.imag, 0.0, atol=1e-12)


class TestCsvExport:
    def test_headers_and_rows(self, interacting, rng, tmp_path):
        chi = PureState(interacting.dims, random_state(6, rng))
        grid = TimeGrid.uniform(1.0, 3)
        functionals = write_functional_csv(functional_trajectories(interacting.total, chi, grid, 2),
                                           tmp_path / "f.csv")
        schmidt = write_schmidt_csv(schmidt_trajectory(interacting.total, chi, grid), tmp_path / "s.csv")
        vn, lin = entropy_trajectories(interacting.total, chi, grid)
        entropy = write_entropy_csv(grid.samples, vn, lin, tmp_path / "e.csv")

        with open(functionals, newline="") as f:
            rows = list(csv.reader(f))
        assert rows[0] == ["t", "k", "value"]
        assert len(rows) == 1 + 2 * 3
        with open(schmidt, newline="") as f:
            assert next(csv.reader(f)) == ["t", "l", "p_l"]
        with open(entropy, newline="") as f:
            assert next(csv.reader(f)) == ["t", "von_neumann", "linear"]
