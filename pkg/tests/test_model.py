import json

import numpy as np
import pytest
from pydantic import ValidationError

from ifelab.core.errors import CapacityError, InvalidInputError, ShapeError
from ifelab.core.model import (
    BipartiteDims,
    BipartiteHamiltonian,
    PureState,
    eigensystem_for,
    expand_in_eigenbasis,
    local_eigensystem,
    validate,
)
from ifelab.core.numerics import random_hermitian, random_state
from ifelab.core.schema import (
    HamiltonianDocument,
    dump_hamiltonian,
    dump_state,
    from_pairs,
    hamiltonian_to_document,
    load_hamiltonian,
    load_state,
    state_to_document,
    to_pairs,
)
from ifelab.families.operators import SIGMA_PLUS


def _random_hamiltonian(rng, dim_a=2, dim_b=3):
    return BipartiteHamiltonian(
        BipartiteDims(dim_a, dim_b),
        random_hermitian(dim_a, rng),
        random_hermitian(dim_b, rng),
        random_hermitian(dim_a * dim_b, rng),
    )


class TestDims:
    def test_rank_bound(self):
        dims = BipartiteDims(2, 5)
        assert dims.total == 10
        assert dims.schmidt_rank_bound == 2

    def test_trivial_subsystem(self):
        with pytest.raises(ShapeError):
            BipartiteDims(1, 4)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            BipartiteDims(100, 100)


class TestHamiltonian:
    def test_total_assembly(self, rng):
        H = _random_hamiltonian(rng)
        expected = np.kron(H.h_a, np.eye(3)) + np.kron(np.eye(2), H.h_b) + H.h_i
        np.testing.assert_allclose(H.total, expected)
        np.testing.assert_allclose(H.total - H.free_part, H.h_i)

    def test_free_has_zero_interaction(self, rng):
        H = BipartiteHamiltonian.free(random_hermitian(2, rng), random_hermitian(2, rng))
        assert not np.any(H.h_i)
        assert H.dims == BipartiteDims(2, 2)

    def test_content_hash(self, rng):
        H = _random_hamiltonian(rng)
        same = BipartiteHamiltonian(H.dims, H.h_a.copy(), H.h_b.copy(), H.h_i.copy())
        other = BipartiteHamiltonian(H.dims, H.h_a, H.h_b, 2 * H.h_i)
        assert H.content_hash == same.content_hash
        assert H.content_hash != other.content_hash

    def test_validate_ok(self, rng):
        report = validate(_random_hamiltonian(rng))
        assert report.ok
        assert set(report.norms) == {"H_A", "H_B", "H_I"}

    def test_validate_flags_non_hermitian(self, rng):
        H = BipartiteHamiltonian(BipartiteDims(2, 2), SIGMA_PLUS, np.eye(2), np.zeros((4, 4)))
        report = validate(H)
        assert not report.ok
        assert [c.name for c in report.failures()] == ["H_A.hermitian"]

    def test_validate_flags_shape(self, rng):
        H = BipartiteHamiltonian(BipartiteDims(2, 2), np.eye(2), np.eye(3), np.zeros((4, 4)))
        assert "H_B.shape" in [c.name for c in validate(H).failures()]
        with pytest.raises(ShapeError):
            H.total


class TestEigensystem:
    def test_cached(self, rng):
        H = _random_hamiltonian(rng)
        assert eigensystem_for(H) is eigensystem_for(H)
        assert eigensystem_for(H).residual(H.total) < 1e-12

    def test_local_eigensystem_diagonalizes_free_part(self, rng):
        H = BipartiteHamiltonian.free(random_hermitian(2, rng), random_hermitian(3, rng))
        es = local_eigensystem(H.h_a, H.h_b)
        assert es.residual(H.free_part) < 1e-12

    def test_expansion_round_trip(self, rng):
        H = _random_hamiltonian(rng)
        es = eigensystem_for(H)
        chi = random_state(6, rng)
        c = expand_in_eigenbasis(chi, es)
        np.testing.assert_allclose(es.eigenvectors @ c, chi, atol=1e-12)


class TestPureState:
    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidInputError, match="not normalized"):
            PureState.from_amplitudes(BipartiteDims(2, 2), [1, 1, 0, 0])

    def test_normalize(self):
        chi = PureState.from_amplitudes(BipartiteDims(2, 2), [1, 1, 0, 0], normalize=True)
        assert np.linalg.norm(chi.amplitudes) == pytest.approx(1.0)

    def test_zero_vector(self):
        with pytest.raises(InvalidInputError):
            PureState.from_amplitudes(BipartiteDims(2, 2), np.zeros(4), normalize=True)

    def test_wrong_length(self):
        with pytest.raises(ShapeError):
            PureState.from_amplitudes(BipartiteDims(2, 2), [1, 0, 0])

    def test_product(self):
        chi = PureState.product(BipartiteDims(2, 3), [0, 1], [0, 0, 1])
        assert chi.amplitudes[1 * 3 + 2] == pytest.approx(1.0)

    def test_from_eigen_coefficients(self, rng):
        H = _random_hamiltonian(rng)
        es = eigensystem_for(H)
        c = np.zeros(6)
        c[2] = 1.0
        chi = PureState.from_eigen_coefficients(H.dims, es, c, key=H.content_hash)
        np.testing.assert_allclose(chi.amplitudes, es.vector(2))
        np.testing.assert_allclose(expand_in_eigenbasis(chi, es), c, atol=1e-12)


class TestSchema:
    def test_pairs(self):
        arr = np.array([[1 + 2j, 0], [0, -1j]])
        assert to_pairs(arr)[0][0] == [1.0, 2.0]
        np.testing.assert_array_equal(from_pairs(to_pairs(arr)), arr)

    def test_file_round_trip(self, rng, tmp_path):
        H = _random_hamiltonian(rng)
        path = dump_hamiltonian(H, tmp_path / "h.json")
        loaded = load_hamiltonian(path)
        np.testing.assert_array_equal(loaded.total, H.total)
        assert loaded.content_hash == H.content_hash

    def test_rejects_bare_numbers(self, rng):
        doc = hamiltonian_to_document(_random_hamiltonian(rng)).model_dump()
        doc["HA"] = [[1.0, 0.0], [0.0, 1.0]]
        with pytest.raises(ValidationError):
            HamiltonianDocument.model_validate(doc)

    def test_state_file_round_trip(self, rng, tmp_path):
        dims = BipartiteDims(2, 3)
        chi = PureState(dims, random_state(6, rng), label="random")
        loaded = load_state(dump_state(chi, tmp_path / "chi.json"))
        np.testing.assert_array_equal(loaded.amplitudes, chi.amplitudes)
        assert loaded.dims == dims
        assert loaded.label == "random"

    def test_state_rejects_non_finite_amplitude(self, rng, tmp_path):
        raw = json.loads(state_to_document(PureState(BipartiteDims(2, 2), random_state(4, rng))).model_dump_json())
        raw["amplitudes"][1] = [float("inf"), 0.0]
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(raw), encoding="utf-8")
        with pytest.raises(ValidationError):
            load_state(path)

    def test_state_rejects_wrong_length(self, tmp_path):
        doc = {"dimA": 2, "dimB": 2, "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}
        path = tmp_path / "short.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        with pytest.raises(ShapeError):
            load_state(path)

    def test_rejects_nan(self, rng):
        raw = json.loads(hamiltonian_to_document(_random_hamiltonian(rng)).model_dump_json())
        raw["HB"][0][0] = [float("nan"), 0.0]
        with pytest.raises(ValidationError):
            HamiltonianDocument.model_validate(raw)
