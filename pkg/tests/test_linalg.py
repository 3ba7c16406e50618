import numpy as np
import pytest
from numpy.testing import assert_allclose

from qreservoir.errors import (
    ArgumentError,
    HermiticityError,
    InvariantError,
    ShapeError,
    SiteIndexError,
    SizeLimitError,
)
from qreservoir.linalg import (
    DensityMatrix,
    IDENTITY_2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    eigenvalues_hermitian,
    eigh_hermitian,
    expectation,
    kron,
    partial_trace,
    trace,
)
from qreservoir.randmat import RandomMatrixSpec, random_density_matrix
from qreservoir.rng import SplitMix64

from conftest import naive_partial_trace

KET_0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
PLUS = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)


class TestKron:
    def test_identity(self):
        assert_allclose(kron(IDENTITY_2, IDENTITY_2), np.eye(4))

    def test_sigma_z_with_projector(self):
        assert_allclose(kron(SIGMA_Z, KET_0), np.diag([1.0, 0.0, -1.0, 0.0]))

    def test_sigma_x_pair_entries(self):
        xx = kron(SIGMA_X, SIGMA_X)
        assert xx[0, 3] == 1.0
        assert xx[0, 0] == 0.0

    def test_dimension_limit(self):
        big = np.eye(128)
        with pytest.raises(SizeLimitError):
            kron(kron(big, np.eye(16)), np.eye(4))

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            kron(np.ones((2, 3)), IDENTITY_2)


class TestTrace:
    def test_identity(self):
        assert trace(np.eye(4)) == 4.0

    def test_sigma_x(self):
        assert trace(SIGMA_X) == 0.0

    def test_density_matrix_unit_trace(self):
        rho = random_density_matrix(RandomMatrixSpec(8, 0.7, 5))
        assert abs(trace(rho.matrix) - 1.0) < 1e-10


class TestDensityMatrix:
    def test_rejects_non_hermitian(self):
        bad = np.array([[0.5, 0.5], [0.0, 0.5]])
        with pytest.raises(InvariantError):
            DensityMatrix(bad, (2,))

    def test_rejects_wrong_trace(self):
        with pytest.raises(InvariantError):
            DensityMatrix(np.eye(2), (2,))

    def test_rejects_negative_eigenvalue(self):
        with pytest.raises(InvariantError):
            DensityMatrix(np.diag([1.5, -0.5]), (2,))

    def test_rejects_mismatched_site_dims(self):
        with pytest.raises(ShapeError):
            DensityMatrix(np.eye(4) / 4.0, (2,))

    def test_matrix_is_frozen(self):
        rho = DensityMatrix(PLUS, (2,))
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 2.0

    def test_purity_of_pure_state(self):
        assert DensityMatrix(PLUS, (2,)).purity() == pytest.approx(1.0, abs=1e-12)


class TestPartialTrace:
    def test_product_state_factorizes(self):
        rho_a = DensityMatrix(PLUS, (2,))
        rho_b = DensityMatrix(KET_0, (2,))
        joint = DensityMatrix(kron(rho_a.matrix, rho_b.matrix), (2, 2))
        assert_allclose(partial_trace(joint, (0,)).matrix, rho_a.matrix, atol=1e-12)

    def test_bell_state_reduces_to_mixed(self):
        psi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0)
        bell = DensityMatrix(np.outer(psi, psi), (2, 2))
        assert_allclose(partial_trace(bell, (0,)).matrix, np.eye(2) / 2.0, atol=1e-12)

    @pytest.mark.parametrize("keep", [(0,), (1,), (2,), (0, 2), (0, 1), (1, 2)])
    def test_matches_nested_loop_oracle(self, keep, random_three_spin_state):
        for seed in range(20):
            rho = random_three_spin_state(seed)
            got = partial_trace(rho, keep).matrix
            want = naive_partial_trace(rho.matrix, rho.site_dims, keep)
            assert_allclose(got, want, atol=1e-12)

    def test_product_state_property_many_seeds(self):
        # partial_trace(kron(a, b), keep a) == a for random valid factors
        for seed in range(100):
            a = random_density_matrix(RandomMatrixSpec(2, 1.0, seed))
            b = random_density_matrix(RandomMatrixSpec(4, 0.9, seed + 1000))
            joint = DensityMatrix(kron(a.matrix, b.matrix), (2, 2, 2))
            assert_allclose(partial_trace(joint, (0,)).matrix, a.matrix, atol=1e-12)

    def test_full_reduction_is_normalized(self, random_three_spin_state):
        rho = random_three_spin_state(7)
        reduced = partial_trace(rho, (1,))
        assert abs(trace(reduced.matrix) - 1.0) < 1e-10

    def test_empty_keep_rejected(self, random_three_spin_state):
        with pytest.raises(ArgumentError):
            partial_trace(random_three_spin_state(0), ())

    def test_out_of_range_site_rejected(self, random_three_spin_state):
        with pytest.raises(SiteIndexError):
            partial_trace(random_three_spin_state(0), (3,))

    def test_unsorted_keep_rejected(self, random_three_spin_state):
        with pytest.raises(ArgumentError):
            partial_trace(random_three_spin_state(0), (2, 0))


class TestExpectation:
    def test_up_state_sigma_z(self):
        assert expectation(DensityMatrix(KET_0, (2,)), SIGMA_Z) == pytest.approx(1.0)

    def test_identity_gives_trace(self):
        rho = random_density_matrix(RandomMatrixSpec(4, 1.0, 3))
        assert expectation(rho, np.eye(4)) == pytest.approx(1.0, abs=1e-10)

    def test_plus_state_sigma_z(self):
        assert expectation(DensityMatrix(PLUS, (2,)), SIGMA_Z) == pytest.approx(
            0.0, abs=1e-12
        )

    def test_linearity_in_observable(self):
        rng = SplitMix64(21)
        for seed in range(25):
            rho = random_density_matrix(RandomMatrixSpec(4, 1.0, seed))
            from qreservoir.randmat import random_hermitian

            o1 = random_hermitian(RandomMatrixSpec(4, 1.0, seed + 100))
            o2 = random_hermitian(RandomMatrixSpec(4, 1.0, seed + 200))
            a = 2.0 * rng.uniform() - 1.0
            b = 2.0 * rng.uniform() - 1.0
            combined = expectation(rho, a * o1 + b * o2)
            parts = a * expectation(rho, o1) + b * expectation(rho, o2)
            assert combined == pytest.approx(parts, abs=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ShapeError):
            expectation(DensityMatrix(PLUS, (2,)), np.eye(4))

    def test_non_hermitian_observable(self):
        with pytest.raises(HermiticityError):
            expectation(DensityMatrix(PLUS, (2,)), np.array([[0, 1], [0, 0]]))


class TestEigenvalues:
    def test_sigma_x(self):
        assert_allclose(eigenvalues_hermitian(SIGMA_X), [-1.0, 1.0], atol=1e-12)

    def test_identity(self):
        assert_allclose(eigenvalues_hermitian(np.eye(4)), np.ones(4))

    def test_two_spin_heisenberg_exchange(self):
        # direct 4x4 diagonalization oracle: singlet at -3, triplet at +1
        h = kron(SIGMA_X, SIGMA_X) + kron(SIGMA_Y, SIGMA_Y) + kron(SIGMA_Z, SIGMA_Z)
        assert_allclose(eigenvalues_hermitian(h), [-3.0, 1.0, 1.0, 1.0], atol=1e-10)

    def test_rejects_non_hermitian(self):
        with pytest.raises(HermiticityError):
            eigenvalues_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_eigenvalue_sum_matches_trace(self):
        from qreservoir.randmat import random_hermitian

        for seed in range(30):
            h = random_hermitian(RandomMatrixSpec(16, 0.6, seed))
            w = eigenvalues_hermitian(h)
            assert np.all(np.isreal(w))
            assert w.sum() == pytest.approx(float(np.trace(h).real), abs=1e-8)

    def test_reconstruction_residual(self):
        from qreservoir.randmat import random_hermitian

        h = random_hermitian(RandomMatrixSpec(32, 0.8, 4))
        w, v = eigh_hermitian(h)
        assert np.abs((v * w) @ v.conj().T - h).max() < 1e-8
