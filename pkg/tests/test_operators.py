import math

import numpy as np
import pytest

from evidence_tomography.checks import random_density_matrix, random_hermitian
from evidence_tomography.exceptions import (
    ConsistencyError,
    DimensionMismatch,
    NotADensityMatrix,
    RankDeficient,
)
from evidence_tomography.operators import (
    DensityMatrix,
    HermitianOperator,
    expectation,
    matrix_log,
    max_norm,
    normalized_exp,
    pauli_operator,
    spectral_decompose,
    spin_component,
    total_J_squared,
    total_spin_component,
)
from oracles import commutes

# Closed-form values at x = exp(-2 lam) = 0.7, evaluated in 40-digit arithmetic.
Z_AT_0_7 = 10.014999358378826
J2_AT_0_7 = 2.2855715456303504


class TestSpinComponents:
    def test_single_qubit_z(self):
        s = spin_component(0, 3, 1)
        np.testing.assert_array_equal(s.matrix, 0.5 * np.diag([1.0, -1.0]))

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_traceless_and_involutive(self, m):
        eye = np.eye(2**m)
        for i in range(m):
            for a in (1, 2, 3):
                s = spin_component(i, a, m).matrix
                assert abs(np.trace(s)) == 0
                assert np.max(np.abs(s @ s - eye / 4)) <= 1e-15

    def test_labels(self):
        assert spin_component(2, 1, 4).label == "S2x"
        assert spin_component(0, 3, 4).label == "S0z"

    @pytest.mark.parametrize("args", [(4, 1, 4), (-1, 1, 4), (0, 0, 4), (0, 4, 4), (0, 1, 13)])
    def test_index_guards(self, args):
        with pytest.raises((ValueError, IndexError)):
            spin_component(*args)

    def test_distinct_qubits_commute(self):
        m = 4
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                for a in (1, 2, 3):
                    for b in (1, 2, 3):
                        si, sj = spin_component(i, a, m).matrix, spin_component(j, b, m).matrix
                        assert commutes(si, sj, 1e-12)

    def test_same_qubit_algebra(self):
        sx, sy, sz = (spin_component(0, a, 1).matrix for a in (1, 2, 3))
        np.testing.assert_allclose(sx @ sy - sy @ sx, 1j * sz, atol=1e-15)


class TestJSquared:
    def test_four_qubit_multiplicities(self):
        w = np.linalg.eigvalsh(total_J_squared(4).matrix)
        values, counts = np.unique(np.round(w, 9), return_counts=True)
        assert dict(zip(values.tolist(), counts.tolist())) == {0.0: 2, 2.0: 9, 6.0: 5}

    def test_single_qubit(self):
        np.testing.assert_allclose(total_J_squared(1).matrix, 0.75 * np.eye(2), atol=1e-15)

    @pytest.mark.parametrize("m", [2, 3, 4])
    def test_commutes_with_total_spin(self, m):
        j2 = total_J_squared(m).matrix
        for a in (1, 2, 3):
            assert commutes(j2, total_spin_component(a, m).matrix, 1e-11)

    def test_maximally_mixed_expectation(self):
        assert expectation(DensityMatrix.maximally_mixed(16), total_J_squared(4)) == pytest.approx(3.0, abs=1e-14)


class TestSpectral:
    def test_pauli_z(self):
        w, _ = spectral_decompose(pauli_operator("Z"))
        np.testing.assert_array_equal(w, [-1.0, 1.0])

    def test_reconstruction_random(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(1000):
            d = int(rng.integers(1, 17))
            h = random_hermitian(d, rng)
            dec = spectral_decompose(h)
            worst = max(worst, np.max(np.abs(dec.reconstruct() - h.matrix)))
            assert np.all(np.diff(dec.eigenvalues) >= 0)
            np.testing.assert_allclose(
                dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(d), atol=1e-12
            )
        assert worst <= 1e-11

    def test_deterministic_and_phase_fixed(self):
        h = random_hermitian(8, np.random.default_rng(5))
        a, b = spectral_decompose(h), spectral_decompose(h)
        assert a.eigenvectors.tobytes() == b.eigenvectors.tobytes()
        for k in range(8):
            v = a.eigenvectors[:, k]
            first = v[np.flatnonzero(np.abs(v) > 1e-10)[0]]
            assert first.imag == 0 and first.real > 0

    def test_apply(self):
        rho = random_density_matrix(4, np.random.default_rng(2))
        sq = rho.spectrum.apply(np.sqrt)
        np.testing.assert_allclose(sq @ sq, rho.matrix, atol=1e-13)


class TestHermitianOperator:
    def test_symmetrized(self):
        a = np.array([[1.0, 2.0], [0.0, 3.0]])
        h = HermitianOperator(a)
        np.testing.assert_array_equal(h.matrix, h.matrix.conj().T)
        np.testing.assert_array_equal(h.matrix, [[1.0, 1.0], [1.0, 3.0]])

    def test_immutable(self):
        h = pauli_operator("X")
        with pytest.raises(ValueError):
            h.matrix[0, 0] = 5

    def test_arithmetic(self):
        x, z = pauli_operator("X"), pauli_operator("Z")
        np.testing.assert_array_equal((x + 2.0 * z).matrix, [[2, 1], [1, -2]])
        np.testing.assert_array_equal((x - x).matrix, np.zeros((2, 2)))

    def test_pauli_ordering(self):
        # leftmost letter acts on qubit 0, the most significant tensor factor
        np.testing.assert_array_equal(pauli_operator("ZI").matrix, np.kron(np.diag([1, -1]), np.eye(2)))
        assert pauli_operator("XYZI").num_qubits == 4


class TestDensityMatrix:
    def test_rejects_bad_trace(self):
        with pytest.raises(NotADensityMatrix):
            DensityMatrix(np.diag([0.5, 0.6]))

    def test_rejects_negative(self):
        with pytest.raises(NotADensityMatrix):
            DensityMatrix(np.diag([1.2, -0.2]))

    def test_full_rank(self):
        assert DensityMatrix.maximally_mixed(4).is_full_rank()
        assert not DensityMatrix.pure([1, 0]).is_full_rank()


class TestLogExp:
    @pytest.mark.parametrize("d", [2, 5, 16])
    def test_log_maximally_mixed(self, d):
        np.testing.assert_allclose(
            matrix_log(DensityMatrix.maximally_mixed(d)).matrix, -math.log(d) * np.eye(d), atol=1e-14
        )

    def test_log_pure_raises(self):
        with pytest.raises(RankDeficient):
            matrix_log(DensityMatrix.pure([1, 0]))

    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for d in (2, 3, 8, 16):
            rho = random_density_matrix(d, rng)
            back, log_z = normalized_exp(matrix_log(rho))
            assert max_norm(back, rho) <= 1e-12
            assert abs(log_z) <= 1e-12

    def test_zero_hamiltonian(self):
        rho, log_z = normalized_exp(np.zeros((6, 6)))
        np.testing.assert_allclose(rho.matrix, np.eye(6) / 6, atol=1e-15)
        assert log_z == pytest.approx(math.log(6), abs=1e-14)

    def test_four_qubit_thermal(self):
        rho, log_z = normalized_exp(-0.1783375 * total_J_squared(4))
        assert np.trace(rho.matrix).real == pytest.approx(1.0, abs=1e-14)
        assert expectation(rho, total_J_squared(4)) == pytest.approx(J2_AT_0_7, abs=1e-10)
        assert math.exp(log_z) == pytest.approx(Z_AT_0_7, rel=1e-12)

    def test_shift_invariance(self):
        h = random_hermitian(5, np.random.default_rng(4))
        a, za = normalized_exp(h)
        b, zb = normalized_exp(h + 700.0 * HermitianOperator(np.eye(5)))
        assert max_norm(a, b) <= 1e-12
        assert zb - za == pytest.approx(700.0, rel=1e-14)


class TestExpectation:
    def test_basis_state(self):
        assert expectation(DensityMatrix.pure([1, 0]), pauli_operator("Z")) == 1.0

    def test_linear(self):
        rng = np.random.default_rng(6)
        rho = random_density_matrix(4, rng)
        a, b = random_hermitian(4, rng), random_hermitian(4, rng)
        assert expectation(rho, a + 3.0 * b) == pytest.approx(
            expectation(rho, a) + 3.0 * expectation(rho, b), abs=1e-12
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            expectation(DensityMatrix.maximally_mixed(2), pauli_operator("ZZ"))

    def test_non_hermitian_raises(self):
        with pytest.raises(ConsistencyError):
            expectation(DensityMatrix.pure([1, 1j]), np.array([[0, 1], [0, 0]]))
