import logging
import math

import numpy as np
import pytest

from evidence_tomography.checks import random_density_matrix, random_hermitian
from evidence_tomography.entropy import log_interpolate, relative_entropy, von_neumann_entropy
from evidence_tomography.exceptions import OutOfRange, SupportViolation
from evidence_tomography.maxent import ObservableSet, pythagorean_defect, solve_maxent
from evidence_tomography.operators import (
    DensityMatrix,
    max_norm,
    normalized_exp,
    total_J_squared,
)

BINARY_KL_07 = 0.082282878505051782  # 0.7 ln 1.4 + 0.3 ln 0.6
BINARY_H_07 = 0.61086430205489349

log = logging.getLogger(__name__)


def diag(*p):
    return DensityMatrix(np.diag(p))


class TestRelativeEntropy:
    def test_self_is_zero(self):
        rho = random_density_matrix(6, np.random.default_rng(0))
        assert abs(relative_entropy(rho, rho)) <= 1e-12

    def test_binary(self):
        assert relative_entropy(diag(0.7, 0.3), diag(0.5, 0.5)) == pytest.approx(BINARY_KL_07, abs=1e-14)

    def test_pure_against_mixed(self):
        assert relative_entropy(DensityMatrix.pure([1, 0]), DensityMatrix.maximally_mixed(2)) == pytest.approx(
            math.log(2), abs=1e-14
        )

    def test_support_violation(self):
        with pytest.raises(SupportViolation):
            relative_entropy(DensityMatrix.maximally_mixed(2), DensityMatrix.pure([1, 0]))

    def test_rank_deficient_reference_inside_support(self):
        p = DensityMatrix.pure([1, 1j])
        assert abs(relative_entropy(p, p)) <= 1e-12

    def test_nonnegative_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            d = int(rng.integers(2, 17))
            rho, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
            s = relative_entropy(rho, sigma)
            assert s >= 0
            # distinct random states are far apart, so S must be visibly positive
            assert max_norm(rho, sigma) > 1e-8 and s > 1e-10

    def test_zero_iff_close(self):
        rng = np.random.default_rng(12)
        rho = random_density_matrix(4, rng)
        bump = random_hermitian(4, rng).matrix.copy()
        bump -= np.trace(bump) / 4 * np.eye(4)
        bump /= np.max(np.abs(bump))
        near = DensityMatrix(rho.matrix + 1e-9 * bump)
        assert max_norm(near, rho) <= 1e-8
        assert relative_entropy(near, rho) <= 1e-10
        far = DensityMatrix(rho.matrix + 1e-3 * bump)
        assert max_norm(far, rho) > 1e-8
        assert relative_entropy(far, rho) > 1e-10


class TestVonNeumann:
    @pytest.mark.parametrize("d", [2, 7, 16])
    def test_maximally_mixed(self, d):
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(d)) == pytest.approx(math.log(d), abs=1e-14)

    def test_pure(self):
        assert von_neumann_entropy(DensityMatrix.pure([1, 1, 0])) == pytest.approx(0.0, abs=1e-14)

    def test_binary(self):
        assert von_neumann_entropy(diag(0.7, 0.3)) == pytest.approx(BINARY_H_07, abs=1e-14)


class TestLogInterpolate:
    def test_endpoints(self):
        rng = np.random.default_rng(2)
        mu, sigma = random_density_matrix(4, rng), random_density_matrix(4, rng)
        assert max_norm(log_interpolate(mu, sigma, 0.0)[0], mu) <= 1e-12
        assert max_norm(log_interpolate(mu, sigma, 1.0)[0], sigma) <= 1e-12

    def test_geometric_mean(self):
        mid, _ = log_interpolate(diag(0.8, 0.2), diag(0.5, 0.5), 0.5)
        np.testing.assert_allclose(mid.matrix, np.diag([2 / 3, 1 / 3]), atol=1e-14)

    def test_thermal_family(self):
        j2 = total_J_squared(4)
        mu = normalized_exp(-0.235 * j2)[0]
        sigma = normalized_exp(-0.18 * j2)[0]
        t = 0.4936
        mid, _ = log_interpolate(mu, sigma, t)
        expected = normalized_exp(-(t * 0.18 + (1 - t) * 0.235) * j2)[0]
        assert max_norm(mid, expected) <= 1e-12

    @pytest.mark.parametrize("t", [-0.1, 1.5])
    def test_range(self, t):
        m = DensityMatrix.maximally_mixed(2)
        with pytest.raises(OutOfRange):
            log_interpolate(m, m, t)

    def test_offset_independent_of_rho(self):
        rng = np.random.default_rng(7)
        for d in (2, 4, 8, 16):
            mu, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
            t = float(rng.uniform())
            mid, c = log_interpolate(mu, sigma, t)
            offsets = []
            for _ in range(20):
                rho = random_density_matrix(d, rng)
                lhs = (1 - t) * relative_entropy(rho, mu) + t * relative_entropy(rho, sigma)
                offsets.append(lhs - relative_entropy(rho, mid))
            assert max(offsets) - min(offsets) <= 1e-9
            assert np.allclose(offsets, c, atol=1e-9)


class TestPythagoras:
    def test_commuting(self):
        rng = np.random.default_rng(8)
        for d in (2, 3, 5, 8):
            p = rng.dirichlet(np.ones(d)) * 0.9 + 0.1 / d
            sigma = DensityMatrix(np.diag(p))
            obs = ObservableSet([np.diag(rng.standard_normal(d)) for _ in range(min(2, d - 1))])
            for _ in range(5):
                q = rng.dirichlet(np.ones(d)) * 0.9 + 0.1 / d
                rho = DensityMatrix(np.diag(q))
                assert abs(pythagorean_defect(rho, sigma, obs)) <= 1e-9

    def test_noncommuting_diagnostic(self):
        rng = np.random.default_rng(9)
        worst = 0.0
        for _ in range(10):
            sigma, rho = random_density_matrix(4, rng), random_density_matrix(4, rng)
            obs = ObservableSet([random_hermitian(4, rng) for _ in range(3)])
            worst = max(worst, abs(pythagorean_defect(rho, sigma, obs)))
        log.info("noncommuting Pythagorean defect, worst of 10: %.3e", worst)
        assert math.isfinite(worst)

    def test_decomposition_pieces_nonnegative(self):
        rng = np.random.default_rng(10)
        sigma, rho = random_density_matrix(4, rng), random_density_matrix(4, rng)
        obs = ObservableSet([random_hermitian(4, rng) for _ in range(2)])
        mu = solve_maxent(sigma, obs, obs.expectations(rho)).state
        assert relative_entropy(rho, mu) >= 0
        assert relative_entropy(mu, sigma) <= relative_entropy(rho, sigma) + 1e-12
