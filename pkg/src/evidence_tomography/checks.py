"""Self-checks of the exact identities the procedure relies on.

Used by the ``check`` subcommand. Each check returns a :class:`CheckResult`
holding the worst deviation found and the tolerance it is held to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import log_interpolate, relative_entropy
from .evidence import EvidenceStatus, evidence_scalars
from .fourqubit import partition_function
from .maxent import ObservableSet, canonical_state, solve_maxent
from .operators import DensityMatrix, HermitianOperator, max_norm, normalized_exp, total_J_squared

SWEEP_R = (3, 12, 48, 255)
SWEEP_RATIO = (1.1, 2.0, 10.0, 100.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.deviation <= self.tolerance


def random_density_matrix(dim, rng, floor=0.05) -> DensityMatrix:
    """Random full-rank state, mixed with ``floor * I/d`` to bound its spectrum."""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = a @ a.conj().T
    m = (1 - floor) * m / np.trace(m).real + floor * np.eye(dim) / dim
    return DensityMatrix(m / np.trace(m).real)


def random_hermitian(dim, rng) -> HermitianOperator:
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return HermitianOperator(a)


def random_problem(dim, rng, max_r=4):
    """Random prior, observables and feasible targets (the means of a random state)."""
    sigma = random_density_matrix(dim, rng)
    r = int(rng.integers(1, min(max_r, dim * dim - 1) + 1))
    obs = ObservableSet([random_hermitian(dim, rng) for _ in range(r)])
    truth = random_density_matrix(dim, rng)
    return sigma, obs, obs.expectations(truth)


def _scalar_grid(n=255, N=10_000):
    for r in SWEEP_R:
        for ratio in SWEEP_RATIO:
            n_min = N / ratio
            yield r, evidence_scalars(r / (2.0 * n_min), r, N, n)


def check_posterior_mean(n=255) -> CheckResult:
    dev = 0.0
    for _, sc in _scalar_grid(n):
        if sc.status is not EvidenceStatus.APPLICABLE:
            return CheckResult("posterior mean = n/2", math.inf, 1e-12)
        dev = max(dev, abs(sc.posterior_mean_check - n / 2))
    return CheckResult("posterior mean = n/2", dev, 1e-12)


def check_variance(n=255, beta_perturbation=0.0) -> CheckResult:
    dev = 0.0
    for r, sc in _scalar_grid(n):
        beta = sc.beta + beta_perturbation
        dev = max(dev, abs((n / 2 - sc.variance) - r / 2 * (1 - beta) ** 2))
    return CheckResult("n/2 - variance = (r/2)(1-beta)^2", dev, 1e-12)


def check_estimate_equivalence(dims, rng, per_dim=5) -> CheckResult:
    dev = 0.0
    for d in dims:
        for _ in range(per_dim):
            sigma, obs, g = random_problem(d, rng)
            mu = solve_maxent(sigma, obs, g)
            alpha0, N = rng.uniform(10, 1e4), int(rng.integers(10, 10_000))
            w = alpha0 / (alpha0 + N)
            a, _ = log_interpolate(mu.state, sigma, w)
            b = canonical_state(sigma, obs, (1 - w) * mu.lagrange).state
            dev = max(dev, max_norm(a, b))
    return CheckResult("log interpolation = rescaled multipliers", dev, 1e-10)


def check_quasi_linearity(dims, rng, trials=20) -> CheckResult:
    dev = 0.0
    for d in dims:
        mu, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
        t = rng.uniform()
        mid, c = log_interpolate(mu, sigma, t)
        for _ in range(trials):
            rho = random_density_matrix(d, rng)
            lhs = (1 - t) * relative_entropy(rho, mu) + t * relative_entropy(rho, sigma)
            dev = max(dev, abs(lhs - relative_entropy(rho, mid) - c))
    return CheckResult("quasi-linearity offset independent of rho", dev, 1e-9)


def check_partition_function(points=20) -> CheckResult:
    j2 = total_J_squared(4)
    dev = 0.0
    for lam in np.linspace(0.0, 2.0, points):
        numeric = math.exp(normalized_exp(-lam * j2)[1])
        dev = max(dev, abs(numeric - partition_function(lam)) / partition_function(lam))
    return CheckResult("closed-form Z(lambda) = tr exp(-lambda J^2)", dev, 1e-10)


def run_checks(dims=(2, 4, 8, 16), seed=0, beta_perturbation=0.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_posterior_mean(),
        check_variance(beta_perturbation=beta_perturbation),
        check_estimate_equivalence(dims, rng),
        check_quasi_linearity(dims, rng),
        check_partition_function(),
    ]
