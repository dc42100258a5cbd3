"""Evidence procedure (ML-II) for state estimation from incomplete data.

The prior over states is ``prob(rho | alpha) ∝ exp[-alpha S(rho || sigma)]``.
From the data-state distance ``S = S(mu || sigma)``, with ``mu`` the canonical
state reproducing the measured means, the optimal hyperparameter is

    N_min  = r / (2 S)
    alpha0 = N_min / (1 - N_min / N)          (requires N > N_min)

and the estimate interpolates in log space between ``sigma`` and ``mu`` with
weight ``beta = alpha0 / (alpha0 + N) = N_min / N`` on the prior. The
approximation is trusted when ``(r/2) (1 - beta)**2 >> 1``.
"""

from __future__ import annotations

import enum
import logging
import math
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .entropy import log_interpolate, relative_entropy
from .exceptions import ConsistencyError, DimensionMismatch, OutOfRange, TomographyError
from .maxent import CanonicalState, ObservableSet, canonical_state, solve_maxent
from .operators import DensityMatrix, max_norm

log = logging.getLogger(__name__)

ESTIMATE_TOL = 1e-10


class EvidenceStatus(str, enum.Enum):
    APPLICABLE = "Applicable"
    PRIOR_CONFIRMED = "PriorConfirmed"
    INSUFFICIENT_DATA = "InsufficientData"
    # Reported as a flag next to APPLICABLE, never as the status itself.
    WEAK_CRITERION = "WeakCriterion"


@dataclass(frozen=True, eq=False)
class EvidenceInput:
    prior: DensityMatrix
    observables: ObservableSet
    means: np.ndarray
    N: int

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.shape != (len(self.observables),):
            raise DimensionMismatch(
                f"{means.size} means for {len(self.observables)} observables"
            )
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"sample size must be a positive integer, got {self.N}")
        if self.prior.dim != self.observables.dim:
            raise DimensionMismatch("prior and observables differ in dimension")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "N", int(self.N))

    @property
    def n(self) -> int:
        """Number of real state parameters, ``d**2 - 1``."""
        return self.prior.dim**2 - 1

    @property
    def r(self) -> int:
        return self.observables.r


@dataclass(frozen=True)
class EvidenceScalars:
    """Scalar outputs of the hyperparameter estimate.

    ``posterior_mean_check`` and ``variance`` are the three-summand sums for the
    posterior mean and variance of ``alpha0 S(rho||sigma)``; each summand is
    evaluated from ``alpha0``, ``N`` and ``S_data`` directly.
    """

    S_data: float
    r: int
    N: int
    n: int
    N_min: float
    alpha0: float
    beta: float
    criterion: float
    variance: float
    posterior_mean_check: float
    alpha0_range_ratio: float
    status: EvidenceStatus


def evidence_scalars(
    S_data: float, r: int, N: int, n: int, prior_tol: float = 1e-12
) -> EvidenceScalars:
    """Optimal hyperparameter and applicability diagnostics.

    Status is PRIOR_CONFIRMED when ``S_data <= prior_tol * r`` (``N_min`` and
    ``alpha0`` are then ``inf`` and ``beta = 1``) and INSUFFICIENT_DATA when
    ``N <= N_min`` (``alpha0`` is ``nan``).
    """
    if S_data < 0 or not math.isfinite(S_data):
        raise ValueError(f"S_data must be finite and nonnegative, got {S_data}")
    if r < 1 or N < 1:
        raise ValueError("r and N must be positive")
    half_n, half_r = n / 2.0, r / 2.0

    if S_data <= prior_tol * r:
        return EvidenceScalars(
            S_data, r, N, n, math.inf, math.inf, 1.0, 0.0, half_n, half_n, math.nan,
            EvidenceStatus.PRIOR_CONFIRMED,
        )

    n_min = r / (2.0 * S_data)
    beta = n_min / N
    criterion = half_r * (1.0 - beta) ** 2
    if N <= n_min:
        variance = (n - r) / 2.0 + beta**2 * half_r + r * beta * (1.0 - beta)
        mean = (n - r) / 2.0 + beta * half_r + (1.0 - beta) * half_r
        return EvidenceScalars(
            S_data, r, N, n, n_min, math.nan, beta, criterion, variance, mean, math.nan,
            EvidenceStatus.INSUFFICIENT_DATA,
        )

    alpha0 = n_min / (1.0 - beta)
    w = alpha0 / (alpha0 + N)
    # Posterior mean of alpha0 S(rho||sigma): three summands.
    mean = (n - r) / 2.0 + w * half_r + alpha0 * N**2 / (alpha0 + N) ** 2 * S_data
    variance = (
        (n - r) / 2.0
        + w**2 * half_r
        + 2.0 * alpha0**2 * N**2 / (alpha0 + N) ** 3 * S_data
    )
    ratio = alpha0 / (math.sqrt(half_r) * n_min)
    return EvidenceScalars(
        S_data, r, N, n, n_min, alpha0, beta, criterion, variance, mean, ratio,
        EvidenceStatus.APPLICABLE,
    )


def posterior_estimate(
    sigma: DensityMatrix, data_state: CanonicalState, alpha0: float, N: int
) -> tuple[DensityMatrix, np.ndarray]:
    """Estimate ``rho_e`` and its rescaled Lagrange parameters.

    Computed twice, as the log-space interpolation between ``sigma`` and the
    data state and as the canonical state with multipliers scaled by
    ``N / (alpha0 + N)``; the two must agree within 1e-10.
    """
    if not alpha0 > 0:
        raise ValueError(f"alpha0 must be positive, got {alpha0}")
    prior_weight = alpha0 / (alpha0 + N)
    lam_e = (N / (alpha0 + N)) * np.asarray(data_state.lagrange)
    via_interp, _ = log_interpolate(data_state.state, sigma, prior_weight)
    via_lagrange = canonical_state(sigma, data_state.observables, lam_e).state
    gap = max_norm(via_interp, via_lagrange)
    if gap > ESTIMATE_TOL:
        raise ConsistencyError(f"estimate routes disagree by {gap:.3e}")
    return via_lagrange, lam_e


def error_report(
    alpha0: float, N: int, estimate: DensityMatrix, observables: ObservableSet
) -> tuple[float, float, np.ndarray]:
    """Error-bar scales for measured and unmeasured degrees of freedom.

    Returns ``1/sqrt(alpha0 + N)``, ``1/sqrt(alpha0)`` and per-observable
    standard errors ``sqrt(Var(G_a) / (alpha0 + N))`` with the variance taken
    in ``estimate`` (unit prefactor).
    """
    means = observables.expectations(estimate)
    squares = np.einsum("aij,ajk,ki->a", observables.matrices, observables.matrices, estimate.matrix).real
    var = np.clip(squares - means**2, 0.0, None)
    return (
        1.0 / math.sqrt(alpha0 + N),
        1.0 / math.sqrt(alpha0),
        np.sqrt(var / (alpha0 + N)),
    )


def stein_log_likelihood(rho: DensityMatrix, observables: ObservableSet, g, N: int) -> float:
    """Large-sample log-likelihood ``-N S(mu || rho)`` of the means ``g``,
    with ``mu`` the canonical state relative to ``rho`` reproducing ``g``."""
    mu = solve_maxent(rho, observables, g)
    return -N * relative_entropy(mu.state, rho)


@dataclass(frozen=True, eq=False)
class EvidenceReport:
    scalars: EvidenceScalars
    status: EvidenceStatus
    data_state: CanonicalState
    estimate: DensityMatrix
    lambda_e: np.ndarray
    error_measured: float
    error_unmeasured: float
    per_observable_stderr: np.ndarray
    flags: tuple = field(default_factory=tuple)

    @property
    def weak_criterion(self) -> bool:
        return EvidenceStatus.WEAK_CRITERION in self.flags


@contextmanager
def _stage(name):
    try:
        yield
    except TomographyError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def run_evidence(
    inp: EvidenceInput, criterion_threshold: float = 10.0, prior_tol: float = 1e-12
) -> EvidenceReport:
    """Run the full procedure on one dataset.

    The data state is solved against the prior, its distance ``S_data`` fixes
    the hyperparameter, and the status decides what is estimated:

    * PriorConfirmed: ``S_data <= prior_tol * r``; the estimate is the prior.
    * InsufficientData: ``N <= N_min``; the estimate is the prior, diagnostics
      are still reported.
    * Applicable: full estimate and error bars. If the sharpness criterion is
      below ``criterion_threshold`` the WeakCriterion flag is set.

    Errors from the components propagate with the failing stage attached.
    """
    sigma, obs = inp.prior, inp.observables
    with _stage("maxent"):
        data_state = solve_maxent(sigma, obs, inp.means)
    with _stage("relative_entropy"):
        s_data = relative_entropy(data_state.state, sigma)
    with _stage("evidence_scalars"):
        scalars = evidence_scalars(s_data, inp.r, inp.N, inp.n, prior_tol)

    nan_errors = np.full(len(obs), math.nan)
    if scalars.status is not EvidenceStatus.APPLICABLE:
        if scalars.status is EvidenceStatus.INSUFFICIENT_DATA:
            log.info("N=%d does not exceed N_min=%.1f; keeping the prior", inp.N, scalars.N_min)
        return EvidenceReport(
            scalars, scalars.status, data_state, sigma, np.zeros(len(obs)),
            math.nan, math.nan, nan_errors,
        )

    with _stage("posterior_estimate"):
        estimate, lam_e = posterior_estimate(sigma, data_state, scalars.alpha0, inp.N)
    with _stage("error_report"):
        err_m, err_u, stderr = error_report(scalars.alpha0, inp.N, estimate, obs)

    flags = ()
    if scalars.criterion < criterion_threshold:
        flags = (EvidenceStatus.WEAK_CRITERION,)
        log.info(
            "sharpness criterion %.3g below threshold %.3g", scalars.criterion, criterion_threshold
        )
    log.info(
        "alpha0 = %.6g; alpha0 / (sqrt(r/2) N_min) = %.3g (should be well below 1)",
        scalars.alpha0, scalars.alpha0_range_ratio,
    )
    return EvidenceReport(
        scalars, EvidenceStatus.APPLICABLE, data_state, estimate, lam_e,
        err_m, err_u, stderr, flags,
    )


def check_alpha_range(scalars: EvidenceScalars) -> bool:
    """``N_min < alpha0``; the upper end of the range is only reported."""
    if scalars.status is not EvidenceStatus.APPLICABLE:
        raise OutOfRange("alpha0 range only defined for an applicable report")
    return scalars.N_min < scalars.alpha0
