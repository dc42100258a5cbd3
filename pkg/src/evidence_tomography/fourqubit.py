"""Closed-form model of four qubits biased by their total angular momentum.

For four spin-1/2 particles ``J^2`` has eigenvalues ``j(j+1)`` for
``j = 0, 1, 2`` with Clebsch-Gordan multiplicities 2, 3, 1, hence

    Z(lam)     = 2 + 9 exp(-2 lam) + 5 exp(-6 lam)
    <J^2>(lam) = 6 (3x + 5x^3) / (2 + 9x + 5x^3),   x = exp(-2 lam)

and an isotropic correlation strength ``c`` fixes ``<J^2> = 36 c + 3``.
These scalar formulas serve as an oracle for the dense 16 x 16 pipeline,
which :func:`numeric_example` runs on the full 48-observable problem.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .evidence import EvidenceInput, run_evidence
from .exceptions import OutOfRange
from .maxent import solve_maxent
from .operators import DensityMatrix, expectation, normalized_exp, total_J_squared
from .qubits import AXIS_PAIRS, build_observable_set, correlations_from_state, isotropic_targets

NUM_QUBITS = 4
R_FULL = 3 * NUM_QUBITS**2
C_BOUND = 1.0 / 12


def partition_function(lam: float) -> float:
    return 2.0 + 9.0 * math.exp(-2.0 * lam) + 5.0 * math.exp(-6.0 * lam)


def j2_expectation(lam: float) -> float:
    x = math.exp(-2.0 * lam)
    return 6.0 * (3.0 * x + 5.0 * x**3) / (2.0 + 9.0 * x + 5.0 * x**3)


def j2_from_c(c: float) -> float:
    return 36.0 * c + 3.0


def c_of_lambda(lam: float) -> float:
    return (j2_expectation(lam) - 3.0) / 36.0


def _cubic_root(T: float) -> float:
    """Unique positive root of ``(30 - 5T) x^3 + (18 - 9T) x - 2T`` for 0 < T < 6."""
    a3, a1, a0 = 30.0 - 5.0 * T, 18.0 - 9.0 * T, -2.0 * T

    def f(x):
        return (a3 * x * x + a1) * x + a0, 3.0 * a3 * x * x + a1

    lo, hi = 0.0, 1.0
    while f(hi)[0] < 0:
        lo, hi = hi, 2.0 * hi
    x = 0.5 * (lo + hi)
    for _ in range(200):
        fx, dfx = f(x)
        scale = max(1.0, abs(a3 * x**3), abs(a1 * x), abs(a0))
        if abs(fx) <= 1e-12 * scale:
            break
        if fx < 0:
            lo = x
        else:
            hi = x
        newton = x - fx / dfx if dfx != 0 else math.nan
        # Bisect whenever Newton would leave the bracket.
        x = newton if lo < newton < hi else 0.5 * (lo + hi)
        if hi - lo <= 4e-16 * hi:
            break
    return x


def lambda_of_c(c: float) -> float:
    """Lagrange parameter of the canonical ``exp(-lam J^2)`` state with
    isotropic correlation strength ``c``.

    At the bounds ``c = -1/12`` and ``c = 1/12`` the state is the ``j = 0`` or
    ``j = 2`` projector and the result is ``+inf`` or ``-inf``.
    """
    if not -C_BOUND <= c <= C_BOUND:
        raise OutOfRange(f"c = {c} outside [-1/12, 1/12]")
    T = j2_from_c(c)
    if T <= 0.0:
        return math.inf
    if T >= 6.0:
        return -math.inf
    return -0.5 * math.log(_cubic_root(T))


def analytic_relative_entropy(lam_from: float, lam_to: float) -> float:
    """``S(state(lam_from) || state(lam_to))`` within the ``exp(-lam J^2)`` family."""
    return (
        (lam_to - lam_from) * j2_expectation(lam_from)
        + math.log(partition_function(lam_to))
        - math.log(partition_function(lam_from))
    )


@dataclass(frozen=True)
class OracleReport:
    """Scalar summary of the worked four-qubit example.

    ``status`` is one of ``Applicable``, ``PriorConfirmed`` or
    ``InsufficientData``. When the prior is kept, ``alpha0`` is ``inf``
    (confirmed) or ``nan`` (insufficient data) and ``lambda_e`` equals
    ``lambda_sigma``.
    """

    lambda_sigma: float
    lambda_data: float
    Z_sigma: float
    Z_data: float
    S_data: float
    N_min: float
    alpha0: float
    beta: float
    lambda_e: float
    x_e: float
    J2_e: float
    c_e: float
    criterion: float
    status: str

    def as_dict(self):
        return asdict(self)


def _report(lam_s, lam_d, z_s, z_d, s, N, r, lam_e_of_beta, j2_of, prior_tol):
    if s <= prior_tol * r:
        n_min, alpha0, beta, status = math.inf, math.inf, 1.0, "PriorConfirmed"
    else:
        n_min = r / (2.0 * s)
        beta = n_min / N
        if N <= n_min:
            alpha0, status = math.nan, "InsufficientData"
        else:
            alpha0, status = n_min / (1.0 - beta), "Applicable"
    criterion = 0.0 if math.isinf(n_min) else r / 2.0 * (1.0 - beta) ** 2
    lam_e = lam_e_of_beta(beta if status == "Applicable" else 1.0)
    j2_e = j2_of(lam_e)
    return OracleReport(
        lam_s, lam_d, z_s, z_d, s, n_min, alpha0, beta, lam_e,
        math.exp(-2.0 * lam_e), j2_e, (j2_e - 3.0) / 36.0, criterion, status,
    )


def worked_example(
    c_prior: float = -0.02,
    c_data: float = -0.025,
    N: int = 10_000,
    r: int = R_FULL,
    prior_tol: float = 1e-12,
) -> OracleReport:
    """The worked example from closed-form scalars only."""
    lam_s = lambda_of_c(c_prior)
    lam_d = lambda_of_c(c_data)
    s = analytic_relative_entropy(lam_d, lam_s)
    return _report(
        lam_s, lam_d, partition_function(lam_s), partition_function(lam_d), s, N, r,
        lambda beta: beta * lam_s + (1.0 - beta) * lam_d,
        j2_expectation, prior_tol,
    )


def j2_family_parameter(lagrange, offset: float = 0.0) -> float:
    """Collapse 48 multipliers onto the ``exp(-lam J^2)`` family.

    ``J^2 = 3 + 2 sum_{i<j,a} S_i^a S_j^a``, so a shift of ``lam`` puts
    ``2 * lam`` on every diagonal pair observable.
    """
    lagrange = np.asarray(lagrange, dtype=float)
    diag = [k for k, (a, b) in enumerate(AXIS_PAIRS) if a == b]
    body = lagrange[3 * NUM_QUBITS:].reshape(-1, 6)[:, diag]
    return offset + 0.5 * float(body.mean())


def prior_state(c_prior: float):
    """The isotropic prior as a Maxent state relative to the maximally mixed one."""
    obs = build_observable_set(NUM_QUBITS)
    return solve_maxent(
        DensityMatrix.maximally_mixed(2**NUM_QUBITS), obs, isotropic_targets(NUM_QUBITS, c_prior)
    )


def numeric_example(
    c_prior: float = -0.02,
    c_data: float = -0.025,
    N: int = 10_000,
    criterion_threshold: float = 10.0,
    prior_tol: float = 1e-12,
):
    """Run the dense pipeline on the 48-observable problem.

    Returns the scalar summary in :class:`OracleReport` form together with the
    full :class:`~evidence_tomography.evidence.EvidenceReport`.
    """
    prior = prior_state(c_prior)
    obs = prior.observables
    report = run_evidence(
        EvidenceInput(prior.state, obs, isotropic_targets(NUM_QUBITS, c_data), N),
        criterion_threshold=criterion_threshold,
        prior_tol=prior_tol,
    )
    j2 = total_J_squared(NUM_QUBITS)
    lam_s = j2_family_parameter(prior.lagrange)
    lam_d = j2_family_parameter(report.data_state.lagrange, lam_s)
    lam_e = j2_family_parameter(report.lambda_e, lam_s)
    sc = report.scalars
    summary = OracleReport(
        lambda_sigma=lam_s,
        lambda_data=lam_d,
        Z_sigma=math.exp(normalized_exp(-lam_s * j2)[1]),
        Z_data=math.exp(normalized_exp(-lam_d * j2)[1]),
        S_data=sc.S_data,
        N_min=sc.N_min,
        alpha0=sc.alpha0,
        beta=sc.beta,
        lambda_e=lam_e,
        x_e=math.exp(-2.0 * lam_e),
        J2_e=expectation(report.estimate, j2),
        c_e=correlations_from_state(report.estimate, NUM_QUBITS).mean_diagonal_correlation(),
        criterion=sc.criterion,
        status=report.status.value,
    )
    return summary, report


NUMERIC_FIELDS = (
    "lambda_sigma", "lambda_data", "Z_sigma", "Z_data", "S_data", "N_min",
    "alpha0", "beta", "lambda_e", "x_e", "J2_e", "c_e", "criterion",
)


def relative_deviation(a: float, b: float, floor: float = 1e-9) -> float:
    """``|a - b| / max(|b|, floor)``; equal non-finite values count as zero."""
    if math.isnan(a) and math.isnan(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return 0.0 if a == b else math.inf
    return abs(a - b) / max(abs(b), floor)


def max_relative_deviation(numeric: OracleReport, oracle: OracleReport) -> float:
    return max(
        relative_deviation(getattr(numeric, f), getattr(oracle, f)) for f in NUMERIC_FIELDS
    )
