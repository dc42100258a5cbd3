"""Evidence-procedure (ML-II) quantum state estimation from incomplete data."""

from .entropy import log_interpolate, relative_entropy, von_neumann_entropy
from .evidence import (
    EvidenceInput,
    EvidenceReport,
    EvidenceScalars,
    EvidenceStatus,
    error_report,
    evidence_scalars,
    posterior_estimate,
    run_evidence,
    stein_log_likelihood,
)
from .exceptions import (
    ConsistencyError,
    Infeasible,
    MaxIterations,
    RankDeficient,
    SupportViolation,
    TomographyError,
)
from .maxent import CanonicalState, ObservableSet, canonical_state, kubo_mori_covariance, solve_maxent
from .operators import (
    DensityMatrix,
    HermitianOperator,
    expectation,
    matrix_log,
    normalized_exp,
    spectral_decompose,
    spin_component,
    total_J_squared,
)
from .qubits import build_observable_set, correlations_from_state, isotropic_targets
from .simulate import simulate_dataset

__version__ = "0.1.0"
