"""Spin and pair-correlation observables for M-qubit systems.

The observable set consists of the ``3M`` single-qubit spin components
``S_i^a`` followed, for every unordered pair ``i < j``, by the six symmetrized
products ``(S_i^a S_j^b + S_i^b S_j^a) / 2`` with ``a <= b``. That gives
``3M + 6 M(M-1)/2 = 3 M**2`` observables. Only the symmetric part of each
pair-correlation matrix is therefore measurable in this set.

Correlation targets ``c_ij^{ab}`` are nonlinear in the means, so they are
converted to linear product targets ``c_ij^{ab} + s_i^a s_j^b`` before being
handed to the solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exceptions import OutOfRange
from .maxent import ObservableSet
from .operators import DensityMatrix, HermitianOperator, spin_component

AXIS_NAMES = "xyz"
AXIS_PAIRS = [(a, b) for a in range(3) for b in range(a, 3)]


def _check_qubits(num_qubits, upper=8):
    if not 1 <= num_qubits <= upper:
        raise OutOfRange(f"num_qubits must be in 1..{upper}, got {num_qubits}")


def pairs(num_qubits: int):
    return list(combinations(range(num_qubits), 2))


def spin_label(i: int, a: int) -> str:
    """Label of ``S_i^a`` with ``a`` counted from 0."""
    return f"S{i}{AXIS_NAMES[a]}"


def pair_label(i: int, j: int, a: int, b: int) -> str:
    return f"C{i}.{j}{AXIS_NAMES[a]}{AXIS_NAMES[b]}"


def build_observable_set(num_qubits: int) -> ObservableSet:
    """The ``3 M**2`` spin and symmetrized pair observables for ``M`` qubits."""
    _check_qubits(num_qubits)
    spins = [
        [spin_component(i, a + 1, num_qubits).matrix for a in range(3)]
        for i in range(num_qubits)
    ]
    ops, labels = [], []
    for i in range(num_qubits):
        for a in range(3):
            ops.append(HermitianOperator(spins[i][a]))
            labels.append(spin_label(i, a))
    for i, j in pairs(num_qubits):
        for a, b in AXIS_PAIRS:
            prod = 0.5 * (spins[i][a] @ spins[j][b] + spins[i][b] @ spins[j][a])
            ops.append(HermitianOperator(prod))
            labels.append(pair_label(i, j, a, b))
    return ObservableSet(ops, labels)


@dataclass
class CorrelationSpec:
    """Spin means and pair-correlation matrices of an M-qubit state.

    ``spin_means`` has shape ``(M, 3)``; ``correlations`` maps each pair
    ``(i, j)`` with ``i < j`` to a symmetric ``3 x 3`` matrix.
    """

    num_qubits: int
    spin_means: np.ndarray
    correlations: dict = field(default_factory=dict)

    def __post_init__(self):
        self.spin_means = np.asarray(self.spin_means, dtype=float).reshape(self.num_qubits, 3)
        fixed = {}
        for key in pairs(self.num_qubits):
            c = np.asarray(self.correlations.get(key, np.zeros((3, 3))), dtype=float)
            if np.max(np.abs(c - c.T)) > 1e-12:
                raise ValueError(
                    f"correlation matrix for pair {key} is not symmetric; "
                    "only the symmetric part is measurable"
                )
            fixed[key] = c
        self.correlations = fixed

    @classmethod
    def isotropic(cls, num_qubits: int, c: float) -> CorrelationSpec:
        return cls(
            num_qubits,
            np.zeros((num_qubits, 3)),
            {key: c * np.eye(3) for key in pairs(num_qubits)},
        )

    def mean_diagonal_correlation(self) -> float:
        """Average of ``c_ij^{aa}`` over all pairs and axes; the isotropic ``c``."""
        if not self.correlations:
            return 0.0
        return float(np.mean([np.trace(c) / 3 for c in self.correlations.values()]))


def correlation_bounds(num_qubits: int) -> tuple[float, float]:
    """Admissible range of the isotropic correlation strength ``c``."""
    lower = -1.0 / (4 * (num_qubits - 1)) if num_qubits > 1 else -np.inf
    return lower, 1.0 / 12


def targets_from_correlations(spec: CorrelationSpec) -> np.ndarray:
    """Linear targets aligned with :func:`build_observable_set`."""
    s = spec.spin_means
    out = list(s.reshape(-1))
    for i, j in pairs(spec.num_qubits):
        c = spec.correlations[(i, j)]
        for a, b in AXIS_PAIRS:
            # symmetrize the product of means to match the observable
            out.append(c[a, b] + 0.5 * (s[i, a] * s[j, b] + s[i, b] * s[j, a]))
    return np.array(out)


def isotropic_targets(num_qubits: int, c: float) -> np.ndarray:
    """Targets for zero spin means and ``c_ij = c * identity`` on every pair.

    Raises:
        OutOfRange: ``c`` outside ``[-1/(4(M-1)), 1/12]``.
    """
    _check_qubits(num_qubits)
    lo, hi = correlation_bounds(num_qubits)
    if not lo <= c <= hi:
        raise OutOfRange(f"correlation strength {c} outside [{lo:.6g}, {hi:.6g}]")
    return targets_from_correlations(CorrelationSpec.isotropic(num_qubits, c))


def correlations_from_state(rho: DensityMatrix, num_qubits: int) -> CorrelationSpec:
    """Read spin means and symmetrized correlations off a state."""
    _check_qubits(num_qubits)
    if rho.dim != 2**num_qubits:
        raise OutOfRange(f"state of dimension {rho.dim} is not a {num_qubits}-qubit state")
    g = build_observable_set(num_qubits).expectations(rho)
    return correlations_from_means(g, num_qubits)


def correlations_from_means(g, num_qubits: int) -> CorrelationSpec:
    """Inverse of :func:`targets_from_correlations`."""
    g = np.asarray(g, dtype=float)
    s = g[: 3 * num_qubits].reshape(num_qubits, 3)
    corr = {}
    k = 3 * num_qubits
    for i, j in pairs(num_qubits):
        c = np.zeros((3, 3))
        for a, b in AXIS_PAIRS:
            c[a, b] = c[b, a] = g[k] - 0.5 * (s[i, a] * s[j, b] + s[i, b] * s[j, a])
            k += 1
        corr[(i, j)] = c
    return CorrelationSpec(num_qubits, s, corr)


def j_squared_from_means(g, num_qubits: int) -> float:
    """``<J^2> = 3M/4 + 2 sum_{i<j} sum_a <S_i^a S_j^a>`` from the set's means."""
    g = np.asarray(g, dtype=float)
    diag = [k for k, (a, b) in enumerate(AXIS_PAIRS) if a == b]
    body = g[3 * num_qubits:].reshape(-1, 6)[:, diag]
    return 0.75 * num_qubits + 2.0 * float(body.sum())
