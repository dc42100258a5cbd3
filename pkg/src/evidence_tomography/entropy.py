"""Quantum relative entropy, von Neumann entropy and log-space interpolation.

All values are in nats.
"""

from __future__ import annotations

import numpy as np

from .exceptions import ConsistencyError, DimensionMismatch, OutOfRange, SupportViolation
from .operators import RANK_TOL, DensityMatrix, HermitianOperator, matrix_log, normalized_exp

#: Negative relative entropies down to this value are treated as round-off.
NEGATIVE_CLAMP = -1e-10


def _plogp(p):
    p = np.clip(p, 0.0, None)
    safe = np.where(p > 0, p, 1.0)
    return np.where(p > 0, p * np.log(safe), 0.0)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """``-tr(rho ln rho)``, clipped to ``[0, ln d]``."""
    s = -float(np.sum(_plogp(rho.spectrum.eigenvalues)))
    return min(max(s, 0.0), float(np.log(rho.dim)))


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """``S(rho || sigma) = tr(rho ln rho - rho ln sigma)``.

    ``sigma`` may be rank deficient as long as ``rho`` has no weight (above
    ``RANK_TOL``) outside its support.

    Raises:
        SupportViolation: the divergence is infinite.
        ConsistencyError: the result is below ``NEGATIVE_CLAMP``.
    """
    if rho.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {rho.dim} and {sigma.dim} differ")
    w, v = sigma.spectrum
    support = w >= RANK_TOL * w[-1]
    # Diagonal of rho in sigma's eigenbasis.
    weights = np.einsum("ki,kl,li->i", v.conj(), rho.matrix, v).real
    if not support.all():
        outside = weights[~support].sum()
        if outside > RANK_TOL:
            raise SupportViolation(
                f"rho has weight {outside:.3e} outside the support of sigma"
            )
    cross = float(np.sum(weights[support] * np.log(w[support])))
    s = float(np.sum(_plogp(rho.spectrum.eigenvalues))) - cross
    if s < NEGATIVE_CLAMP:
        raise ConsistencyError(f"relative entropy came out negative ({s:.3e})")
    return max(s, 0.0)


def log_interpolate(
    mu: DensityMatrix, sigma: DensityMatrix, t: float
) -> tuple[DensityMatrix, float]:
    """Geometric interpolation ``exp[(1 - t) ln mu + t ln sigma] / Z``.

    Returns the interpolated state and the offset ``C = -ln Z`` for which
    ``(1-t) S(rho||mu) + t S(rho||sigma) = S(rho||interp) + C`` holds for
    every ``rho``.
    """
    if not 0.0 <= t <= 1.0:
        raise OutOfRange(f"interpolation weight must lie in [0, 1], got {t}")
    if mu.dim != sigma.dim:
        raise DimensionMismatch(f"dimensions {mu.dim} and {sigma.dim} differ")
    k = (1.0 - t) * matrix_log(mu).matrix + t * matrix_log(sigma).matrix
    state, log_z = normalized_exp(HermitianOperator(k))
    return state, -log_z
