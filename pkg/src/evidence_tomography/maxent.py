"""Minimum relative entropy (generalized Maxent) states under linear constraints.

Given a full-rank reference state ``sigma`` and observables ``G_a`` with target
means ``g_a``, the minimizer of ``S(mu || sigma)`` subject to
``tr(mu G_a) = g_a`` has the canonical form

    mu ∝ exp[(ln sigma - <ln sigma>_sigma) - sum_a lambda_a G_a].

The multipliers are found by damped Newton iteration on the convex dual
``ln Z(lambda) + lambda . g`` whose Hessian is the Kubo-Mori covariance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .entropy import relative_entropy
from .exceptions import (
    ConsistencyError,
    DimensionMismatch,
    Infeasible,
    MaxIterations,
    RankDeficient,
)
from .operators import (
    DensityMatrix,
    HermitianOperator,
    expectation,
    matrix_log,
    normalized_exp,
)

log = logging.getLogger(__name__)

LAMBDA_BLOWUP = 1e4
MAX_HALVINGS = 30


class ObservableSet:
    """Ordered, labelled collection of Hermitian observables of equal dimension.

    ``r`` is the declared number of independent sample means; it defaults to
    the number of observables.
    """

    def __init__(
        self,
        observables: Sequence,
        labels: Sequence[str] | None = None,
        r: int | None = None,
    ):
        ops = [
            o if isinstance(o, HermitianOperator) else HermitianOperator(o)
            for o in observables
        ]
        if not ops:
            raise ValueError("an observable set needs at least one observable")
        if labels is None:
            labels = [o.label if o.label else f"G{k}" for k, o in enumerate(ops)]
        labels = [str(s) for s in labels]
        if len(labels) != len(ops):
            raise ValueError(f"{len(labels)} labels for {len(ops)} observables")
        if len(set(labels)) != len(labels):
            raise ValueError("observable labels must be unique")
        dims = {o.dim for o in ops}
        if len(dims) != 1:
            raise DimensionMismatch(f"observables have mixed dimensions {sorted(dims)}")
        self.operators = tuple(HermitianOperator(o.matrix, s) for o, s in zip(ops, labels))
        self.labels = tuple(labels)
        self.r = len(ops) if r is None else int(r)
        if self.r < 1:
            raise ValueError("r must be positive")
        m = np.stack([o.matrix for o in self.operators])
        m.setflags(write=False)
        self.matrices = m

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    def __len__(self):
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)

    def __getitem__(self, key):
        if isinstance(key, str):
            return self.operators[self.labels.index(key)]
        return self.operators[key]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def expectations(self, rho: DensityMatrix) -> np.ndarray:
        """Vector of ``tr(rho G_a)``."""
        if rho.dim != self.dim:
            raise DimensionMismatch(f"state has dimension {rho.dim}, observables {self.dim}")
        vals = np.einsum("aij,ji->a", self.matrices, rho.matrix)
        if np.max(np.abs(vals.imag)) > 1e-9:
            raise ConsistencyError("expectation values have a large imaginary part")
        return vals.real

    def combination(self, coeffs) -> np.ndarray:
        """``sum_a coeffs_a G_a`` as a dense matrix."""
        return np.tensordot(np.asarray(coeffs, dtype=float), self.matrices, axes=1)

    @cached_property
    def spectral_bounds(self) -> np.ndarray:
        """``(len, 2)`` array of smallest and largest eigenvalue per observable."""
        w = np.linalg.eigvalsh(self.matrices)
        return np.stack([w[:, 0], w[:, -1]], axis=1)

    def __repr__(self):
        return f"ObservableSet(len={len(self)}, r={self.r}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class CanonicalState:
    """``state ∝ exp[(ln ref - <ln ref>_ref) - sum lagrange_a G_a]``.

    ``log_partition`` is ``ln tr exp[...]`` of the bracketed exponent.
    """

    state: DensityMatrix
    lagrange: np.ndarray
    log_partition: float
    reference: DensityMatrix
    observables: ObservableSet
    iterations: int = 0

    @property
    def expectations(self) -> np.ndarray:
        return self.observables.expectations(self.state)


def _reference_exponent(sigma: DensityMatrix) -> np.ndarray:
    ln_sigma = matrix_log(sigma).matrix
    shift = expectation(sigma, ln_sigma)
    return ln_sigma - shift * np.eye(sigma.dim)


def _canonical(base, sigma, observables, lam, iterations=0) -> CanonicalState:
    lam = np.array(lam, dtype=float)
    lam.setflags(write=False)
    state, log_z = normalized_exp(HermitianOperator(base - observables.combination(lam)))
    return CanonicalState(state, lam, log_z, sigma, observables, iterations)


def canonical_state(sigma: DensityMatrix, observables: ObservableSet, lagrange) -> CanonicalState:
    """Canonical state relative to ``sigma`` for given Lagrange parameters."""
    lam = np.asarray(lagrange, dtype=float)
    if lam.shape != (len(observables),):
        raise DimensionMismatch(f"{lam.shape[0]} multipliers for {len(observables)} observables")
    if not np.all(np.isfinite(lam)):
        raise ValueError("Lagrange parameters must be finite")
    if sigma.dim != observables.dim:
        raise DimensionMismatch(f"reference has dimension {sigma.dim}, observables {observables.dim}")
    return _canonical(_reference_exponent(sigma), sigma, observables, lam)


def _divided_differences(log_p: np.ndarray) -> np.ndarray:
    # F_kl = (p_k - p_l) / (ln p_k - ln p_l), with F_kk = p_k.
    hi = np.maximum.outer(log_p, log_p)
    lo = np.minimum.outer(log_p, log_p)
    delta = hi - lo
    safe = np.where(delta > 0, delta, 1.0)
    ratio = np.where(delta > 0, np.expm1(delta) / safe, 1.0)
    return np.exp(lo) * ratio


def kubo_mori_covariance(mu, observables: ObservableSet) -> np.ndarray:
    """Hessian of the log-partition with respect to the Lagrange parameters.

    Evaluated in the eigenbasis of ``mu`` with divided differences of the
    exponential. Accepts a :class:`CanonicalState` or a bare density matrix.
    """
    rho = mu.state if isinstance(mu, CanonicalState) else mu
    p, v = rho.spectrum
    if p[0] <= 0:
        raise RankDeficient("Kubo-Mori covariance needs a full-rank state")
    gt = np.einsum("ki,akl,lj->aij", v.conj(), observables.matrices, v, optimize=True)
    f = _divided_differences(np.log(p))
    cov = np.einsum("akl,bkl,kl->ab", gt, gt.conj(), f, optimize=True).real
    means = np.einsum("akk,k->a", gt, p).real
    cov = cov - np.outer(means, means)
    return 0.5 * (cov + cov.T)


def _feasibility_screen(observables, g):
    bounds = observables.spectral_bounds
    bad = [
        f"{label}: {float(val)!r} not inside ({lo:.6g}, {hi:.6g})"
        for label, val, (lo, hi) in zip(observables.labels, g, bounds)
        if not lo < val < hi
    ]
    if bad:
        raise Infeasible("target mean outside the spectral interval; " + "; ".join(bad))


def _newton_step(hess, res):
    try:
        return np.linalg.solve(hess, res)
    except np.linalg.LinAlgError:
        return np.linalg.lstsq(hess, res, rcond=None)[0]


def solve_maxent(
    sigma: DensityMatrix,
    observables: ObservableSet,
    g,
    tol: float = 1e-9,
    max_iter: int = 200,
    callback: Callable | None = None,
) -> CanonicalState:
    """Find the state closest to ``sigma`` reproducing the means ``g``.

    Newton iteration on the dual starting at ``lambda = 0``; a step is halved
    (up to 30 times) until the Euclidean norm of the constraint residual
    decreases. Once the residual is below ``tol`` one extra full step is
    taken if it lowers the residual further.

    Args:
        sigma: full-rank reference state.
        observables: constrained observables.
        g: target expectation values, aligned with ``observables``.
        tol: required max-norm constraint residual.
        max_iter: Newton iteration limit.
        callback: called as ``callback(iteration, lagrange, residual, hessian)``
            at every iterate.

    Raises:
        Infeasible: a target lies outside its observable's spectral interval,
            the multipliers blow up beyond 1e4, or the residual stalls.
        MaxIterations: no convergence within ``max_iter`` steps.
        RankDeficient: ``sigma`` is not full rank.
    """
    g = np.asarray(g, dtype=float)
    if g.shape != (len(observables),):
        raise DimensionMismatch(f"{g.size} targets for {len(observables)} observables")
    if sigma.dim != observables.dim:
        raise DimensionMismatch(f"reference has dimension {sigma.dim}, observables {observables.dim}")
    _feasibility_screen(observables, g)
    base = _reference_exponent(sigma)

    mu = _canonical(base, sigma, observables, np.zeros(len(observables)))
    res = mu.expectations - g
    norm = np.linalg.norm(res)
    for it in range(max_iter + 1):
        hess = kubo_mori_covariance(mu, observables)
        if callback is not None:
            callback(it, mu.lagrange, res, hess)
        if np.max(np.abs(res)) <= tol:
            # One more full Newton step: the residual bound alone leaves lambda
            # off by up to tol / Var(G), quadratic convergence removes that.
            polished = _canonical(base, sigma, observables, mu.lagrange + _newton_step(hess, res), it)
            log.debug("maxent converged in %d iterations, residual %.3e", it, np.max(np.abs(res)))
            if np.linalg.norm(polished.expectations - g) < norm:
                return polished
            return _canonical(base, sigma, observables, mu.lagrange, it)
        if it == max_iter:
            break
        step = _newton_step(hess, res)
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = _canonical(base, sigma, observables, mu.lagrange + t * step)
            trial_res = trial.expectations - g
            trial_norm = np.linalg.norm(trial_res)
            if trial_norm < norm:
                break
            t *= 0.5
        else:
            raise Infeasible(
                f"constraint residual stalled at {norm:.3e} after {it} iterations"
            )
        mu, res, norm = trial, trial_res, trial_norm
        if np.linalg.norm(mu.lagrange) > LAMBDA_BLOWUP:
            raise Infeasible(
                f"Lagrange parameters diverge (norm {np.linalg.norm(mu.lagrange):.3e}); "
                "no state attains the target means"
            )
    raise MaxIterations(f"no convergence in {max_iter} iterations (residual {norm:.3e})")


def pythagorean_defect(rho: DensityMatrix, sigma: DensityMatrix, observables: ObservableSet) -> float:
    """``S(rho||sigma) - S(rho||mu) - S(mu||sigma)`` with ``mu`` the canonical
    state reproducing the means of ``rho``.

    Zero up to rounding for any ``sigma``: ``ln mu - ln sigma`` is a constant
    plus a combination of the ``G_a``, whose means ``rho`` and ``mu`` share.
    Kept as a numerical diagnostic.
    """
    mu = solve_maxent(sigma, observables, observables.expectations(rho)).state
    return relative_entropy(rho, sigma) - relative_entropy(rho, mu) - relative_entropy(mu, sigma)
