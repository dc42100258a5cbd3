"""Synthetic sample means with finite-sample noise only.

Random numbers come from a counter-based construction so every shot is a
pure function of ``(seed, stream, shot)``:

    counter = (stream << 32) | shot                      (both < 2**32)
    z       = seed + 0x9E3779B97F4A7C15 * (counter + 1)  (mod 2**64)
    z       = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9       (mod 2**64)
    z       = (z ^ (z >> 27)) * 0x94D049BB133111EB       (mod 2**64)
    z       =  z ^ (z >> 31)
    u       = (z >> 11) * 2**-53                         in [0, 1)

(the SplitMix64 output function). Observable ``k`` of a dataset uses stream
``k``. A shot with uniform ``u`` yields the outcome whose cumulative
probability interval contains ``u``, with outcomes ordered by ascending
eigenvalue and degenerate eigenvalues merged.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch
from .maxent import ObservableSet
from .operators import DensityMatrix, spectral_decompose

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
MIX1 = np.uint64(0xBF58476D1CE4E5B9)
MIX2 = np.uint64(0x94D049BB133111EB)
CHUNK = 1 << 20
MAX_SHOTS = 1 << 32
DEGENERACY_TOL = 1e-9
PROB_FLOOR = 1e-14


def counter_uniforms(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Uniforms for shots ``start .. start + count - 1`` of one stream."""
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if not 0 <= stream < 2**32:
        raise ValueError("stream index must fit in 32 bits")
    if start < 0 or start + count > MAX_SHOTS:
        raise ValueError("shot index must fit in 32 bits")
    shots = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        counter = (np.uint64(stream) << np.uint64(32)) | shots
        z = np.uint64(seed) + GOLDEN * (counter + np.uint64(1))
        z = (z ^ (z >> np.uint64(30))) * MIX1
        z = (z ^ (z >> np.uint64(27))) * MIX2
        z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class ShotStream:
    """Seeded source of shots for one observable."""

    seed: int
    stream: int = 0

    def uniforms(self, start: int, count: int) -> np.ndarray:
        return counter_uniforms(self.seed, self.stream, start, count)


def outcome_distribution(rho: DensityMatrix, g) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues of ``g`` (ascending) and their Born probabilities
    in ``rho``. Probabilities below 1e-14 are set to zero."""
    w, v = spectral_decompose(g)
    if v.shape[0] != rho.dim:
        raise DimensionMismatch(f"state has dimension {rho.dim}, observable {v.shape[0]}")
    pops = np.einsum("ki,kl,li->i", v.conj(), rho.matrix, v).real
    values, probs = [], []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[start] > DEGENERACY_TOL * max(1.0, abs(w[start])):
            values.append(float(np.mean(w[start:k])))
            probs.append(float(pops[start:k].sum()))
            start = k
    p = np.clip(np.array(probs), 0.0, None)
    p[p < PROB_FLOOR] = 0.0
    return np.array(values), p / p.sum()


def sample_mean(rho: DensityMatrix, g, N: int, stream: ShotStream) -> float:
    """Mean of ``N`` simulated projective measurements of ``g`` on ``rho``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    values, probs = outcome_distribution(rho, g)
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    counts = np.zeros(len(values), dtype=np.int64)
    for start in range(0, N, CHUNK):
        u = stream.uniforms(start, min(CHUNK, N - start))
        idx = np.searchsorted(cdf, u, side="right")
        counts += np.bincount(idx, minlength=len(values))
    return float(np.sum((counts / N) * values))


@dataclass(frozen=True, eq=False)
class MeasurementDataset:
    labels: tuple
    means: np.ndarray
    N: int
    seed: int | None = None
    truth_label: str | None = None


def simulate_dataset(
    rho: DensityMatrix,
    observables: ObservableSet,
    N: int,
    seed: int,
    truth_label: str | None = None,
) -> MeasurementDataset:
    """One sample mean per observable, each from ``N`` fresh shots on stream
    equal to the observable's index."""
    means = np.array(
        [sample_mean(rho, g, N, ShotStream(seed, k)) for k, g in enumerate(observables)]
    )
    means.setflags(write=False)
    return MeasurementDataset(observables.labels, means, int(N), int(seed), truth_label)
