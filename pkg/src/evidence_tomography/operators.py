"""Dense Hermitian operators, density matrices and their spectral calculus.

Everything here works on plain complex ``numpy`` arrays of shape ``(d, d)``.
Operators are symmetrized on construction and their arrays are marked
read-only, so instances can be shared freely.
"""

from __future__ import annotations

from functools import cached_property, reduce
from typing import NamedTuple

import numpy as np

from .exceptions import (
    ConsistencyError,
    DimensionMismatch,
    EigenNonConvergence,
    NotADensityMatrix,
    OutOfRange,
    RankDeficient,
)

#: Eigenvalues below ``RANK_TOL * max eigenvalue`` count as zero.
RANK_TOL = 1e-12
#: Largest supported Hilbert-space dimension (dense storage only).
MAX_DIM = 2**12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = "XYZ"


def _as_array(x):
    if isinstance(x, (HermitianOperator, DensityMatrix)):
        return x.matrix
    return np.asarray(x)


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def _readonly(a):
    a = np.asarray(a)
    if a.flags.writeable:
        a = a.copy()
        a.setflags(write=False)
    return a


class HermitianOperator:
    """A dense ``d x d`` Hermitian matrix with an optional label.

    The input is replaced by its Hermitian part ``(A + A^dagger) / 2``.
    """

    __slots__ = ("matrix", "label")

    def __init__(self, matrix, label: str | None = None):
        m = np.asarray(_as_array(matrix), dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"operator must be square, got shape {m.shape}")
        if m.shape[0] > MAX_DIM:
            raise OutOfRange(f"dimension {m.shape[0]} exceeds the dense limit {MAX_DIM}")
        if not np.all(np.isfinite(m)):
            raise ValueError("operator has non-finite entries")
        self.matrix = _frozen(0.5 * (m + m.conj().T))
        self.label = label

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def num_qubits(self) -> int | None:
        d = self.dim
        return d.bit_length() - 1 if d & (d - 1) == 0 else None

    def __add__(self, other):
        return HermitianOperator(self.matrix + _as_array(other))

    __radd__ = __add__

    def __sub__(self, other):
        return HermitianOperator(self.matrix - _as_array(other))

    def __neg__(self):
        return HermitianOperator(-self.matrix, self.label)

    def __mul__(self, scalar):
        if np.iscomplexobj(scalar) and np.imag(scalar) != 0:
            raise TypeError("Hermitian operators only scale by real numbers")
        return HermitianOperator(float(np.real(scalar)) * self.matrix)

    __rmul__ = __mul__

    def __repr__(self):
        label = f", label={self.label!r}" if self.label else ""
        return f"HermitianOperator(dim={self.dim}{label})"


class SpectralDecomposition(NamedTuple):
    """Ascending real eigenvalues and the matching unitary eigenvector matrix
    (eigenvectors are columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.apply(lambda x: x)

    def apply(self, func) -> np.ndarray:
        """Return ``V f(diag(w)) V^dagger`` for a scalar function ``f``."""
        v = self.eigenvectors
        return (v * func(self.eigenvalues)) @ v.conj().T


def spectral_decompose(h) -> SpectralDecomposition:
    """Eigendecomposition with a deterministic phase convention.

    Eigenvalues come back in ascending order. Each eigenvector is rotated so
    that its first component of magnitude above 1e-10 is real and positive,
    which makes the output a function of the input bits alone.
    """
    m = _as_array(h)
    if not np.all(np.isfinite(m)):
        raise ValueError("cannot decompose a matrix with non-finite entries")
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        # LAPACK does not expose its sweep count; pass its diagnostic through.
        raise EigenNonConvergence(f"eigensolver failed to converge: {exc}") from exc
    lead = np.argmax(np.abs(v) > 1e-10, axis=0)
    pivots = v[lead, np.arange(v.shape[1])]
    v = v * (pivots.conj() / np.abs(pivots))
    w.setflags(write=False)
    v.setflags(write=False)
    return SpectralDecomposition(w, v)


class DensityMatrix:
    """Unit-trace positive semidefinite operator.

    Construction validates the trace (within ``1e-12``) and the spectrum
    (no eigenvalue below ``-1e-12``); the decomposition computed for the check
    is cached on :attr:`spectrum`.
    """

    TRACE_TOL = 1e-12
    NEG_TOL = 1e-12

    def __init__(self, matrix, label: str | None = None):
        self.op = HermitianOperator(matrix, label)
        tr = np.trace(self.op.matrix).real
        if abs(tr - 1.0) > self.TRACE_TOL:
            raise NotADensityMatrix(f"trace is {tr!r}, expected 1")
        if self.spectrum.eigenvalues[0] < -self.NEG_TOL:
            raise NotADensityMatrix(
                f"negative eigenvalue {self.spectrum.eigenvalues[0]:.3e}"
            )

    @classmethod
    def _from_spectrum(cls, eigenvalues, eigenvectors, label=None) -> DensityMatrix:
        # Trusted path: ascending nonnegative eigenvalues, unitary eigenvectors.
        self = cls.__new__(cls)
        spec = SpectralDecomposition(
            _readonly(np.asarray(eigenvalues, dtype=float)), _readonly(eigenvectors)
        )
        self.op = HermitianOperator(spec.reconstruct(), label)
        self.__dict__["spectrum"] = spec
        return self

    @classmethod
    def maximally_mixed(cls, dim: int) -> DensityMatrix:
        return cls(np.eye(dim) / dim, label="maximally mixed")

    @classmethod
    def pure(cls, vector, label=None) -> DensityMatrix:
        psi = np.asarray(vector, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), label)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dim(self) -> int:
        return self.op.dim

    @property
    def label(self):
        return self.op.label

    @cached_property
    def spectrum(self) -> SpectralDecomposition:
        return spectral_decompose(self.op)

    def is_full_rank(self, tol: float = RANK_TOL) -> bool:
        w = self.spectrum.eigenvalues
        return bool(w[0] >= tol * w[-1])

    def __repr__(self):
        return f"DensityMatrix(dim={self.dim})"


def max_norm(a, b=None) -> float:
    """Largest entry modulus of ``a`` (or of ``a - b``)."""
    a = _as_array(a)
    if b is not None:
        a = a - _as_array(b)
    return float(np.max(np.abs(a)))


def pauli_operator(string: str, coeff: float = 1.0) -> HermitianOperator:
    """Tensor product of Pauli factors, leftmost character on qubit 0."""
    try:
        factors = [PAULI[c] for c in string.upper()]
    except KeyError as exc:
        raise ValueError(f"invalid Pauli string {string!r}") from exc
    if not factors:
        raise ValueError("empty Pauli string")
    return HermitianOperator(coeff * reduce(np.kron, factors), label=string.upper())


def spin_component(i: int, a: int, num_qubits: int) -> HermitianOperator:
    """Spin operator ``S_i^a = Pauli_a / 2`` acting on qubit ``i``.

    Args:
        i: qubit index, ``0 <= i < num_qubits``.
        a: axis, 1, 2 or 3 for x, y, z.
        num_qubits: total number of qubits ``M``; the result has dimension ``2**M``.
    """
    if not 1 <= num_qubits <= 12:
        raise OutOfRange(f"num_qubits must be in 1..12, got {num_qubits}")
    if not 0 <= i < num_qubits:
        raise OutOfRange(f"qubit index {i} out of range for {num_qubits} qubits")
    if a not in (1, 2, 3):
        raise OutOfRange(f"axis must be 1, 2 or 3, got {a}")
    string = "I" * i + AXES[a - 1] + "I" * (num_qubits - i - 1)
    op = pauli_operator(string, 0.5)
    op.label = f"S{i}{'xyz'[a - 1]}"
    return op


def total_spin_component(a: int, num_qubits: int) -> HermitianOperator:
    """``J^a = sum_i S_i^a``."""
    return HermitianOperator(
        sum(spin_component(i, a, num_qubits).matrix for i in range(num_qubits))
    )


def total_J_squared(num_qubits: int) -> HermitianOperator:
    """Squared total angular momentum ``J.J`` of ``num_qubits`` spin-1/2 particles."""
    if not 1 <= num_qubits <= 12:
        raise OutOfRange(f"num_qubits must be in 1..12, got {num_qubits}")
    total = 0
    for a in (1, 2, 3):
        j = total_spin_component(a, num_qubits).matrix
        total = total + j @ j
    return HermitianOperator(total, label="J2")


def matrix_log(rho: DensityMatrix) -> HermitianOperator:
    """Natural logarithm of a full-rank density matrix.

    Raises:
        RankDeficient: smallest eigenvalue below ``RANK_TOL`` times the largest.
    """
    w = rho.spectrum.eigenvalues
    if w[0] < RANK_TOL * w[-1]:
        raise RankDeficient(
            f"smallest eigenvalue {w[0]:.3e} below rank tolerance; the logarithm diverges"
        )
    return HermitianOperator(rho.spectrum.apply(np.log))


def normalized_exp(h) -> tuple[DensityMatrix, float]:
    """Return ``exp(H) / tr exp(H)`` and ``ln tr exp(H)``.

    The spectrum is shifted by its maximum before exponentiating, so large
    arguments do not overflow.
    """
    spec = h.spectrum if isinstance(h, DensityMatrix) else spectral_decompose(h)
    w = spec.eigenvalues
    top = w[-1]
    p = np.exp(w - top)
    z = p.sum()
    return DensityMatrix._from_spectrum(p / z, spec.eigenvectors), float(top + np.log(z))


def expectation(rho: DensityMatrix, g) -> float:
    """``tr(rho G)`` as a real number.

    Raises:
        DimensionMismatch: operand sizes differ.
        ConsistencyError: the imaginary part exceeds 1e-9.
    """
    r = _as_array(rho)
    m = _as_array(g)
    if r.shape != m.shape:
        raise DimensionMismatch(f"state is {r.shape}, operator is {m.shape}")
    val = np.einsum("ij,ji->", r, m)
    if abs(val.imag) > 1e-9:
        raise ConsistencyError(f"expectation has imaginary part {val.imag:.3e}")
    return float(val.real)
