"""Domain types and scalar operations on quantum states.

Complex matrices are plain numpy ``complex128`` arrays (C-contiguous, so the
in-memory layout is interleaved re/im pairs in row-major order). The wrapper
types below validate the physical invariants once at construction and freeze
their buffers, after which instances are safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import xlogy

from .errors import DimensionMismatch, NonConvergence, ZeroMatrix

# Construction tolerances, sized for double precision at dimensions <= 64.
HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
EIGENVALUE_CLAMP = 1e-12
ZERO_TRACE_GUARD = 1e-300


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def as_complex_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D C-contiguous complex128 array."""
    m = np.ascontiguousarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise DimensionMismatch(f"density matrix must be square, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        if abs(m.trace().real - 1.0) > TRACE_TOL:
            raise ValueError(f"trace is {m.trace().real!r}, not 1")
        if np.linalg.eigvalsh(m)[0] < -EIGENVALUE_CLAMP:
            raise ValueError("matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class BipartitePureState:
    """Normalized pure state of an n x k composite system.

    Stored as the n x k coefficient matrix psi[i, k] in a product basis.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        a = as_complex_matrix(self.amplitudes)
        norm2 = np.sum(np.abs(a) ** 2)
        if abs(norm2 - 1.0) > TRACE_TOL:
            raise ValueError(f"state is not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _freeze(a))

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def k(self) -> int:
        return self.amplitudes.shape[1]


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue vector on the probability simplex, sorted descending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise DimensionMismatch(f"spectrum must be a 1-D sequence, got shape {v.shape}")
        if np.any(np.diff(v) > 0):
            raise ValueError("spectrum must be sorted in descending order")
        if v[-1] < 0:
            raise ValueError("spectrum has a negative entry")
        if abs(v.sum() - 1.0) > TRACE_TOL:
            raise ValueError(f"spectrum sums to {v.sum()!r}, not 1")
        object.__setattr__(self, "values", _freeze(v))

    def __len__(self) -> int:
        return self.values.size

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class EigenSystem:
    """Spectrum plus the unitary of eigenvectors, column i matching value i."""

    spectrum: Spectrum
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        u = as_complex_matrix(self.vectors)
        n = len(self.spectrum)
        if u.shape != (n, n):
            raise DimensionMismatch(f"eigenvector matrix shape {u.shape} != ({n}, {n})")
        if np.max(np.abs(u.conj().T @ u - np.eye(n))) > HERMITIAN_TOL:
            raise ValueError("eigenvector matrix is not unitary within tolerance")
        object.__setattr__(self, "vectors", _freeze(u))


def _clamped_spectrum(values: np.ndarray) -> Spectrum:
    """Sort descending and clamp eigenvalue roundoff into [0, 1]."""
    v = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    if v[-1] < -EIGENVALUE_CLAMP:
        raise ValueError(f"eigenvalue {v[-1]!r} below clamp tolerance")
    return Spectrum(np.clip(v, 0.0, 1.0))


def project_hs(a) -> DensityMatrix:
    """Project a nonzero matrix A onto density matrices via A A^dag / tr(A A^dag)."""
    m = as_complex_matrix(a)
    w = m @ m.conj().T
    t = w.trace().real
    if t < ZERO_TRACE_GUARD:
        raise ZeroMatrix("matrix norm is numerically zero")
    w /= t
    w = 0.5 * (w + w.conj().T)  # scrub roundoff asymmetry
    return DensityMatrix(w)


def partial_trace(psi: BipartitePureState, side: str = "B") -> DensityMatrix:
    """Reduced density matrix of a bipartite pure state.

    ``side`` names the subsystem that is traced out: "B" yields the n x n
    reduction rho_A[i, j] = sum_k psi[i, k] conj(psi[j, k]); "A" yields the
    k x k reduction rho_B[k, l] = sum_i psi[i, k] conj(psi[i, l]).
    """
    a = psi.amplitudes
    if side == "B":
        w = a @ a.conj().T
    elif side == "A":
        w = a.T @ a.conj()
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    w = 0.5 * (w + w.conj().T)
    return DensityMatrix(w)


def hermitian_eigensystem(rho: DensityMatrix) -> EigenSystem:
    """Eigendecomposition with descending eigenvalues.

    Ties keep the LAPACK output order. Eigenvector phases are arbitrary, and
    for degenerate eigenvalues any unitary diagonalizer may be returned.
    """
    try:
        values, vectors = np.linalg.eigh(rho.matrix)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f"eigensolver failed: {exc}") from exc
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    residual = np.max(np.abs((vectors * values) @ vectors.conj().T - rho.matrix))
    if residual > HERMITIAN_TOL:
        raise NonConvergence(f"reconstruction residual {residual:.3e} exceeds tolerance")
    return EigenSystem(_clamped_spectrum(values), vectors)


def schmidt_spectrum(psi: BipartitePureState) -> Spectrum:
    """Squared Schmidt coefficients: the min(n, k) positive eigenvalues shared
    by both reductions of the state."""
    eig = hermitian_eigensystem(partial_trace(psi, side="B"))
    keep = min(psi.n, psi.k)
    return Spectrum(eig.spectrum.values[:keep])


def entropy(s: Spectrum) -> float:
    """Von Neumann entropy -sum(lambda ln lambda) in nats, with 0 ln 0 = 0."""
    return float(-np.sum(xlogy(s.values, s.values)))


def purity_functionals(s: Spectrum) -> tuple[float, float]:
    """Return (purity, participation) = (sum lambda^2, 1 / sum lambda^2)."""
    p = float(np.sum(s.values**2))
    return p, 1.0 / p


class N2Entanglement(NamedTuple):
    r: float
    alpha: float
    tangle: float
    concurrence: float


def n2_entanglement(s: Spectrum) -> N2Entanglement:
    """Bloch radius, Schmidt angle, tangle and concurrence of a length-2 spectrum.

    r = (l1 - l2)/2 in [0, 1/2], alpha = arccos(sqrt(l1)) in [0, pi/4],
    tangle = 4 l1 l2 and concurrence = sqrt(tangle).
    """
    if len(s) != 2:
        raise DimensionMismatch(f"need a length-2 spectrum, got {len(s)}")
    l1, l2 = s.values
    tangle = 4.0 * l1 * l2
    return N2Entanglement(
        r=0.5 * (l1 - l2),
        alpha=float(np.arccos(min(1.0, np.sqrt(l1)))),
        tangle=tangle,
        concurrence=float(np.sqrt(tangle)),
    )
