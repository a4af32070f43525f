"""Random ensembles: Gaussian matrices, Haar unitaries, pure states and
density matrices drawn under induced, product-Dirichlet and Bures measures.

All randomness flows through :class:`RandomStream`, a counter-based Philox
generator keyed on a (seed, stream) pair. Identical pairs replay identical
sequences; distinct stream indices give statistically independent substreams,
which is how parallel workers stay reproducible.

Complex Gaussian entries have independent unit-variance real and imaginary
parts, so E|a|^2 = 2. The overall scale cancels in every normalized output.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .core import (
    BipartitePureState,
    DensityMatrix,
    Spectrum,
    ZERO_TRACE_GUARD,
    partial_trace,
    project_hs,
)
from .errors import EfficiencyFailure, ZeroSum

# Rejection-sampled ensembles (Bures, beta=4) are only viable for small
# dimension; the acceptance probability collapses super-exponentially with n.
REJECTION_MAX_DIM = 6

# Consecutive rejected proposals tolerated before declaring the sampler dead
# (acceptance rate below 1e-6 over a one-million-proposal window).
_REJECTION_WINDOW = 10**6


@dataclass
class RandomStream:
    """Reproducible randomness source keyed on (seed, stream)."""

    seed: int
    stream: int = 0
    _gen: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (0 <= self.seed < 2**64 and 0 <= self.stream < 2**64):
            raise ValueError("seed and stream must be unsigned 64-bit integers")
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    @property
    def rng(self) -> np.random.Generator:
        return self._gen


@dataclass(frozen=True)
class Induced:
    """Spectra of reduced states of Haar pure states on an n x k system.

    beta=2 is the complex (unitary) symmetry class; k=n reproduces the
    Hilbert-Schmidt measure. beta=1 is the real class, beta=4 symplectic.
    """

    n: int
    k: int
    beta: int = 2

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError(f"need n, k >= 1, got n={self.n}, k={self.k}")
        if self.beta not in (1, 2, 4):
            raise ValueError(f"beta must be 1, 2 or 4, got {self.beta}")


@dataclass(frozen=True)
class ProductDirichlet:
    """Haar eigenvectors with Dirichlet(s) eigenvalues; s=1 is the unitary
    product measure, s=1/2 the orthogonal one."""

    n: int
    s: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not self.s > 0:
            raise ValueError(f"need s > 0, got {self.s}")


@dataclass(frozen=True)
class Bures:
    """Bures-metric measure, sampled at spectrum level by exact rejection."""

    n: int

    def __post_init__(self):
        if not 1 <= self.n <= REJECTION_MAX_DIM:
            raise ValueError(f"need 1 <= n <= {REJECTION_MAX_DIM}, got {self.n}")


MeasureSpec = Union[Induced, ProductDirichlet, Bures]


def hilbert_schmidt(n: int) -> Induced:
    """Alias: the Hilbert-Schmidt measure equals Induced(n, n, beta=2)."""
    return Induced(n, n, 2)


def gaussian_matrix(rows: int, cols: int, beta: int, stream: RandomStream) -> np.ndarray:
    """Ginibre-type random matrix: complex entries for beta=2 (independent
    standard-normal real and imaginary parts), real entries for beta=1."""
    if rows < 1 or cols < 1:
        raise ValueError(f"need rows, cols >= 1, got {rows} x {cols}")
    if beta == 2:
        z = stream.rng.standard_normal((2, rows, cols))
        return np.ascontiguousarray(z[0] + 1j * z[1])
    if beta == 1:
        return stream.rng.standard_normal((rows, cols)).astype(np.complex128)
    raise ValueError(f"beta must be 1 or 2 for matrix sampling, got {beta}")


def haar_unitary(n: int, stream: RandomStream) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix.

    Column j of Q is multiplied by the phase R_jj/|R_jj|, which makes the
    R factor's diagonal positive and the Q factor exactly Haar.
    """
    a = gaussian_matrix(n, n, 2, stream)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class HurwitzAngles:
    """Angle coordinates of a pure state: n-1 azimuthal thetas in [0, pi/2]
    and n-1 polar phis in [0, 2pi)."""

    thetas: np.ndarray
    phis: np.ndarray

    def __post_init__(self):
        t = np.ascontiguousarray(self.thetas, dtype=np.float64)
        p = np.ascontiguousarray(self.phis, dtype=np.float64)
        if t.ndim != 1 or t.shape != p.shape or t.size < 1:
            raise ValueError("thetas and phis must be equal-length 1-D arrays")
        if np.any((t < 0) | (t > np.pi / 2)):
            raise ValueError("thetas must lie in [0, pi/2]")
        if np.any((p < 0) | (p >= 2 * np.pi)):
            raise ValueError("phis must lie in [0, 2pi)")
        t.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "thetas", t)
        object.__setattr__(self, "phis", p)

    def state(self) -> np.ndarray:
        """Assemble the pure-state amplitudes

            psi_1 = cos(theta_{n-1})
            psi_j = sin(theta_{n-1}) .. sin(theta_{n-j+1}) cos(theta_{n-j}) e^{i phi_{n-j+1}}

        with theta_0 = 0, so the trailing component carries phi_1.
        """
        n = self.thetas.size + 1
        sines = np.sin(self.thetas)
        cosines = np.cos(self.thetas)
        psi = np.empty(n, dtype=np.complex128)
        psi[0] = cosines[n - 2]
        tail = 1.0
        for j in range(2, n + 1):
            tail *= sines[n - j]
            cos_fac = cosines[n - j - 1] if j < n else 1.0
            psi[j - 1] = tail * cos_fac * np.exp(1j * self.phis[n - j])
        return psi


def hurwitz_angles(n: int, stream: RandomStream) -> HurwitzAngles:
    """Draw Hurwitz angles for the natural measure: phi_k uniform on [0, 2pi)
    and theta_k = arcsin(xi_k^(1/2k)) with xi_k uniform on [0, 1], realizing
    the azimuthal density k sin(2 theta) (sin theta)^(2k-2)."""
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    rng = stream.rng
    xi = rng.random(n - 1)
    phi = rng.random(n - 1) * 2.0 * np.pi
    k = np.arange(1, n)
    theta = np.arcsin(xi ** (1.0 / (2.0 * k)))
    return HurwitzAngles(theta, phi)


def pure_state_hurwitz(n: int, stream: RandomStream) -> np.ndarray:
    """Random pure state assembled from Hurwitz angles; same distribution as
    :func:`pure_state_gaussian` of matching dimension."""
    return hurwitz_angles(n, stream).state()


def pure_state_gaussian(m: int, stream: RandomStream) -> np.ndarray:
    """Random pure state: m standard complex Gaussians scaled to unit norm.

    The squared moduli are uniform on the (m-1)-simplex, so this agrees with
    the Hurwitz construction in distribution.
    """
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    rng = stream.rng
    while True:
        z = rng.standard_normal((2, m))
        v = z[0] + 1j * z[1]
        norm = np.linalg.norm(v)
        if norm > ZERO_TRACE_GUARD:
            return v / norm


def induced_density_matrix(n: int, k: int, beta: int, stream: RandomStream) -> DensityMatrix:
    """Density matrix A A^dag / tr(A A^dag) of an n x k Gaussian matrix."""
    return project_hs(gaussian_matrix(n, k, beta, stream))


def induced_via_purification(n: int, k: int, stream: RandomStream) -> DensityMatrix:
    """Same induced measure obtained by partial-tracing a random pure state
    of the n x k composite system."""
    psi = pure_state_gaussian(n * k, stream).reshape(n, k)
    return partial_trace(BipartitePureState(psi), side="B")


def dirichlet_spectrum(n: int, s: float, stream: RandomStream) -> Spectrum:
    """Dirichlet(s) point of the simplex: normalized Gamma(s) variates."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if not s > 0:
        raise ValueError(f"need s > 0, got {s}")
    lam = _dirichlet_rows(n, s, stream.rng, 1)[0]
    return Spectrum(np.sort(lam)[::-1])


def product_measure_density_matrix(n: int, s: float, stream: RandomStream) -> DensityMatrix:
    """Rotationally invariant state with Dirichlet(s) spectrum and Haar
    eigenvectors."""
    lam = dirichlet_spectrum(n, s, stream)
    u = haar_unitary(n, stream)
    w = (u * lam.values) @ u.conj().T
    return DensityMatrix(0.5 * (w + w.conj().T))


def bures_acceptance_probability(lam) -> float:
    """Acceptance ratio prod_{i<j} (l_i - l_j)^2 / (l_i + l_j) of the Bures
    rejection step; always in [0, 1] on the simplex."""
    lam = np.asarray(lam, dtype=np.float64)
    acc = 1.0
    for i in range(lam.size):
        for j in range(i + 1, lam.size):
            acc *= (lam[i] - lam[j]) ** 2 / (lam[i] + lam[j])
    return float(acc)


def vandermonde_acceptance_probability(lam, beta: int) -> float:
    """Acceptance ratio prod_{i<j} |l_i - l_j|^beta used by the beta=4 route."""
    lam = np.asarray(lam, dtype=np.float64)
    acc = 1.0
    for i in range(lam.size):
        for j in range(i + 1, lam.size):
            acc *= abs(lam[i] - lam[j]) ** beta
    return float(acc)


def bures_spectrum(n: int, stream: RandomStream) -> Spectrum:
    """Spectrum under the Bures measure via exact rejection from Dirichlet(1/2)."""
    lam = _bures_rows(n, 1, stream.rng)[0]
    return Spectrum(lam)


def bures_density_matrix(n: int, stream: RandomStream) -> DensityMatrix:
    """Bures-distributed state: Bures spectrum conjugated by a Haar unitary."""
    lam = bures_spectrum(n, stream)
    u = haar_unitary(n, stream)
    w = (u * lam.values) @ u.conj().T
    return DensityMatrix(0.5 * (w + w.conj().T))


def beta_spectrum(n: int, k: int, beta: int, stream: RandomStream) -> Spectrum:
    """Induced-measure spectrum for symmetry class beta in {1, 2, 4}.

    beta=1 and beta=2 go through the Gaussian matrix construction; beta=4
    is sampled by rejection from a Dirichlet envelope with acceptance
    prod |l_i - l_j|^beta (no matrix construction is attempted).
    """
    if not 1 <= n <= k:
        raise ValueError(f"need k >= n >= 1, got n={n}, k={k}")
    if beta in (1, 2):
        lam = _wishart_spectra(n, k, beta, 1, stream.rng)[0]
        return Spectrum(lam)
    if beta == 4:
        if n > REJECTION_MAX_DIM:
            raise ValueError(f"beta=4 sampling capped at n <= {REJECTION_MAX_DIM}")
        lam = _beta4_rows(n, k, 1, stream.rng)[0]
        return Spectrum(lam)
    raise ValueError(f"beta must be 1, 2 or 4, got {beta}")


def rescale_to_simplex(values) -> Spectrum:
    """Divide nonnegative values by their sum and sort descending."""
    v = np.asarray(values, dtype=np.float64)
    if np.any(v < 0):
        raise ValueError("rescale_to_simplex requires nonnegative values")
    total = v.sum()
    if total < ZERO_TRACE_GUARD:
        raise ZeroSum("values sum to zero")
    return Spectrum(np.sort(v / total)[::-1])


def sample_spectra(measure: MeasureSpec, count: int, stream: RandomStream) -> np.ndarray:
    """Draw ``count`` spectra under ``measure`` as a (count, n) array, each row
    sorted descending. This is the bulk engine behind the Monte Carlo layer."""
    if count < 1:
        raise ValueError(f"need count >= 1, got {count}")
    rng = stream.rng
    if isinstance(measure, Induced):
        if measure.beta in (1, 2):
            return _wishart_spectra(measure.n, measure.k, measure.beta, count, rng)
        if measure.k < measure.n or measure.n > REJECTION_MAX_DIM:
            raise ValueError("beta=4 requires k >= n and small dimension")
        return _beta4_rows(measure.n, measure.k, count, rng)
    if isinstance(measure, ProductDirichlet):
        lam = _dirichlet_rows(measure.n, measure.s, rng, count)
        return -np.sort(-lam, axis=1)
    if isinstance(measure, Bures):
        return _bures_rows(measure.n, count, rng)
    raise TypeError(f"unknown measure spec: {measure!r}")


# ---------------------------------------------------------------------------
# batched internals

_CHUNK_ENTRIES = 2 * 10**7


def _wishart_spectra(n: int, k: int, beta: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted spectra of A A^dag / tr(A A^dag) for Gaussian A, in batches."""
    out = np.empty((count, n))
    chunk = max(1, _CHUNK_ENTRIES // (n * k))
    done = 0
    while done < count:
        m = min(chunk, count - done)
        if beta == 2:
            z = rng.standard_normal((2, m, n, k))
            a = z[0] + 1j * z[1]
        else:
            a = rng.standard_normal((m, n, k))
        w = a @ np.conj(np.swapaxes(a, 1, 2))
        ev = np.linalg.eigvalsh(w)
        ev = np.clip(ev, 0.0, None)
        ev /= ev.sum(axis=1, keepdims=True)
        out[done : done + m] = ev[:, ::-1]
        done += m
    return out


def _dirichlet_rows(n: int, s: float, rng: np.random.Generator, count: int) -> np.ndarray:
    """Unsorted Dirichlet(s) rows; resamples the (measure-zero) all-zero rows
    that can appear for very small s through underflow."""
    lam = rng.gamma(s, 1.0, size=(count, n))
    total = lam.sum(axis=1)
    while np.any(total < ZERO_TRACE_GUARD):
        bad = total < ZERO_TRACE_GUARD
        lam[bad] = rng.gamma(s, 1.0, size=(int(bad.sum()), n))
        total = lam.sum(axis=1)
    return lam / total[:, None]


def _pairwise_acceptance(lam: np.ndarray, bures: bool, beta: int = 4) -> np.ndarray:
    acc = np.ones(lam.shape[0])
    for i in range(lam.shape[1]):
        for j in range(i + 1, lam.shape[1]):
            diff = lam[:, i] - lam[:, j]
            if bures:
                acc *= diff**2 / (lam[:, i] + lam[:, j])
            else:
                acc *= np.abs(diff) ** beta
    return acc


def _rejection_rows(n: int, count: int, rng: np.random.Generator, s: float, bures: bool,
                    beta: int = 4) -> np.ndarray:
    out = np.empty((count, n))
    filled = 0
    dry = 0  # proposals since the last acceptance
    batch = 8192
    while filled < count:
        lam = _dirichlet_rows(n, s, rng, batch)
        acc = _pairwise_acceptance(lam, bures, beta)
        keep = rng.random(batch) < acc
        taken = lam[keep]
        if taken.shape[0] == 0:
            dry += batch
            if dry >= _REJECTION_WINDOW:
                raise EfficiencyFailure(
                    f"acceptance rate below 1e-6 over {dry} proposals (n={n})"
                )
            continue
        dry = 0
        m = min(taken.shape[0], count - filled)
        out[filled : filled + m] = taken[:m]
        filled += m
    return -np.sort(-out, axis=1)


def _bures_rows(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.ones((count, 1))
    return _rejection_rows(n, count, rng, s=0.5, bures=True)


def _beta4_rows(n: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    if n == 1:
        return np.ones((count, 1))
    # Dirichlet envelope exponent matching the beta=4 eigenvalue prefactor.
    s = 4.0 * (k - n) / 2.0 + 2.0
    return _rejection_rows(n, count, rng, s=s, bures=False, beta=4)


def _purification_spectra(n: int, k: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted spectra via the purification route: normalize a Gaussian vector
    of length n*k, reshape, partial-trace."""
    out = np.empty((count, n))
    chunk = max(1, _CHUNK_ENTRIES // (n * k))
    done = 0
    while done < count:
        m = min(chunk, count - done)
        z = rng.standard_normal((2, m, n * k))
        v = z[0] + 1j * z[1]
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        psi = v.reshape(m, n, k)
        w = psi @ np.conj(np.swapaxes(psi, 1, 2))
        ev = np.clip(np.linalg.eigvalsh(w), 0.0, None)
        out[done : done + m] = ev[:, ::-1]
        done += m
    return out


def _pure_state_moduli(m: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Squared moduli |c_i|^2 of normalized complex Gaussian vectors."""
    out = np.empty((count, m))
    chunk = max(1, _CHUNK_ENTRIES // m)
    done = 0
    while done < count:
        c = min(chunk, count - done)
        z = rng.standard_normal((2, c, m))
        p = z[0] ** 2 + z[1] ** 2
        out[done : done + c] = p / p.sum(axis=1, keepdims=True)
        done += c
    return out
