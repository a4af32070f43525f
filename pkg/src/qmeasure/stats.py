"""Monte Carlo estimation, histogramming and goodness-of-fit tests.

``mc_estimate`` fans the requested sample count out over ``workers``
independent substreams, RandomStream(seed, worker_index), and merges the
partial sums in worker order, so results are bit-reproducible for a fixed
(seed, workers) pair. Changing ``workers`` repartitions the streams and
legitimately changes the estimate.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator
from scipy.special import chdtrc, kolmogorov, xlogy

from .ensembles import MeasureSpec, RandomStream, sample_spectra
from .errors import DimensionMismatch, InsufficientData, QuadratureFailure

FUNCTIONALS = ("entropy", "purity", "participation", "tangle", "concurrence", "trace_power")


@dataclass(frozen=True)
class Estimate:
    """Sample mean with standard error for one functional under one measure."""

    mean: float
    stderr: float
    count: int
    functional: str
    measure: MeasureSpec | None


@dataclass(frozen=True)
class GofResult:
    """Goodness-of-fit outcome; dof is recorded for chi-square tests."""

    statistic: float
    p_value: float
    kind: str
    dof: int | None = None


@dataclass(frozen=True)
class Histogram1D:
    lo: float
    hi: float
    counts: np.ndarray
    underflow: int
    overflow: int


@dataclass(frozen=True)
class TernaryHistogram:
    """Counts over the equilateral subdivision of the N=3 simplex.

    ``resolution`` triangles per edge gives resolution^2 equal-area cells.
    Cell (i, j) lives in the strip with floor(l1 * R) = i; even j are upward
    triangles with floor(l2 * R) = j/2, odd j the downward triangle below
    lattice row (j-1)/2.
    """

    resolution: int
    counts: np.ndarray

    def total(self) -> int:
        return int(self.counts.sum())

    def cells(self):
        """Yield (i, j, count) over all resolution^2 cells."""
        r = self.resolution
        for i in range(r):
            for j in range(2 * (r - i) - 1):
                yield i, j, int(self.counts[i, j])


def spectrum_functional(spectra: np.ndarray, functional: str, nu: float | None = None) -> np.ndarray:
    """Vectorized evaluation of a named functional over (count, n) spectra."""
    if functional == "entropy":
        return -np.sum(xlogy(spectra, spectra), axis=1)
    if functional == "purity":
        return np.sum(spectra**2, axis=1)
    if functional == "participation":
        return 1.0 / np.sum(spectra**2, axis=1)
    if functional in ("tangle", "concurrence"):
        if spectra.shape[1] != 2:
            raise DimensionMismatch(f"{functional} needs N=2 spectra")
        tangle = 4.0 * spectra[:, 0] * spectra[:, 1]
        return tangle if functional == "tangle" else np.sqrt(tangle)
    if functional == "trace_power":
        if nu is None:
            raise ValueError("trace_power needs the exponent nu")
        return np.sum(spectra**nu, axis=1)
    raise ValueError(f"unknown functional {functional!r}")


def functional_label(functional: str, nu: float | None = None) -> str:
    return f"trace_power({nu:g})" if functional == "trace_power" else functional


def mc_estimate(
    measure: MeasureSpec,
    functional: str,
    samples: int,
    workers: int = 1,
    seed: int = 0,
    nu: float | None = None,
) -> Estimate:
    """Monte Carlo mean of a spectrum functional under ``measure``.

    ``participation`` averages the per-sample inverse purity <1/Tr rho^2>;
    the reported participation ratio R = 1/<Tr rho^2> is the separate,
    explicitly labeled quantity produced by :func:`participation_ratio`.
    """
    if samples < 100:
        raise InsufficientData(f"need at least 100 samples, got {samples}")
    if workers < 1:
        raise ValueError(f"need workers >= 1, got {workers}")
    base, rem = divmod(samples, workers)
    counts = [base + (1 if i < rem else 0) for i in range(workers)]

    def run(worker: int) -> tuple[int, float, float]:
        m = counts[worker]
        if m == 0:
            return 0, 0.0, 0.0
        spectra = sample_spectra(measure, m, RandomStream(seed, worker))
        vals = spectrum_functional(spectra, functional, nu)
        return m, float(vals.sum()), float(np.dot(vals, vals))

    if workers == 1:
        partials = [run(0)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, range(workers)))

    total = sum(p[0] for p in partials)
    s1 = 0.0
    s2 = 0.0
    for _, a, b in partials:  # merge in worker order
        s1 += a
        s2 += b
    mean = s1 / total
    var = max(s2 - total * mean * mean, 0.0) / (total - 1)
    return Estimate(mean, float(np.sqrt(var / total)), total,
                    functional_label(functional, nu), measure)


def participation_ratio(purity_estimate: Estimate) -> Estimate:
    """R = 1/<Tr rho^2> with first-order error propagation from the purity
    estimate."""
    if not purity_estimate.functional.startswith("purity"):
        raise ValueError("participation_ratio expects a purity estimate")
    m = purity_estimate.mean
    return Estimate(
        mean=1.0 / m,
        stderr=purity_estimate.stderr / (m * m),
        count=purity_estimate.count,
        functional="participation_ratio",
        measure=purity_estimate.measure,
    )


def histogram_1d(values, lo: float, hi: float, bins: int) -> Histogram1D:
    """Fixed-width histogram on [lo, hi); out-of-range values land in the
    underflow/overflow sentinels (hi itself counts as overflow)."""
    if bins < 1:
        raise ValueError(f"need bins >= 1, got {bins}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi})")
    v = np.asarray(values, dtype=np.float64).ravel()
    under = int(np.count_nonzero(v < lo))
    over = int(np.count_nonzero(v >= hi))
    inside = v[(v >= lo) & (v < hi)]
    idx = np.floor((inside - lo) / (hi - lo) * bins).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins)
    return Histogram1D(lo, hi, counts, under, over)


def _ternary_cell(a: float, b: float, c: float, resolution: int) -> tuple[int, int]:
    r = resolution
    i = min(int(a * r), r - 1)
    j = min(int(b * r), r - 1)
    k = min(int(c * r), r - 1)
    # Lattice points make the floors sum to r; push such boundary ties down to
    # the lower-index (upward) cell deterministically.
    if i + j + k == r:
        if k > 0:
            k -= 1
        elif j > 0:
            j -= 1
        else:
            i -= 1
    if i + j + k == r - 1:
        return i, 2 * j  # upward triangle
    return i, 2 * j + 1  # downward triangle


def ternary_histogram(spectra, resolution: int) -> TernaryHistogram:
    """Histogram length-3 spectra over the barycentric triangle grid.

    The binning treats the three coordinates symmetrically, so permuting the
    components of every spectrum permutes cells without changing the count
    multiset.
    """
    if resolution < 1:
        raise ValueError(f"need resolution >= 1, got {resolution}")
    arr = np.asarray(spectra, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise DimensionMismatch(f"need (count, 3) spectra, got shape {arr.shape}")
    counts = np.zeros((resolution, 2 * resolution - 1), dtype=np.int64)
    for a, b, c in arr:
        i, j = _ternary_cell(a, b, c, resolution)
        counts[i, j] += 1
    return TernaryHistogram(resolution, counts)


def _ks_p_value(statistic: float, effective_n: float) -> float:
    en = np.sqrt(effective_n)
    return float(kolmogorov((en + 0.12 + 0.11 / en) * statistic))


def ks_test(samples, cdf: Callable[[float], float]) -> GofResult:
    """One-sample Kolmogorov-Smirnov test against a CDF callable, with the
    asymptotic (Kolmogorov distribution) p-value."""
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    n = x.size
    if n < 20:
        raise InsufficientData(f"KS test needs >= 20 samples, got {n}")
    try:
        f = np.asarray(cdf(x), dtype=np.float64)
        if f.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.asarray([cdf(v) for v in x], dtype=np.float64)
    grid = np.arange(1, n + 1) / n
    d = float(max(np.max(grid - f), np.max(f - (grid - 1.0 / n))))
    return GofResult(d, _ks_p_value(d, n), "ks")


def two_sample_ks(a, b) -> GofResult:
    """Two-sample KS test with the asymptotic p-value."""
    x = np.sort(np.asarray(a, dtype=np.float64).ravel())
    y = np.sort(np.asarray(b, dtype=np.float64).ravel())
    n1, n2 = x.size, y.size
    if min(n1, n2) < 20:
        raise InsufficientData("two-sample KS needs >= 20 samples per side")
    everything = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, everything, side="right") / n1
    cdf2 = np.searchsorted(y, everything, side="right") / n2
    d = float(np.max(np.abs(cdf1 - cdf2)))
    return GofResult(d, _ks_p_value(d, n1 * n2 / (n1 + n2)), "two-sample-ks")


def chi2_test(observed, expected) -> GofResult:
    """Pearson chi-square test; expected counts are rescaled to the observed
    total and every expected bin must be at least 5."""
    obs = np.asarray(observed, dtype=np.float64).ravel()
    exp = np.asarray(expected, dtype=np.float64).ravel()
    if obs.size != exp.size:
        raise DimensionMismatch("observed and expected must have equal length")
    if obs.size < 2:
        raise InsufficientData("chi-square needs at least 2 bins")
    exp = exp * (obs.sum() / exp.sum())
    if np.any(exp < 5.0):
        raise InsufficientData("chi-square needs expected counts >= 5 in every bin")
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = obs.size - 1
    return GofResult(stat, float(chdtrc(dof, stat)), "chi-square", dof)


def numeric_cdf(density: Callable[[float], float], lo: float, hi: float) -> Callable:
    """Turn an integrable density on [lo, hi] into a monotone CDF callable.

    The density is integrated piecewise with adaptive quadrature over a
    cosine-clustered grid (dense near both endpoints, where these densities
    may be singular) and interpolated monotonically. Raises QuadratureFailure
    if the total mass misses 1 by more than 1e-8.
    """
    nodes = 1600
    t = np.linspace(0.0, np.pi, nodes + 1)
    grid = lo + (hi - lo) * 0.5 * (1.0 - np.cos(t))
    masses = np.empty(nodes)
    for i in range(nodes):
        masses[i], _ = integrate.quad(density, grid[i], grid[i + 1], limit=200)
    cum = np.concatenate([[0.0], np.cumsum(masses)])
    total = cum[-1]
    if abs(total - 1.0) > 1e-8:
        raise QuadratureFailure(f"density mass is {total!r}, not 1")
    cum = np.maximum.accumulate(cum) / total
    interp = PchipInterpolator(grid, cum)

    def cdf(x):
        return np.clip(interp(np.clip(x, lo, hi)), 0.0, 1.0)

    return cdf
