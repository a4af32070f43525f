"""Closed-form densities, normalization constants and exact moments.

Joint eigenvalue densities are reported with respect to Lebesgue measure on
the (N-1)-dimensional simplex (the trace delta is already eliminated) and
describe unordered eigenvalues; comparisons against descending-sorted samples
must multiply by N!. All normalization constants are assembled in log space
so dimensions up to 64 stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

from .errors import DomainError, QuadratureFailure
from .special import EULER_GAMMA, gauss_laguerre_nodes, laguerre_sum_sq, log_gamma

_CLOSED_FORM_NUS = (2, 3, 4)
_QUAD_NODES_SMOOTH = 128       # plenty for polynomial integrands (integer nu)
_QUAD_NODES_SINGULAR = 1024    # non-integer nu: x^nu has a weak singularity at 0


@dataclass(frozen=True)
class MomentReport:
    """One evaluated moment <Tr rho^nu> with its provenance."""

    n: int
    k: int
    beta: int
    nu: float
    value: float
    method: str

    def __post_init__(self):
        if self.nu > 0 and not self.value > 0:
            raise ValueError(f"moment must be positive for nu > 0, got {self.value!r}")
        if self.nu == 1 and abs(self.value - 1.0) > 1e-10:
            raise ValueError(f"trace moment must equal 1, got {self.value!r}")


@dataclass(frozen=True)
class ReferenceMeans:
    """Exact N=2 reference values for one measure."""

    measure: str
    mean_entropy: float
    mean_purity: float
    participation: float

    def __post_init__(self):
        if abs(self.participation * self.mean_purity - 1.0) > 1e-12:
            raise ValueError("participation must be the reciprocal of mean purity")


def cpn_volume(n: int) -> float:
    """Volume pi^(n-1)/(n-1)! of the manifold of pure states in dimension n."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    return math.exp((n - 1) * math.log(math.pi) - log_gamma(n)) if n > 1 else 1.0


def log_norm_constant(n: int, k: int, beta: float) -> float:
    """ln C of the induced joint eigenvalue density for symmetry class beta.

    Computed from the Selberg-integral product of Gamma functions, entirely
    in log space.
    """
    if not 1 <= n <= k:
        raise DomainError(f"need k >= n >= 1, got n={n}, k={k}")
    if not beta > 0:
        raise DomainError(f"need beta > 0, got {beta}")
    total = log_gamma(k * n * beta / 2.0) + n * log_gamma(1.0 + beta / 2.0)
    for j in range(n):
        total -= log_gamma((k - j) * beta / 2.0) + log_gamma(1.0 + (n - j) * beta / 2.0)
    return total


def _lam_checked(lam, n: int) -> np.ndarray:
    v = np.asarray(lam.values if hasattr(lam, "values") else lam, dtype=np.float64)
    if v.ndim != 1 or v.size != n:
        raise DomainError(f"expected {n} eigenvalues, got shape {v.shape}")
    if np.any(v < 0):
        raise DomainError("eigenvalues must be nonnegative")
    return v


def joint_eigenvalue_density(lam, n: int, k: int, beta: int) -> float:
    """Normalized joint density of unordered eigenvalues on the simplex:

        C * prod_i l_i^((beta(k-n) + beta - 2)/2) * prod_{i<j} |l_i - l_j|^beta
    """
    v = _lam_checked(lam, n)
    if not 1 <= n <= k:
        raise DomainError(f"need k >= n >= 1, got n={n}, k={k}")
    a = (beta * (k - n) + beta - 2) / 2.0
    diffs = v[:, None] - v[None, :]
    off = np.abs(diffs[np.triu_indices(n, 1)])
    if np.any(off == 0.0) and n > 1:
        return 0.0
    zero = v == 0.0
    if np.any(zero):
        if a > 0:
            return 0.0
        if a < 0:
            return math.inf
    log_dens = log_norm_constant(n, k, beta) + beta * np.sum(np.log(off))
    if a != 0:
        log_dens += a * np.sum(np.log(v[~zero]))
    return float(np.exp(log_dens))


def bures_unnormalized_density(lam, n: int) -> float:
    """prod_i l_i^(-1/2) * prod_{i<j} (l_i - l_j)^2 / (l_i + l_j); zero on
    degenerate spectra, +inf on the simplex boundary."""
    v = _lam_checked(lam, n)
    if n == 1:
        return 1.0
    iu = np.triu_indices(n, 1)
    diffs = (v[:, None] - v[None, :])[iu]
    if np.any(diffs == 0.0):
        return 0.0
    if np.any(v == 0.0):
        return math.inf
    sums = (v[:, None] + v[None, :])[iu]
    log_dens = -0.5 * np.sum(np.log(v)) + np.sum(2.0 * np.log(np.abs(diffs)) - np.log(sums))
    return float(np.exp(log_dens))


def _bures_angle_integrand_3(a: float, b: float) -> float:
    # lam = (cos^2 a, sin^2 a cos^2 b, sin^2 a sin^2 b) maps [0, pi/2]^2 onto
    # the simplex; the substitution absorbs the l^(-1/2) singularities into a
    # smooth Jacobian 4 sin(a).
    l1 = math.cos(a) ** 2
    sa = math.sin(a) ** 2
    l2 = sa * math.cos(b) ** 2
    l3 = sa * math.sin(b) ** 2
    prod = 1.0
    for x, y in ((l1, l2), (l1, l3), (l2, l3)):
        s = x + y
        if s == 0.0:
            return 0.0
        prod *= (x - y) ** 2 / s
    return 4.0 * math.sin(a) * prod


@lru_cache(maxsize=None)
def bures_norm_constant(n: int) -> tuple[float, float]:
    """Normalization constant of the Bures eigenvalue density, with the
    standard error of the estimate (zero for the quadrature cases n <= 3).

    n <= 3 uses adaptive quadrature in angle coordinates; n = 4, 5 use Monte
    Carlo integration over the Dirichlet(1/2) envelope with a fixed internal
    seed, so the cached value is reproducible.
    """
    if not 1 <= n <= 5:
        raise DomainError(f"normalized Bures density available for n <= 5, got {n}")
    if n == 1:
        return 1.0, 0.0
    if n == 2:
        # integral of 2 cos^2(2a) over [0, pi/2]
        val, err = integrate.quad(lambda a: 2.0 * math.cos(2 * a) ** 2, 0.0, math.pi / 2)
        return 1.0 / val, 0.0
    if n == 3:
        val, err = integrate.dblquad(
            _bures_angle_integrand_3, 0.0, math.pi / 2, 0.0, math.pi / 2,
            epsabs=1e-12, epsrel=1e-12,
        )
        return 1.0 / val, 0.0
    # Monte Carlo: integral = E_Dirichlet(1/2)[prod (l_i-l_j)^2/(l_i+l_j)] / alpha
    # where alpha = Gamma(n/2) / pi^(n/2) normalizes the Dirichlet(1/2) envelope.
    rng = np.random.Generator(np.random.Philox(key=np.array([0xB2E5, n], dtype=np.uint64)))
    samples = 4_000_000
    g = rng.gamma(0.5, 1.0, size=(samples, n))
    lam = g / g.sum(axis=1, keepdims=True)
    acc = np.ones(samples)
    for i in range(n):
        for j in range(i + 1, n):
            acc *= (lam[:, i] - lam[:, j]) ** 2 / (lam[:, i] + lam[:, j])
    mean = acc.mean()
    stderr = acc.std(ddof=1) / math.sqrt(samples)
    log_alpha = log_gamma(n / 2.0) - (n / 2.0) * math.log(math.pi)
    const = math.exp(log_alpha) / mean
    return const, const * stderr / mean


def bures_joint_density(lam, n: int) -> tuple[float, float | None]:
    """(unnormalized, normalized) Bures joint density; the normalized value is
    None for n > 5 where no constant is tabulated."""
    unnorm = bures_unnormalized_density(lam, n)
    if n > 5:
        return unnorm, None
    const, _ = bures_norm_constant(n)
    return unnorm, const * unnorm


@lru_cache(maxsize=None)
def _induced_radial_norm(k: int) -> float:
    val, _ = integrate.quad(lambda r: r * r * (0.25 - r * r) ** (k - 2), 0.0, 0.5)
    return 1.0 / val


def _scalar_or_array(x, out):
    out = np.asarray(out, dtype=np.float64)
    return float(out) if np.ndim(x) == 0 else out


def radial_density_n2(measure: str, r, k: int | None = None):
    """Radial (Bloch-ball) eigenvalue density for N=2 on r in [0, 1/2).

    measure is one of unitary, orthogonal, hs, bures, induced; induced needs
    the environment dimension k >= 2 and is c_k r^2 (1/4 - r^2)^(k-2) with a
    numerically fixed constant. Accepts scalars or arrays.
    """
    rv = np.asarray(r, dtype=np.float64)
    if np.any((rv < 0.0) | (rv >= 0.5)):
        raise DomainError(f"radius must lie in [0, 1/2), got {r!r}")
    if measure == "unitary":
        return _scalar_or_array(r, np.full_like(rv, 2.0))
    if measure == "orthogonal":
        return _scalar_or_array(r, 4.0 / (np.pi * np.sqrt(1.0 - 4.0 * rv * rv)))
    if measure == "hs":
        return _scalar_or_array(r, 24.0 * rv * rv)
    if measure == "bures":
        return _scalar_or_array(r, 32.0 * rv * rv / (np.pi * np.sqrt(1.0 - 4.0 * rv * rv)))
    if measure == "induced":
        if k is None or k < 2:
            raise DomainError("induced radial density needs k >= 2")
        return _scalar_or_array(r, _induced_radial_norm(k) * rv * rv * (0.25 - rv * rv) ** (k - 2))
    raise DomainError(f"unknown radial measure {measure!r}")


def radial_cdf_n2(measure: str, r):
    """Closed-form radial CDFs for the four named N=2 measures."""
    rv = np.asarray(r, dtype=np.float64)
    if np.any((rv < 0.0) | (rv > 0.5)):
        raise DomainError(f"radius must lie in [0, 1/2], got {r!r}")
    if measure == "unitary":
        return _scalar_or_array(r, 2.0 * rv)
    if measure == "orthogonal":
        return _scalar_or_array(r, (2.0 / np.pi) * np.arcsin(2.0 * rv))
    if measure == "hs":
        return _scalar_or_array(r, 8.0 * rv**3)
    if measure == "bures":
        theta = np.arcsin(2.0 * rv)
        return _scalar_or_array(r, (2.0 * theta - np.sin(2.0 * theta)) / np.pi)
    raise DomainError(f"no closed-form radial CDF for {measure!r}")


def schmidt_angle_density(alpha):
    """Density 3 cos(2a) sin(4a) of the Schmidt angle on [0, pi/4]."""
    av = np.asarray(alpha, dtype=np.float64)
    if np.any((av < 0.0) | (av > np.pi / 4)):
        raise DomainError(f"Schmidt angle must lie in [0, pi/4], got {alpha!r}")
    return _scalar_or_array(alpha, 3.0 * np.cos(2.0 * av) * np.sin(4.0 * av))


def entanglement_density_n2(kind: str, x):
    """Density of the tangle, (3/2) sqrt(1-t), or concurrence, 3c sqrt(1-c^2),
    for natural-measure two-qubit pure states."""
    xv = np.asarray(x, dtype=np.float64)
    if np.any((xv < 0.0) | (xv > 1.0)):
        raise DomainError(f"argument must lie in [0, 1], got {x!r}")
    if kind == "tangle":
        return _scalar_or_array(x, 1.5 * np.sqrt(1.0 - xv))
    if kind == "concurrence":
        return _scalar_or_array(x, 3.0 * xv * np.sqrt(1.0 - xv * xv))
    raise DomainError(f"kind must be 'tangle' or 'concurrence', got {kind!r}")


def entanglement_cdf_n2(kind: str, x):
    """Antiderivatives of :func:`entanglement_density_n2`, used for KS tests."""
    xv = np.asarray(x, dtype=np.float64)
    if np.any((xv < 0.0) | (xv > 1.0)):
        raise DomainError(f"argument must lie in [0, 1], got {x!r}")
    if kind == "tangle":
        return _scalar_or_array(x, 1.0 - (1.0 - xv) ** 1.5)
    if kind == "concurrence":
        return _scalar_or_array(x, 1.0 - (1.0 - xv * xv) ** 1.5)
    raise DomainError(f"kind must be 'tangle' or 'concurrence', got {kind!r}")


def _hs_moment_quadrature_value(n: int, nu: float, count: int) -> float:
    x, w = gauss_laguerre_nodes(count)
    keep = w > 0.0
    x, w = x[keep], w[keep]
    log_b = log_gamma(n * n) - log_gamma(n * n + nu)
    return float(math.exp(log_b) * np.sum(w * x**nu * laguerre_sum_sq(n, x)))


def hs_moment_quadrature(n: int, nu: float, count: int | None = None) -> float:
    """Gauss-Laguerre evaluation of <Tr rho^nu> under the Hilbert-Schmidt
    measure, via the Laguerre-kernel integral. Raises QuadratureFailure when
    halving the node count moves the result by more than 1e-8 relative."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not nu > -1:
        raise DomainError(f"need nu > -1, got {nu}")
    if count is None:
        count = _QUAD_NODES_SMOOTH if float(nu).is_integer() else _QUAD_NODES_SINGULAR
    count = max(count, 2 * n + 8)
    value = _hs_moment_quadrature_value(n, nu, count)
    check = _hs_moment_quadrature_value(n, nu, count // 2)
    residual = abs(value - check) / max(abs(value), 1e-300)
    if residual > 1e-8:
        raise QuadratureFailure(
            f"moment quadrature unstable: residual {residual:.3e} between "
            f"{count // 2} and {count} nodes"
        )
    return value


def hs_moment_exact(n: int, nu: float) -> MomentReport:
    """<Tr rho^nu> under the Hilbert-Schmidt measure (k = n, beta = 2).

    nu in {2, 3, 4} uses the closed rational forms; other exponents fall back
    to Gauss-Laguerre quadrature.
    """
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if not nu > -1:
        raise DomainError(f"need nu > -1, got {nu}")
    n2 = n * n
    if nu == 2:
        return MomentReport(n, n, 2, nu, 2.0 * n / (n2 + 1), "closed-form")
    if nu == 3:
        return MomentReport(n, n, 2, nu, (5.0 * n2 + 1) / ((n2 + 1) * (n2 + 2)), "closed-form")
    if nu == 4:
        value = (14.0 * n**3 + 10.0 * n) / ((n2 + 1) * (n2 + 2) * (n2 + 3))
        return MomentReport(n, n, 2, nu, value, "closed-form")
    return MomentReport(n, n, 2, nu, hs_moment_quadrature(n, nu), "quadrature")


def purity_induced_exact(n: int, k: int) -> float:
    """<Tr rho^2> = (n + k)/(nk + 1) under the induced measure; symmetric in
    n and k."""
    if n < 1 or k < 1:
        raise DomainError(f"need n, k >= 1, got n={n}, k={k}")
    return (n + k) / (n * k + 1.0)


def hs_mean_entropy_exact(n: int) -> float:
    """Mean von Neumann entropy under the Hilbert-Schmidt measure, as minus
    the derivative of the moment at nu = 1 (central difference with one
    Richardson step, h = 1e-4)."""
    if not 1 <= n <= 64:
        raise DomainError(f"need 1 <= n <= 64, got {n}")
    if n == 1:
        return 0.0
    h = 1e-4

    def diff(hh: float) -> float:
        up = _hs_moment_quadrature_value(n, 1.0 + hh, _QUAD_NODES_SINGULAR)
        lo = _hs_moment_quadrature_value(n, 1.0 - hh, _QUAD_NODES_SINGULAR)
        return (up - lo) / (2.0 * hh)

    return -(4.0 * diff(h / 2) - diff(h)) / 3.0


@dataclass(frozen=True)
class AsymptoticValues:
    moment: float
    entropy: float
    pure_state_entropy: float


def asymptotics(n: int, nu: float) -> AsymptoticValues:
    """Large-n asymptotes: the moment Gamma(1+2nu) n^(1-nu) / (Gamma(1+nu)
    Gamma(2+nu)), the mixed-state entropy ln n - 1/2, and the pure-state
    entropy ln n - 1 + gamma."""
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    log_m = log_gamma(1 + 2 * nu) - log_gamma(1 + nu) - log_gamma(2 + nu)
    return AsymptoticValues(
        moment=math.exp(log_m) * n ** (1.0 - nu),
        entropy=math.log(n) - 0.5,
        pure_state_entropy=math.log(n) - 1.0 + EULER_GAMMA,
    )


_REFERENCE_MEANS = {
    "hs": (1.0 / 3.0, 4.0 / 5.0),
    "unitary": (0.5, 2.0 / 3.0),
    "orthogonal": (2.0 * math.log(2.0) - 1.0, 3.0 / 4.0),
    "bures": (2.0 * math.log(2.0) - 7.0 / 6.0, 7.0 / 8.0),
}


def n2_reference_means(measure: str) -> ReferenceMeans:
    """Exact N=2 mean entropy, mean purity and participation ratio for the
    hs, unitary, orthogonal and Bures measures."""
    try:
        mean_entropy, mean_purity = _REFERENCE_MEANS[measure]
    except KeyError:
        raise DomainError(f"unknown measure {measure!r}") from None
    return ReferenceMeans(measure, mean_entropy, mean_purity, 1.0 / mean_purity)


def uniform_rescale_density_n2(y):
    """Density of y1/(y1+y2) for independent uniform y1, y2: 1/(2(1-y)^2)
    below 1/2 and its mirror image above."""
    yv = np.asarray(y, dtype=np.float64)
    if np.any((yv < 0.0) | (yv > 1.0)):
        raise DomainError(f"argument must lie in [0, 1], got {y!r}")
    with np.errstate(divide="ignore"):  # np.where evaluates the unused branch
        out = np.where(yv <= 0.5, 0.5 / (1.0 - yv) ** 2, 0.5 / yv**2)
    return _scalar_or_array(y, out)


def uniform_rescale_cdf_n2(y):
    """CDF matching :func:`uniform_rescale_density_n2`."""
    yv = np.asarray(y, dtype=np.float64)
    if np.any((yv < 0.0) | (yv > 1.0)):
        raise DomainError(f"argument must lie in [0, 1], got {y!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(yv <= 0.5, 0.5 * yv / (1.0 - yv), 1.0 - 0.5 * (1.0 - yv) / yv)
    return _scalar_or_array(y, out)
