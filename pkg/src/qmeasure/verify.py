"""Verification battery tying samplers to their analytic reference values.

Each criterion draws from its own substream family derived from the master
seed, so criteria are independent and the whole battery is reproducible for
a fixed (seed, workers) configuration. Monte Carlo gates use three-standard-
error bands (which widen automatically at smaller sample counts); KS and
chi-square gates use p > 0.01.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import xlogy

from . import analytics
from .ensembles import (
    Bures,
    Induced,
    ProductDirichlet,
    RandomStream,
    _pure_state_moduli,
    _purification_spectra,
    hilbert_schmidt,
    sample_spectra,
)
from .special import EULER_GAMMA
from .stats import (
    chi2_test,
    ks_test,
    mc_estimate,
    numeric_cdf,
    spectrum_functional,
    ternary_histogram,
    two_sample_ks,
)

DEFAULT_SEED = 1
DEFAULT_SAMPLES = 100_000
QUICK_SAMPLES = 10_000


@dataclass(frozen=True)
class BatteryConfig:
    samples: int = DEFAULT_SAMPLES
    seed: int = DEFAULT_SEED
    workers: int = 1


@dataclass
class Check:
    name: str
    passed: bool
    details: dict


@dataclass
class CriterionResult:
    index: int
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, **details):
        self.checks.append(Check(name, bool(passed), details))


def _crit_seed(config: BatteryConfig, index: int) -> int:
    return (config.seed * 1009 + index) % 2**64


def _stream(config: BatteryConfig, index: int, sub: int) -> RandomStream:
    # Direct draws use stream indices >= 1000 so they never collide with the
    # worker streams 0..workers-1 consumed by mc_estimate.
    return RandomStream(_crit_seed(config, index), 1000 + sub)


def _mean_stderr(values: np.ndarray) -> tuple[float, float]:
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def _zcheck(result: CriterionResult, name: str, mean: float, stderr: float, target: float,
            slack: float = 0.0):
    z = (mean - target) / stderr if stderr > 0 else math.inf
    ok = abs(mean - target) <= 3.0 * stderr + slack
    result.add(name, ok, mean=mean, stderr=stderr, target=target, z=z)


def _radius(spectra: np.ndarray) -> np.ndarray:
    return 0.5 * (spectra[:, 0] - spectra[:, 1])


def criterion_1(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(1, "HS mean entropy, N=2")
    est = mc_estimate(hilbert_schmidt(2), "entropy", config.samples, config.workers,
                      _crit_seed(config, 1))
    _zcheck(res, "entropy vs 1/3", est.mean, est.stderr, 1.0 / 3.0)
    return res


def criterion_2(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(2, "induced purity formula (N+K)/(NK+1)")
    for sub, (n, k) in enumerate([(2, 2), (2, 4), (3, 3), (3, 6), (4, 4)]):
        spectra = sample_spectra(Induced(n, k, 2), config.samples, _stream(config, 2, sub))
        mean, stderr = _mean_stderr(spectrum_functional(spectra, "purity"))
        _zcheck(res, f"purity ({n},{k})", mean, stderr, analytics.purity_induced_exact(n, k))
    return res


def criterion_3(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(3, "higher HS moments, nu = 3 and 4")
    for sub, n in enumerate([2, 3, 4]):
        spectra = sample_spectra(hilbert_schmidt(n), config.samples, _stream(config, 3, sub))
        for nu in (3, 4):
            mean, stderr = _mean_stderr(spectrum_functional(spectra, "trace_power", nu))
            target = analytics.hs_moment_exact(n, nu).value
            _zcheck(res, f"Tr rho^{nu}, N={n}", mean, stderr, target)
    return res


def criterion_4(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(4, "N=2 radial distributions")
    named = [
        ("unitary", ProductDirichlet(2, 1.0)),
        ("orthogonal", ProductDirichlet(2, 0.5)),
        ("hs", Induced(2, 2, 2)),
        ("bures", Bures(2)),
    ]
    for sub, (name, measure) in enumerate(named):
        spectra = sample_spectra(measure, config.samples, _stream(config, 4, sub))
        gof = ks_test(_radius(spectra), lambda r, name=name: analytics.radial_cdf_n2(name, r))
        res.add(f"radius KS, {name}", gof.p_value > 0.01, p=gof.p_value, d=gof.statistic)
    for sub, k in enumerate([3, 4, 5], start=len(named)):
        spectra = sample_spectra(Induced(2, k, 2), config.samples, _stream(config, 4, sub))
        cdf = numeric_cdf(lambda r, k=k: analytics.radial_density_n2("induced", r, k), 0.0, 0.5)
        gof = ks_test(_radius(spectra), cdf)
        res.add(f"radius KS, induced K={k}", gof.p_value > 0.01, p=gof.p_value, d=gof.statistic)
    return res


def criterion_5(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(5, "tangle and concurrence laws")
    spectra = sample_spectra(hilbert_schmidt(2), config.samples, _stream(config, 5, 0))
    tangle = spectrum_functional(spectra, "tangle")
    conc = np.sqrt(tangle)
    gof_t = ks_test(tangle, lambda x: analytics.entanglement_cdf_n2("tangle", x))
    res.add("tangle KS", gof_t.p_value > 0.01, p=gof_t.p_value, d=gof_t.statistic)
    gof_c = ks_test(conc, lambda x: analytics.entanglement_cdf_n2("concurrence", x))
    res.add("concurrence KS", gof_c.p_value > 0.01, p=gof_c.p_value, d=gof_c.statistic)
    mean_t, err_t = _mean_stderr(tangle)
    _zcheck(res, "mean tangle vs 2/5", mean_t, err_t, 0.4)
    mean_c, err_c = _mean_stderr(conc)
    _zcheck(res, "mean concurrence vs 3pi/16", mean_c, err_c, 3.0 * math.pi / 16.0)
    return res


def criterion_6(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(6, "N=2 reference means (unitary, orthogonal, Bures)")
    cases = [
        ("unitary", ProductDirichlet(2, 1.0)),
        ("orthogonal", ProductDirichlet(2, 0.5)),
        ("bures", Bures(2)),
    ]
    for sub, (name, measure) in enumerate(cases):
        ref = analytics.n2_reference_means(name)
        spectra = sample_spectra(measure, config.samples, _stream(config, 6, sub))
        mean_e, err_e = _mean_stderr(spectrum_functional(spectra, "entropy"))
        _zcheck(res, f"entropy, {name}", mean_e, err_e, ref.mean_entropy)
        mean_p, err_p = _mean_stderr(spectrum_functional(spectra, "purity"))
        ratio = 1.0 / mean_p
        ratio_err = err_p / (mean_p * mean_p)
        _zcheck(res, f"participation ratio, {name}", ratio, ratio_err, ref.participation)
    return res


def criterion_7(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(7, "Ginibre projection vs purification route")
    for sub, (n, k) in enumerate([(2, 2), (3, 4)]):
        direct = sample_spectra(Induced(n, k, 2), config.samples, _stream(config, 7, 2 * sub))
        purified = _purification_spectra(n, k, config.samples,
                                         _stream(config, 7, 2 * sub + 1).rng)
        gof = two_sample_ks(direct[:, 0], purified[:, 0])
        res.add(f"lambda_max KS ({n},{k})", gof.p_value > 0.01, p=gof.p_value, d=gof.statistic)
    return res


def _simplex_mass_n2(n: int, k: int, beta: int) -> float:
    """Integral of the normalized N=2 joint density over the simplex via the
    lam = sin^2(t) substitution (exact to quad precision, singularities gone)."""
    a = (beta * (k - n) + beta - 2) / 2.0
    log_c = analytics.log_norm_constant(n, k, beta)

    def integrand(t: float) -> float:
        lam = math.sin(t) ** 2
        mu = 1.0 - lam
        val = beta * math.log(abs(math.cos(2 * t))) + math.log(math.sin(2 * t))
        if a != 0.0:
            if lam == 0.0 or mu == 0.0:
                return 0.0 if a > 0 else math.inf
            val += a * (math.log(lam) + math.log(mu))
        return math.exp(log_c + val)

    lo, _ = integrate.quad(integrand, 0.0, math.pi / 4, limit=200)
    hi, _ = integrate.quad(integrand, math.pi / 4, math.pi / 2, limit=200)
    return lo + hi


def _simplex_mass_33(beta: int = 2) -> float:
    """Integral of the normalized (3,3,beta=2) joint density over the simplex."""
    c = math.exp(analytics.log_norm_constant(3, 3, 2))

    def integrand(l2: float, l1: float) -> float:
        l3 = 1.0 - l1 - l2
        if l3 < 0.0:
            return 0.0
        return c * ((l1 - l2) * (l1 - l3) * (l2 - l3)) ** 2

    val, _ = integrate.dblquad(integrand, 0.0, 1.0, 0.0, lambda l1: 1.0 - l1,
                               epsabs=1e-10, epsrel=1e-10)
    return val


def criterion_8(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(8, "normalization constants vs quadrature")
    for n, k, beta in [(2, 2, 2), (2, 3, 2), (2, 2, 1), (2, 2, 4)]:
        mass = _simplex_mass_n2(n, k, beta)
        res.add(f"unit mass ({n},{k},beta={beta})", abs(mass - 1.0) <= 1e-6, mass=mass)
    mass33 = _simplex_mass_33()
    res.add("unit mass (3,3,beta=2)", abs(mass33 - 1.0) <= 1e-6, mass=mass33)
    const, _ = analytics.bures_norm_constant(3)
    target = 35.0 / math.pi
    res.add("Bures N=3 constant vs 35/pi", abs(const - target) <= 0.02 * target,
            constant=const, target=target)
    return res


def criterion_9(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(9, "closed-form vs Gauss-Laguerre moments")
    worst = 0.0
    for n in range(2, 9):
        for nu in (2, 3, 4):
            closed = analytics.hs_moment_exact(n, nu).value
            quad = analytics.hs_moment_quadrature(n, nu)
            worst = max(worst, abs(closed - quad))
    res.add("agreement nu in {2,3,4}, N <= 8", worst <= 1e-9, worst_abs_diff=worst)
    worst_tr = max(abs(analytics.hs_moment_quadrature(n, 1.0) - 1.0) for n in range(2, 9))
    res.add("trace moment nu=1", worst_tr <= 1e-12, worst_abs_diff=worst_tr)
    return res


def criterion_10(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(10, "entropy asymptotics ln N - 1/2")
    dims = (4, 8, 16, 32)
    gaps = [abs(analytics.hs_mean_entropy_exact(n) - (math.log(n) - 0.5)) for n in dims]
    decreasing = all(gaps[i + 1] < gaps[i] for i in range(len(gaps) - 1))
    res.add("gap decreases over N=4..32", decreasing,
            **{f"gap_{n}": g for n, g in zip(dims, gaps)})
    res.add("gap at N=32 below 0.06", gaps[-1] < 0.06, gap=gaps[-1])
    mc_samples = min(config.samples, 10_000)
    spectra = sample_spectra(hilbert_schmidt(16), mc_samples, _stream(config, 10, 0))
    mean, stderr = _mean_stderr(spectrum_functional(spectra, "entropy"))
    _zcheck(res, "MC entropy N=16 vs exact", mean, stderr, analytics.hs_mean_entropy_exact(16))
    return res


def criterion_11(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(11, "Gaussian rescaling laws")
    rng = _stream(config, 11, 0).rng
    resolution = 8
    moduli = _pure_state_moduli(3, config.samples, rng)
    hist = ternary_histogram(moduli, resolution)
    observed = [c for _, _, c in hist.cells()]
    expected = np.full(resolution * resolution, config.samples / resolution**2)
    gof = chi2_test(observed, expected)
    res.add("simplex uniformity (ternary chi-square)", gof.p_value > 0.01,
            p=gof.p_value, statistic=gof.statistic, dof=gof.dof)

    z = rng.standard_normal((config.samples, 2))
    y_chi = z[:, 0] ** 2 / (z[:, 0] ** 2 + z[:, 1] ** 2)
    gof = ks_test(y_chi, lambda y: (2.0 / np.pi) * np.arcsin(np.sqrt(y)))
    res.add("chi^2_1 pair vs Dirichlet(1/2)", gof.p_value > 0.01, p=gof.p_value)

    u = rng.random((config.samples, 2))
    y_uni = u[:, 0] / (u[:, 0] + u[:, 1])
    gof = ks_test(y_uni, analytics.uniform_rescale_cdf_n2)
    res.add("uniform pair vs 1/(2(1-y)^2) law", gof.p_value > 0.01, p=gof.p_value)
    return res


def criterion_12(config: BatteryConfig) -> CriterionResult:
    res = CriterionResult(12, "pure-state entropy asymptote, N=64")
    moduli = _pure_state_moduli(64, config.samples, _stream(config, 12, 0).rng)
    ent = -np.sum(xlogy(moduli, moduli), axis=1)
    mean, stderr = _mean_stderr(ent)
    target = math.log(64.0) - 1.0 + EULER_GAMMA
    # the finite-size residual is O(1/N); 0.02 of slack absorbs it
    _zcheck(res, "entropy vs ln 64 - 1 + gamma", mean, stderr, target, slack=0.02)
    return res


def criterion_13(config: BatteryConfig) -> CriterionResult:
    import tempfile
    from pathlib import Path

    from .cli import main as cli_main

    res = CriterionResult(13, "sampling output is byte-deterministic")
    with tempfile.TemporaryDirectory() as tmp:
        paths = [Path(tmp) / "a.csv", Path(tmp) / "b.csv"]
        for p in paths:
            code = cli_main([
                "sample", "--measure", "induced", "--n", "2", "--k", "2",
                "--samples", "200", "--seed", str(config.seed), "--out", str(p),
            ])
            if code != 0:
                res.add("cmd_sample runs", False, exit_code=code)
                return res
        same = paths[0].read_bytes() == paths[1].read_bytes()
    res.add("two runs byte-identical", same)
    return res


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
    11: criterion_11,
    12: criterion_12,
    13: criterion_13,
}


def run_criterion(index: int, config: BatteryConfig) -> CriterionResult:
    return CRITERIA[index](config)


def run_battery(config: BatteryConfig | None = None) -> list[CriterionResult]:
    config = config or BatteryConfig()
    return [run_criterion(i, config) for i in sorted(CRITERIA)]


def format_line(result: CriterionResult) -> str:
    status = "PASS" if result.passed else "FAIL"
    extra = ""
    if not result.passed:
        bad = [c.name for c in result.checks if not c.passed]
        extra = f" [{'; '.join(bad)}]"
    return f"criterion {result.index:02d} {status}  {result.title}{extra}"
