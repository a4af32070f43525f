import numpy as np
import pytest

from qmeasure import (
    Induced,
    ProductDirichlet,
    RandomStream,
    hilbert_schmidt,
    histogram_1d,
    ks_test,
    mc_estimate,
    numeric_cdf,
    participation_ratio,
    sample_spectra,
    ternary_histogram,
    two_sample_ks,
)
from qmeasure.analytics import radial_density_n2
from qmeasure.errors import DimensionMismatch, InsufficientData, QuadratureFailure
from qmeasure.stats import chi2_test, spectrum_functional


# ---------------------------------------------------------------- mc_estimate

def test_mc_estimate_deterministic():
    a = mc_estimate(hilbert_schmidt(2), "entropy", 500, workers=2, seed=4)
    b = mc_estimate(hilbert_schmidt(2), "entropy", 500, workers=2, seed=4)
    assert (a.mean, a.stderr, a.count) == (b.mean, b.stderr, b.count)


def test_mc_estimate_workers_repartition_streams():
    a = mc_estimate(hilbert_schmidt(2), "purity", 600, workers=2, seed=4)
    b = mc_estimate(hilbert_schmidt(2), "purity", 600, workers=3, seed=4)
    assert a.mean != b.mean


def test_mc_estimate_hits_reference():
    est = mc_estimate(hilbert_schmidt(2), "entropy", 20000, seed=1)
    assert abs(est.mean - 1.0 / 3.0) <= 3 * est.stderr
    est = mc_estimate(Induced(3, 3, 2), "purity", 20000, seed=2)
    assert abs(est.mean - 0.6) <= 3 * est.stderr


def test_mc_estimate_trace_power():
    est = mc_estimate(hilbert_schmidt(2), "trace_power", 20000, seed=3, nu=3)
    assert est.functional == "trace_power(3)"
    assert abs(est.mean - 0.7) <= 3 * est.stderr


def test_mc_estimate_stderr_scaling():
    small = mc_estimate(hilbert_schmidt(2), "entropy", 2000, seed=5)
    large = mc_estimate(hilbert_schmidt(2), "entropy", 20000, seed=5)
    ratio = small.stderr / large.stderr
    assert abs(ratio - np.sqrt(10.0)) <= 0.2 * np.sqrt(10.0)


def test_mc_estimate_minimum_samples():
    with pytest.raises(InsufficientData):
        mc_estimate(hilbert_schmidt(2), "entropy", 50)


def test_participation_labels():
    inv = mc_estimate(ProductDirichlet(2, 1.0), "participation", 20000, seed=6)
    pur = mc_estimate(ProductDirichlet(2, 1.0), "purity", 20000, seed=6)
    ratio = participation_ratio(pur)
    assert ratio.functional == "participation_ratio"
    assert ratio.mean == pytest.approx(1.0 / pur.mean)
    assert ratio.stderr == pytest.approx(pur.stderr / pur.mean**2)
    # Jensen: mean inverse purity exceeds inverse mean purity
    assert inv.mean > ratio.mean
    with pytest.raises(ValueError):
        participation_ratio(inv)


def test_spectrum_functional_validation():
    spectra = sample_spectra(Induced(3, 3, 2), 100, RandomStream(0, 0))
    with pytest.raises(DimensionMismatch):
        spectrum_functional(spectra, "tangle")
    with pytest.raises(ValueError):
        spectrum_functional(spectra, "trace_power")
    with pytest.raises(ValueError):
        spectrum_functional(spectra, "median")


# ---------------------------------------------------------------- histograms

def test_histogram_uniform_fill():
    rng = np.random.default_rng(1)
    n, bins = 100000, 20
    h = histogram_1d(rng.random(n), 0.0, 1.0, bins)
    assert h.counts.sum() == n and h.underflow == 0 and h.overflow == 0
    sigma = np.sqrt(n * (1 / bins) * (1 - 1 / bins))
    assert np.all(np.abs(h.counts - n / bins) <= 4 * sigma)


def test_histogram_single_value_and_empty():
    h = histogram_1d([0.31], 0.0, 1.0, 10)
    assert h.counts[3] == 1 and h.counts.sum() == 1
    h = histogram_1d([], 0.0, 1.0, 5)
    assert np.all(h.counts == 0)


def test_histogram_overflow_sentinels():
    h = histogram_1d([-0.5, 0.5, 1.0, 2.0], 0.0, 1.0, 4)
    assert h.underflow == 1 and h.overflow == 2 and h.counts.sum() == 1


# ------------------------------------------------------------------- ternary

def test_ternary_center_mass():
    spectra = np.tile([1 / 3, 1 / 3, 1 / 3], (50, 1))
    hist = ternary_histogram(spectra, 2)
    # at resolution 2 the middle (downward) cell is (0, 1)
    assert hist.counts[0, 1] == 50 and hist.total() == 50


def test_ternary_corner_mass():
    hist = ternary_histogram(np.tile([1.0, 0.0, 0.0], (7, 1)), 4)
    assert hist.counts[3, 0] == 7


def test_ternary_cell_count():
    hist = ternary_histogram(np.tile([0.5, 0.3, 0.2], (3, 1)), 5)
    assert sum(1 for _ in hist.cells()) == 25


def test_ternary_permutation_symmetry():
    rng = np.random.default_rng(2)
    g = rng.gamma(1.0, size=(5000, 3))
    spectra = g / g.sum(axis=1, keepdims=True)
    base = sorted(c for _, _, c in ternary_histogram(spectra, 4).cells())
    for perm in ([0, 2, 1], [1, 0, 2], [2, 1, 0], [1, 2, 0], [2, 0, 1]):
        permuted = sorted(c for _, _, c in ternary_histogram(spectra[:, perm], 4).cells())
        assert permuted == base


def test_ternary_induced_concentrates_with_k():
    m = 20000
    near = sample_spectra(Induced(3, 3, 2), m, RandomStream(3, 0))
    far = sample_spectra(Induced(3, 6, 2), m, RandomStream(3, 1))
    # resolution 2: cell (0, 1) holds every spectrum with all entries < 1/2
    center_33 = ternary_histogram(near, 2).counts[0, 1]
    center_36 = ternary_histogram(far, 2).counts[0, 1]
    assert center_36 > center_33


def test_ternary_validation():
    with pytest.raises(DimensionMismatch):
        ternary_histogram(np.ones((4, 2)) / 2, 3)


# ----------------------------------------------------------------- gof tests

def test_ks_self_consistency():
    rng = np.random.default_rng(4)
    rejections = sum(
        ks_test(rng.random(500), lambda x: x).p_value < 0.01 for _ in range(500)
    )
    # binomial(500, 0.01): mean 5, four sigma is about +-9
    assert rejections <= 14


def test_ks_detects_gross_mismatch():
    rng = np.random.default_rng(5)
    samples = rng.random(10000) * 0.5
    result = ks_test(samples, lambda r: 8.0 * np.asarray(r) ** 3)
    assert result.p_value < 1e-6


def test_two_sample_ks_identical_input():
    x = np.linspace(0.0, 1.0, 100)
    result = two_sample_ks(x, x)
    assert result.statistic == 0.0 and result.p_value == pytest.approx(1.0)


def test_ks_needs_samples():
    with pytest.raises(InsufficientData):
        ks_test([0.5] * 10, lambda x: x)
    with pytest.raises(InsufficientData):
        two_sample_ks([0.5] * 10, [0.5] * 30)


def test_chi2_self_consistency():
    rng = np.random.default_rng(6)
    observed = rng.multinomial(10000, np.full(10, 0.1))
    result = chi2_test(observed, np.full(10, 1000.0))
    assert result.p_value > 0.01 and result.dof == 9


def test_chi2_requires_expected_counts():
    with pytest.raises(InsufficientData):
        chi2_test([10, 10], [1.0, 19.0])
    with pytest.raises(DimensionMismatch):
        chi2_test([1, 2, 3], [1, 2])


# ---------------------------------------------------------------- numeric cdf

def test_numeric_cdf_parabola():
    cdf = numeric_cdf(lambda r: 24.0 * r * r, 0.0, 0.5)
    assert float(cdf(0.5)) == pytest.approx(1.0, abs=1e-8)
    assert float(cdf(0.25)) == pytest.approx(1.0 / 8.0, abs=1e-8)
    assert float(cdf(0.0)) == pytest.approx(0.0, abs=1e-12)


def test_numeric_cdf_bures_singular_endpoint():
    cdf = numeric_cdf(lambda r: radial_density_n2("bures", r), 0.0, 0.5)
    assert float(cdf(0.5)) == pytest.approx(1.0, abs=1e-6)
    grid = np.linspace(0.0, 0.5, 200)
    vals = cdf(grid)
    assert np.all(np.diff(vals) >= -1e-12)


def test_numeric_cdf_rejects_unnormalized():
    with pytest.raises(QuadratureFailure):
        numeric_cdf(lambda x: 1.0, 0.0, 2.0)
