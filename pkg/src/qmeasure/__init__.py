"""Random density matrices under induced, product-Dirichlet and Bures
measures, with analytic densities, exact moments and Monte Carlo checks."""

from .core import (
    BipartitePureState,
    DensityMatrix,
    EigenSystem,
    N2Entanglement,
    Spectrum,
    entropy,
    hermitian_eigensystem,
    n2_entanglement,
    partial_trace,
    project_hs,
    purity_functionals,
    schmidt_spectrum,
)
from .ensembles import (
    Bures,
    HurwitzAngles,
    Induced,
    MeasureSpec,
    ProductDirichlet,
    RandomStream,
    beta_spectrum,
    bures_density_matrix,
    bures_spectrum,
    dirichlet_spectrum,
    gaussian_matrix,
    haar_unitary,
    hilbert_schmidt,
    induced_density_matrix,
    induced_via_purification,
    product_measure_density_matrix,
    pure_state_gaussian,
    pure_state_hurwitz,
    rescale_to_simplex,
    sample_spectra,
)
from .stats import (
    Estimate,
    GofResult,
    chi2_test,
    histogram_1d,
    ks_test,
    mc_estimate,
    numeric_cdf,
    participation_ratio,
    ternary_histogram,
    two_sample_ks,
)

__version__ = "0.1.0"

__all__ = [
    "BipartitePureState",
    "Bures",
    "DensityMatrix",
    "EigenSystem",
    "Estimate",
    "GofResult",
    "HurwitzAngles",
    "Induced",
    "MeasureSpec",
    "N2Entanglement",
    "ProductDirichlet",
    "RandomStream",
    "Spectrum",
    "beta_spectrum",
    "bures_density_matrix",
    "bures_spectrum",
    "chi2_test",
    "dirichlet_spectrum",
    "entropy",
    "gaussian_matrix",
    "haar_unitary",
    "hermitian_eigensystem",
    "hilbert_schmidt",
    "histogram_1d",
    "induced_density_matrix",
    "induced_via_purification",
    "ks_test",
    "mc_estimate",
    "n2_entanglement",
    "numeric_cdf",
    "partial_trace",
    "participation_ratio",
    "product_measure_density_matrix",
    "project_hs",
    "pure_state_gaussian",
    "pure_state_hurwitz",
    "purity_functionals",
    "rescale_to_simplex",
    "sample_spectra",
    "schmidt_spectrum",
    "ternary_histogram",
    "two_sample_ks",
]
