"""Berry–Esseen laboratory for subordinated Gaussian statistics.

Modules
-------
autocovariance
    Autocovariance models, truncated norms and tail sums.
gaussian_sim
    Exact stationary Gaussian path synthesis.
hermite
    Hermite polynomials, coefficient catalogs, quadrature and decay fits.
statistics
    Subordinated statistics and their batch evaluation.
covariance
    Exact Mehler covariance, eigenvalue certificates, fGn correlation checks.
bounds
    Bound formulas and admissibility thresholds.
distance
    Monte Carlo rectangle, ball and marginal Wasserstein distances.
experiments
    Presets and result persistence; ``subordlab`` is the command line.
"""

from .autocovariance import AutocovarianceModel, classify_dependence, tail_sum, truncated_norm, weighted_partial_sum
from .bounds import (
    BoundReport,
    admissibility,
    bound_finite_expansion,
    bound_fixed_cov,
    bound_main,
    bound_mom,
    bound_srd_lrd,
    psi,
)
from .constants import lambert_w, log_plus, r_constant, upsilon
from .covariance import CovarianceReport, exact_cov, jacobi_eigenvalues, limiting_cov, prop27_fgn_check
from .distance import RectangleFamily, estimate_dC_ball, estimate_dR, estimate_dW1_marginal, rate_fit
from .experiments import list_presets, run
from .gaussian_sim import generate_path, generate_paths
from .hermite import HermiteExpansion, ThetaParams, catalog_expansion, fit_theta
from .statistics import build, evaluate, evaluate_batch

__version__ = "0.1.0"

__all__ = [
    "AutocovarianceModel",
    "classify_dependence",
    "tail_sum",
    "truncated_norm",
    "weighted_partial_sum",
    "BoundReport",
    "admissibility",
    "bound_finite_expansion",
    "bound_fixed_cov",
    "bound_main",
    "bound_mom",
    "bound_srd_lrd",
    "psi",
    "lambert_w",
    "log_plus",
    "r_constant",
    "upsilon",
    "CovarianceReport",
    "exact_cov",
    "jacobi_eigenvalues",
    "limiting_cov",
    "prop27_fgn_check",
    "RectangleFamily",
    "estimate_dC_ball",
    "estimate_dR",
    "estimate_dW1_marginal",
    "rate_fit",
    "list_presets",
    "run",
    "generate_path",
    "generate_paths",
    "HermiteExpansion",
    "ThetaParams",
    "catalog_expansion",
    "fit_theta",
    "build",
    "evaluate",
    "evaluate_batch",
]
