"""Random Jacobi matrices of the Gaussian, Wishart and MANOVA beta ensembles.

The package samples the tridiagonal models, extracts their spectral measures
``sum_i q_i^2 delta_{lambda_i}``, evaluates the semicircle, Marchenko-Pastur
and Kesten-McKay limit laws, and runs Monte Carlo checks of the associated
laws of large numbers and central limit theorems.
"""

__version__ = "0.1.0"

from .distributions import RngStream
from .ensembles import (
    HermiteConfig,
    JacobiMatrix,
    LaguerreConfig,
    ManovaConfig,
    limit_matrix,
    sample_ensemble,
    sample_hermite,
    sample_laguerre,
    sample_manova,
    sample_weights,
)
from .limit_laws import KestenMcKay, MarchenkoPastur, Semicircle, stieltjes_inversion, variance_functional
from .spectral import (
    EmpiricalMeasure,
    SpectralMeasure,
    discrete_m_function,
    empirical_measure,
    moment_oracle,
    spectral_measure,
    truncate_top,
)
from .stats import (
    ExperimentConfig,
    clt_experiment,
    entry_fluctuation_check,
    kolmogorov_distance,
    lln_experiment,
    mean_identity_check,
    poincare_bound_check,
    variance_identity_check,
)

__all__ = [
    "EmpiricalMeasure",
    "ExperimentConfig",
    "HermiteConfig",
    "JacobiMatrix",
    "KestenMcKay",
    "LaguerreConfig",
    "ManovaConfig",
    "MarchenkoPastur",
    "RngStream",
    "Semicircle",
    "SpectralMeasure",
    "clt_experiment",
    "discrete_m_function",
    "empirical_measure",
    "entry_fluctuation_check",
    "kolmogorov_distance",
    "limit_matrix",
    "lln_experiment",
    "mean_identity_check",
    "moment_oracle",
    "poincare_bound_check",
    "sample_ensemble",
    "sample_hermite",
    "sample_laguerre",
    "sample_manova",
    "sample_weights",
    "spectral_measure",
    "stieltjes_inversion",
    "truncate_top",
    "variance_functional",
    "variance_identity_check",
]
