"""Pfaffian point processes on the line.

Matrix kernels of the orthogonal and symplectic sine and Bessel processes,
their correlation functions, variances of additive statistics, screening
and defect identities, spectral measures and occupation-number covariances,
together with Monte Carlo beta-ensembles for cross-checks.
"""
from .errors import ContractError, DivergenceError, DomainError, QuadratureError, ResourceError
from .pfaffian import pfaffian, pfaffian_ex
from .kernels import KERNEL_NAMES, MatrixKernel, correlation, matrix_kernel, rho1, rho2_truncated
from .rigidity import (AdditiveStatistic, TaperFunction, defect, defect_closed_form, indicator,
                       screening_average, screening_integral, screening_residual,
                       screening_residual_closed_form, variance_additive, variance_sweep)
from .spectral import build_mollifier, check_linear_bound, closed_form_fhat_delta, spectral_variance
from .stationary import StationaryProfile, stationary_profile
from .occupation import (cov_abs_tail, cov_total_sum, covariance_series,
                         divergence_probe_sine4_lambda1, occupation_cov)
from .ensembles import EnsembleSpec, empirical_count_stats, rescale, sample

__version__ = "0.1.0"

__all__ = [
    "ContractError", "DivergenceError", "DomainError", "QuadratureError", "ResourceError",
    "pfaffian", "pfaffian_ex",
    "KERNEL_NAMES", "MatrixKernel", "correlation", "matrix_kernel", "rho1", "rho2_truncated",
    "AdditiveStatistic", "TaperFunction", "defect", "defect_closed_form", "indicator",
    "screening_average", "screening_integral", "screening_residual",
    "screening_residual_closed_form", "variance_additive", "variance_sweep",
    "build_mollifier", "check_linear_bound", "closed_form_fhat_delta", "spectral_variance",
    "StationaryProfile", "stationary_profile",
    "cov_abs_tail", "cov_total_sum", "covariance_series", "divergence_probe_sine4_lambda1",
    "occupation_cov",
    "EnsembleSpec", "empirical_count_stats", "rescale", "sample",
]
