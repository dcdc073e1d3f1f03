"""Gaussian parsimonious clustering models: densities, M-steps, EM and BIC."""

from .density import (
    component_density,
    e_step,
    log_component_density,
    log_likelihood,
    mixture_log_density,
)
from .em import FitResult, em_fit, farthest_point_kmeans
from .mstep import DegenerateFitError, m_step
from .params import MixtureParams, decompose, from_covariances
from .structures import (
    FITTABLE,
    STRUCTURES,
    UNFITTABLE,
    UnfittableStructureError,
    bic,
    check_structure,
    cov_param_count,
    free_param_count,
)

__all__ = [
    "FITTABLE", "STRUCTURES", "UNFITTABLE",
    "DegenerateFitError", "FitResult", "MixtureParams", "UnfittableStructureError",
    "bic", "check_structure", "component_density", "cov_param_count", "decompose",
    "e_step", "em_fit", "farthest_point_kmeans", "free_param_count", "from_covariances",
    "log_component_density", "log_likelihood", "m_step", "mixture_log_density",
]
