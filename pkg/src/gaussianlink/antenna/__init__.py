"""Coplanar antenna design: scattering, optimization and error studies."""

from .backend import BACKEND_NAME
from .model import (
    ImpedanceProfile,
    ScatterResult,
    ansatz_impedance,
    ansatz_profile,
    antenna_output_state,
    antenna_reflectivity_threshold,
    cascade_and_unitarize,
    cpw_impedance,
    cpw_lc,
    cpw_theta_from_z,
    entanglement_through_antenna,
    fabrication_error_study,
    linear_profile,
    log_ratio_quadratic_fit,
    n_average,
    profile_reflectivity,
)
from .optimize import OptimizeResult, ansatz_reflectivity_sweep, fit_ansatz, optimize_profile

__all__ = [
    "BACKEND_NAME",
    "ImpedanceProfile",
    "ScatterResult",
    "ansatz_impedance",
    "ansatz_profile",
    "antenna_output_state",
    "antenna_reflectivity_threshold",
    "cascade_and_unitarize",
    "cpw_impedance",
    "cpw_lc",
    "cpw_theta_from_z",
    "entanglement_through_antenna",
    "fabrication_error_study",
    "linear_profile",
    "log_ratio_quadratic_fit",
    "n_average",
    "profile_reflectivity",
    "OptimizeResult",
    "ansatz_reflectivity_sweep",
    "fit_ansatz",
    "optimize_profile",
]
