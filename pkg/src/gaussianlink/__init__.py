"""Gaussian quantum communication toolkit."""

from .core import (
    GaussianState,
    SymplecticMap,
    make_tmst,
    make_tmsv,
    negativity,
    log_negativity,
    purity,
    pt_symplectic_eigenvalue,
)

__all__ = [
    "GaussianState",
    "SymplecticMap",
    "make_tmsv",
    "make_tmst",
    "negativity",
    "log_negativity",
    "purity",
    "pt_symplectic_eigenvalue",
]

__version__ = "0.1.0"
