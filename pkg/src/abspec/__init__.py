"""Spectra of self-adjoint extensions of the Aharonov-Bohm Hamiltonian with a
homogeneous magnetic field."""

__version__ = "0.1.0"

from .abmodel import ModelParams
from .extensions import BoundaryCondition, RescaledBC, rescale
from .secular import SecularParams, find_roots, hinf_roots, series_root
from .spectrum import HINF, full_spectrum, sweep

__all__ = [
    "ModelParams",
    "BoundaryCondition",
    "RescaledBC",
    "rescale",
    "SecularParams",
    "find_roots",
    "hinf_roots",
    "series_root",
    "HINF",
    "full_spectrum",
    "sweep",
    "__version__",
]
