"""Spectra of -d^2/dx^2 - V on periodic and Dirichlet 1-D domains by
shooting and node counting, applied to the Morse index of rotationally
symmetric CMC tori in the 3-sphere."""

from .elliptic import EllipticModulus, complete_K, dn
from .torus import TorusParams, derive_params, potential, potential_range
from .integrator import SolutionTrace, integrate, integrate_batch, monodromy
from .spectrum import (
    EigenvalueRecord,
    SpectralProblem,
    Spectrum,
    discriminant,
    eigenfunction_samples,
    find_dirichlet_spectrum,
    find_spectrum,
)
from .oracle import constant_spectrum, fd_spectrum
from .morse import MorseReport, ell, lower_bound, morse_index, snap_known
from .catalog import (
    SurfaceSpec,
    evaluate_surface,
    load_catalog,
    load_report,
    save_report,
)

__version__ = "0.1.0"

__all__ = [
    "EllipticModulus",
    "complete_K",
    "dn",
    "TorusParams",
    "derive_params",
    "potential",
    "potential_range",
    "SolutionTrace",
    "integrate",
    "integrate_batch",
    "monodromy",
    "EigenvalueRecord",
    "SpectralProblem",
    "Spectrum",
    "discriminant",
    "eigenfunction_samples",
    "find_dirichlet_spectrum",
    "find_spectrum",
    "constant_spectrum",
    "fd_spectrum",
    "MorseReport",
    "ell",
    "lower_bound",
    "morse_index",
    "snap_known",
    "SurfaceSpec",
    "evaluate_surface",
    "load_catalog",
    "load_report",
    "save_report",
]
