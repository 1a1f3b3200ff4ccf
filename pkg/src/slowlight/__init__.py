"""Slow light, optical rotation, and storage in a warm three-level vapor."""

from . import dispersion, harness, lambda_atom, maxwell_bloch, polarimetry, vapor
from .dispersion import (
    MediumParams,
    Pulse,
    SusceptibilitySpectrum,
    analytic_susceptibility,
    eit_window,
    gaussian_pulse,
    group_delay,
    propagate_pulse,
    transfer_function,
)
from .lambda_atom import AtomSpec, DriveConfig, build_hamiltonian, evolve, steady_state
from .maxwell_bloch import (
    DetectorTrace,
    Grid1D,
    StorageProtocol,
    simulate,
    sir_scan,
    storage_efficiency,
)
from .vapor import CellConfig, Isotope, killian_density, rabi_from_power, zeeman_shift

__version__ = "0.1.0"

__all__ = [
    "AtomSpec",
    "CellConfig",
    "DetectorTrace",
    "DriveConfig",
    "Grid1D",
    "Isotope",
    "MediumParams",
    "Pulse",
    "StorageProtocol",
    "SusceptibilitySpectrum",
    "analytic_susceptibility",
    "build_hamiltonian",
    "dispersion",
    "eit_window",
    "evolve",
    "gaussian_pulse",
    "group_delay",
    "harness",
    "killian_density",
    "lambda_atom",
    "maxwell_bloch",
    "polarimetry",
    "propagate_pulse",
    "rabi_from_power",
    "simulate",
    "sir_scan",
    "steady_state",
    "storage_efficiency",
    "transfer_function",
    "vapor",
    "zeeman_shift",
]
