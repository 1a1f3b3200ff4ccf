"""Polarization bookkeeping: basis changes, rotation angle, PBS projection.

Circular basis convention: e_+ = (x - i y)/sqrt(2), e_- = (x + i y)/sqrt(2),
so E_+ = (E_x + i E_y)/sqrt(2) and E_- = (E_x - i E_y)/sqrt(2). An
x-polarized beam therefore splits into equal-magnitude sigma+/- components.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class JonesField:
    """Two complex amplitudes with a basis tag ('linear' or 'circular')."""

    a: complex   # E_x or E_+
    b: complex   # E_y or E_-
    basis: str = "linear"

    def __post_init__(self):
        if self.basis not in ("linear", "circular"):
            raise InvalidInputError(f"unknown basis {self.basis!r}")
        if not (np.isfinite(complex(self.a)) and np.isfinite(complex(self.b))):
            raise InvalidInputError("field amplitudes must be finite")

    def intensity(self) -> float:
        return abs(self.a) ** 2 + abs(self.b) ** 2

    def to_linear(self) -> "JonesField":
        if self.basis == "linear":
            return self
        ex, ey = circular_to_lin(self.a, self.b)
        return JonesField(ex, ey, "linear")

    def to_circular(self) -> "JonesField":
        if self.basis == "circular":
            return self
        ep, em = lin_to_circular(self.a, self.b)
        return JonesField(ep, em, "circular")


def lin_to_circular(e_x, e_y):
    """(E_x, E_y) -> (E_+, E_-); unitary, intensity preserving."""
    e_plus = (e_x + 1j * e_y) / SQRT2
    e_minus = (e_x - 1j * e_y) / SQRT2
    return e_plus, e_minus


def circular_to_lin(e_plus, e_minus):
    """(E_+, E_-) -> (E_x, E_y); inverse of lin_to_circular."""
    e_x = (e_plus + e_minus) / SQRT2
    e_y = (e_plus - e_minus) / (1j * SQRT2)
    return e_x, e_y


def rotation_angle(n_plus, n_minus, wavelength, length) -> float:
    """Polarization rotation (2 pi / lambda) (n+ - n-) L / 2 in radians."""
    if wavelength <= 0 or length <= 0:
        raise InvalidInputError("wavelength and length must be positive")
    return (2.0 * math.pi / wavelength) * (n_plus - n_minus) * length / 2.0


def project_ports(e_x, e_y, detector_axis_angle: float, extinction_ratio: float = 0.0):
    """(I_signal, I_control) for linear-basis amplitudes; array friendly.

    The signal port is the linear polarization along detector_axis_angle
    (radians from x); the control port is the orthogonal one. An extinction
    ratio mixes that fraction of the control reading into the signal
    reading (detector crosstalk; it does not remove power from the control
    port).
    """
    if extinction_ratio < 0:
        raise InvalidInputError("extinction ratio must be non-negative")
    c, s = math.cos(detector_axis_angle), math.sin(detector_axis_angle)
    amp_signal = e_x * c + e_y * s
    amp_control = -e_x * s + e_y * c
    i_signal = np.abs(amp_signal) ** 2
    i_control = np.abs(amp_control) ** 2
    return i_signal + extinction_ratio * i_control, i_control


def pbs_project(field: JonesField, detector_axis_angle: float, extinction_ratio: float = 0.0):
    """Splitter projection of a single Jones field; see project_ports."""
    lin = field.to_linear()
    return project_ports(lin.a, lin.b, detector_axis_angle, extinction_ratio)
