"""Vapor-cell constants and conversions.

Rubidium number density from cell temperature (Killian's semi-empirical
formula, evaluated in its native cm^-3 / kelvin units), isotope abundance
scaling, Rabi frequency from beam power, Zeeman shift per field, and the
dimensionless density constant kappa = 3 N lambda^3 / (8 pi^2) used by the
dispersion formulas.

All public functions take and return SI quantities except where a unit is
spelled out in the name or docstring (densities are per cm^3 to match the
formula's native units; convert with PER_CM3_TO_PER_M3 at module boundaries).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import InvalidInputError

# Fundamental constants (SI)
C_LIGHT = 299_792_458.0            # m/s
HBAR = 1.054_571_817e-34           # J s
MU_B = 9.274_010_0657e-24          # J/T
MU_B_OVER_HBAR = MU_B / HBAR       # rad/s per tesla, ~8.794e10

PER_CM3_TO_PER_M3 = 1e6

# Shipped defaults. The same values are mirrored in data/constants.txt and
# can be reloaded from any file in that format via load_constants().
GAMMA_D1 = 2 * math.pi * 5.75e6        # Rb D1 excited-state decay rate (rad/s)
GAMMA0_DEFAULT = 2 * math.pi * 500.0   # ground (Zeeman) coherence decay (rad/s)
SATURATION_INTENSITY = 16.0            # Rb saturation intensity, 1.6 mW/cm^2 in W/m^2

TEMPERATURE_MIN = 273.0
TEMPERATURE_MAX = 500.0


class Isotope(Enum):
    RB85 = "Rb85"
    RB87 = "Rb87"


@dataclass(frozen=True)
class IsotopeData:
    """D1-line data for one rubidium isotope."""

    wavelength: float   # m
    abundance: float    # natural fraction
    transition: str

    def __post_init__(self):
        if not 0.0 < self.abundance < 1.0:
            raise InvalidInputError(f"abundance must be in (0, 1), got {self.abundance}")


ISOTOPES = {
    Isotope.RB85: IsotopeData(794.984e-9, 0.72, "5S1/2 F=3 -> 5P1/2 F=2"),
    Isotope.RB87: IsotopeData(794.987e-9, 0.28, "5S1/2 F=2 -> 5P1/2 F=1"),
}
assert abs(sum(d.abundance for d in ISOTOPES.values()) - 1.0) < 1e-12


@dataclass(frozen=True)
class CellConfig:
    """Geometry and operating point of the vapor cell."""

    length: float                 # m
    diameter: float               # m
    temperature: float            # K
    isotope: Isotope = Isotope.RB87
    buffer_gas_torr: float = 5.0  # recorded metadata only

    def __post_init__(self):
        if self.length <= 0 or self.diameter <= 0:
            raise InvalidInputError("cell length and diameter must be positive")
        if not TEMPERATURE_MIN <= self.temperature <= TEMPERATURE_MAX:
            raise InvalidInputError(
                f"temperature {self.temperature} K outside [{TEMPERATURE_MIN}, {TEMPERATURE_MAX}] K"
            )

    @property
    def isotope_data(self) -> IsotopeData:
        return ISOTOPES[self.isotope]


def killian_density(temperature: float) -> float:
    """Total Rb density in cm^-3 at a cell temperature in kelvin.

    N = 10^(10.55 - 4132/T) / (1.38e-16 T), T in K.
    """
    if not TEMPERATURE_MIN <= temperature <= TEMPERATURE_MAX:
        raise InvalidInputError(
            f"temperature {temperature} K outside [{TEMPERATURE_MIN}, {TEMPERATURE_MAX}] K"
        )
    return 10.0 ** (10.55 - 4132.0 / temperature) / (1.38e-16 * temperature)


def isotope_density(total_per_cm3: float, isotope: Isotope) -> float:
    """Abundance-scaled density (cm^-3) of one isotope."""
    if total_per_cm3 < 0:
        raise InvalidInputError("density must be non-negative")
    return total_per_cm3 * ISOTOPES[isotope].abundance


def rabi_from_power(
    power: float,
    beam_diameter: float,
    saturation_intensity: float = SATURATION_INTENSITY,
    gamma: float = GAMMA_D1,
) -> float:
    """Rabi frequency (rad/s) for a uniform-disk beam of given power.

    Omega = gamma * sqrt(I / (2 I_s)) with I = P / (pi (d/2)^2).
    """
    if power <= 0 or beam_diameter <= 0 or saturation_intensity <= 0 or gamma <= 0:
        raise InvalidInputError("power, diameter, saturation intensity, gamma must be positive")
    intensity = power / (math.pi * (beam_diameter / 2.0) ** 2)
    return gamma * math.sqrt(intensity / (2.0 * saturation_intensity))


def cyclic_mhz(omega: float) -> float:
    """rad/s -> cyclic MHz, for reporting."""
    return omega / (2 * math.pi) / 1e6


def zeeman_shift(b_field: float) -> float:
    """Ground-level shift magnitude mu_B B / hbar (rad/s) for |B| < 1 mT.

    The sign per level (+ on |+>, - on |->) is applied by lambda_atom.
    """
    if abs(b_field) >= 1e-3:
        raise InvalidInputError(f"|B| = {abs(b_field)} T exceeds the 1 mT model range")
    return MU_B_OVER_HBAR * abs(b_field)


def kappa_from_density(density_per_m3: float, wavelength: float) -> float:
    """kappa = 3 N lambda^3 / (8 pi^2), N in m^-3."""
    if density_per_m3 < 0 or wavelength <= 0:
        raise InvalidInputError("density must be >= 0 and wavelength > 0")
    return 3.0 * density_per_m3 * wavelength**3 / (8.0 * math.pi**2)


def kappa_from_cell(cell: CellConfig) -> float:
    """kappa for the addressed isotope of a cell at its operating temperature.

    Only the resonantly addressed isotope contributes, so the total Killian
    density is scaled by the isotope abundance before forming kappa.
    """
    n_iso_cm3 = isotope_density(killian_density(cell.temperature), cell.isotope)
    return kappa_from_density(n_iso_cm3 * PER_CM3_TO_PER_M3, cell.isotope_data.wavelength)


def load_constants(path: str | Path) -> dict[str, float]:
    """Load a plain-text constants table.

    Format: one ``key = value`` pair per line; ``#`` starts a comment; blank
    lines ignored. Values are floats. The shipped defaults live in
    ``slowlight/data/constants.txt``.
    """
    out: dict[str, float] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidInputError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            out[key] = float(value)
        except ValueError as exc:
            raise InvalidInputError(f"{path}:{lineno}: bad float {value!r}") from exc
    return out


def default_constants() -> dict[str, float]:
    """The embedded defaults, as load_constants would return them."""
    return {
        "gamma_rad_s": GAMMA_D1,
        "gamma0_rad_s": GAMMA0_DEFAULT,
        "saturation_intensity_w_m2": SATURATION_INTENSITY,
        "zeeman_rate_rad_s_t": MU_B_OVER_HBAR,
        "rb85_wavelength_m": ISOTOPES[Isotope.RB85].wavelength,
        "rb85_abundance": ISOTOPES[Isotope.RB85].abundance,
        "rb87_wavelength_m": ISOTOPES[Isotope.RB87].wavelength,
        "rb87_abundance": ISOTOPES[Isotope.RB87].abundance,
    }
