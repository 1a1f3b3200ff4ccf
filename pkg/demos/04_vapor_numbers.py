#!/usr/bin/env python3
"""Back-of-the-envelope numbers for the warm-cell experiment.

Density versus temperature, Rabi frequencies from beam power, Zeeman
shifts per milligauss, and the transparency window they imply.
"""

import math

from slowlight import dispersion as dsp, vapor

print("Rb density from cell temperature:")
for celsius in (55, 65, 75, 87, 90):
    temp = 273.15 + celsius
    total = vapor.killian_density(temp)
    n87 = vapor.isotope_density(total, vapor.Isotope.RB87)
    print(f"  {celsius:3d} C: total {total:.2e} cm^-3, Rb87 share {n87:.2e} cm^-3")

print()
print("Rabi frequency for a 5 mm beam:")
for power in (2.5e-3, 1.0e-3, 0.25e-3):
    omega = vapor.rabi_from_power(power, 5e-3)
    print(f"  {power * 1e3:5.2f} mW -> {vapor.cyclic_mhz(omega):5.2f} MHz")

print()
print("Zeeman shift of the ground sublevels:")
for milligauss in (1, 2, 5, 10):
    shift = vapor.zeeman_shift(milligauss * 1e-7)
    print(f"  {milligauss:3d} mG -> {shift / (2 * math.pi) / 1e3:6.2f} kHz")

print()
lam = 794.987e-9
k = 2 * math.pi / lam
n87 = vapor.isotope_density(vapor.killian_density(360.15), vapor.Isotope.RB87)
kappa = vapor.kappa_from_density(n87 * 1e6, lam)
carrier = 2 * math.pi * vapor.C_LIGHT / lam
print("Transparency window at 87 C for the two beam powers:")
for power in (2.5e-3, 0.25e-3):
    omega = vapor.rabi_from_power(power, 5e-3)
    medium = dsp.MediumParams(kappa, vapor.GAMMA_D1, omega, 0.04, carrier)
    print(f"  {power * 1e3:5.2f} mW -> {dsp.eit_window(medium, k) / (2 * math.pi) / 1e3:6.1f} kHz")
