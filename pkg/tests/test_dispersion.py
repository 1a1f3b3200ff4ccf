import math

import numpy as np
import pytest

from slowlight import dispersion as dsp, vapor
from slowlight.dispersion import MediumParams, Pulse, SusceptibilitySpectrum, TransferFunction
from slowlight.errors import GridResolutionError, InvalidInputError

LAM = 794.987e-9
CARRIER = 2 * math.pi * vapor.C_LIGHT / LAM
K = 2 * math.pi / LAM


def warm_cell_medium(window_hz=50e3):
    """Warm-cell medium with the control set for the requested window."""
    n87 = vapor.isotope_density(vapor.killian_density(360.15), vapor.Isotope.RB87)
    kappa = vapor.kappa_from_density(n87 * 1e6, LAM)
    gamma = vapor.GAMMA_D1
    w = 2 * math.pi * window_hz
    omega_c = math.sqrt(gamma * w * math.sqrt(kappa * K * 0.04))
    return MediumParams(kappa, gamma, omega_c, 0.04, CARRIER)


# ---------------------------------------------------------------------------
# analytic susceptibility


def test_chi_zero_on_resonance():
    p = MediumParams(0.02, 1e6, 2e6, 0.04, CARRIER)
    assert dsp.analytic_susceptibility(0.0, p) == 0.0


def test_chi_purely_absorptive_at_omega_c():
    p = MediumParams(0.02, 1e6, 2e6, 0.04, CARRIER)
    assert dsp.analytic_susceptibility(2e6, p) == pytest.approx(0.02j, rel=1e-12)


def test_chi_hand_evaluation():
    # delta = gamma, omega_c = 2 gamma -> kappa (3 + i) / 10
    p = MediumParams(0.02, 1e6, 2e6, 0.04, CARRIER)
    assert dsp.analytic_susceptibility(1e6, p) == pytest.approx(0.02 * (3 + 1j) / 10, rel=1e-12)


def test_chi_antisymmetry_and_passivity():
    p = warm_cell_medium()
    grid = np.linspace(-5 * p.gamma, 5 * p.gamma, 1001)
    chi = dsp.analytic_susceptibility(grid, p)
    np.testing.assert_allclose(chi, -np.conj(chi[::-1]), atol=1e-12 * np.max(np.abs(chi)))
    assert chi.imag.min() >= -1e-15


def test_spectrum_validation():
    with pytest.raises(InvalidInputError):
        SusceptibilitySpectrum(np.array([0.0, 1.0, 0.5]), np.zeros(3, complex))
    with pytest.raises(InvalidInputError):  # passivity
        SusceptibilitySpectrum(np.array([0.0, 1.0, 2.0]), np.array([0, -1e-6j, 0]))


# ---------------------------------------------------------------------------
# index, absorption, transmission


def test_index_absorption_values():
    n, alpha = dsp.index_absorption(0.0, CARRIER)
    assert (n, alpha) == (1.0, 0.0)
    n, alpha = dsp.index_absorption(0.01, CARRIER)
    assert n == pytest.approx(1.005, rel=1e-12)
    assert alpha == 0.0
    kappa = vapor.kappa_from_density(1e18, LAM)  # N = 1e12 cm^-3
    _, alpha = dsp.index_absorption(1j * kappa, CARRIER)
    assert alpha == pytest.approx(math.pi * kappa / LAM, rel=1e-12)
    assert alpha == pytest.approx(7.5e4, rel=0.02)


def test_index_absorption_warns_outside_dilute_regime():
    with pytest.warns(UserWarning):
        dsp.index_absorption(0.5, CARRIER)


def test_transmission_values():
    assert dsp.transmission(0.0, 0.04) == 1.0
    assert dsp.transmission(math.log(2) / (2 * 0.04), 0.04) == pytest.approx(0.5, rel=1e-12)
    assert dsp.transmission(7.5e4, 0.04) == 0.0  # exp(-6000) underflows to 0


# ---------------------------------------------------------------------------
# group delay and window


def test_group_delay_control_scaling():
    p = warm_cell_medium()
    strong = MediumParams(p.kappa, p.gamma, 1e3 * p.omega_c, p.length, p.carrier)
    assert dsp.group_delay(strong) <= 1e-6 * dsp.group_delay(p) * (1 + 1e-12)


def test_group_delay_linear_in_density():
    p = warm_cell_medium()
    doubled = MediumParams(2 * p.kappa, p.gamma, p.omega_c, p.length, p.carrier)
    assert dsp.group_delay(doubled) == pytest.approx(2 * dsp.group_delay(p), rel=1e-12)


def test_group_delay_central_difference_oracle():
    p = warm_cell_medium()
    grid = np.linspace(-1e-3 * p.omega_c, 1e-3 * p.omega_c, 41)
    spectrum = dsp.sample_susceptibility(p, grid)
    numeric = dsp.group_delay_from_spectrum(spectrum, p.length, p.carrier, reference=p)
    assert numeric == pytest.approx(dsp.group_delay(p), rel=1e-6)


def test_group_delay_coarse_grid_raises():
    p = warm_cell_medium()
    grid = np.linspace(-3 * p.omega_c, 3 * p.omega_c, 7)
    spectrum = dsp.sample_susceptibility(p, grid)
    with pytest.raises(GridResolutionError):
        dsp.group_delay_from_spectrum(spectrum, p.length, p.carrier, reference=p)


def test_eit_window_scaling_and_ratio():
    p = warm_cell_medium()
    doubled = MediumParams(p.kappa, p.gamma, 2 * p.omega_c, p.length, p.carrier)
    assert dsp.eit_window(doubled, K) == pytest.approx(4 * dsp.eit_window(p, K), rel=1e-12)
    w12 = MediumParams(p.kappa, p.gamma, 2 * math.pi * 12e6, p.length, p.carrier)
    w38 = MediumParams(p.kappa, p.gamma, 2 * math.pi * 3.8e6, p.length, p.carrier)
    ratio = dsp.eit_window(w12, K) / dsp.eit_window(w38, K)
    assert ratio == pytest.approx((12.0 / 3.8) ** 2, abs=1e-9)
    assert ratio == pytest.approx(9.97, abs=0.01)


def test_eit_window_strong_beam_bracket():
    # warm cell with the 12 MHz strong-beam estimate; generous bracket
    # since the exact operating density varies
    p = warm_cell_medium()
    strong = MediumParams(p.kappa, p.gamma, 2 * math.pi * 12e6, p.length, p.carrier)
    window_hz = dsp.eit_window(strong, K) / (2 * math.pi)
    assert 100e3 <= window_hz <= 600e3


# ---------------------------------------------------------------------------
# transfer function and propagation


def _full_band_transfer(params, pulse):
    nyquist = math.pi / pulse.dt
    return dsp.analytic_transfer(params, np.linspace(-nyquist, nyquist, pulse.times.size + 1))


def test_transfer_identity_for_zero_chi():
    grid = np.linspace(-1e6, 1e6, 101)
    spec = SusceptibilitySpectrum(grid, np.zeros_like(grid, dtype=complex))
    p = warm_cell_medium()
    tf = dsp.transfer_function(spec, p)
    np.testing.assert_allclose(tf.values, 1.0, atol=1e-15)


def test_transfer_constant_absorption():
    p = warm_cell_medium()
    grid = np.linspace(-1e6, 1e6, 101)
    spec = SusceptibilitySpectrum(grid, np.full(101, 1e-8j))
    tf = dsp.transfer_function(spec, p)
    expected = math.exp(-p.carrier * 1e-8 * p.length / (2 * vapor.C_LIGHT))
    np.testing.assert_allclose(np.abs(tf.values), expected, rtol=1e-12)


def test_propagate_identity():
    pulse = dsp.gaussian_pulse(10e-6)
    nyq = math.pi / pulse.dt
    tf = TransferFunction(np.linspace(-nyq, nyq, 257), np.ones(257, complex))
    out, metrics = dsp.propagate_pulse(pulse, tf)
    np.testing.assert_allclose(out.envelope, pulse.envelope, atol=1e-12)
    assert abs(metrics.delay) < 1e-12
    assert metrics.peak_ratio == pytest.approx(1.0, abs=1e-9)


def test_propagate_pure_delay():
    pulse = dsp.gaussian_pulse(10e-6)
    nyq = math.pi / pulse.dt
    grid = np.linspace(-nyq, nyq, pulse.times.size + 1)
    t_delay = 7.3e-6
    tf = TransferFunction(grid, np.exp(1j * grid * t_delay))
    _, metrics = dsp.propagate_pulse(pulse, tf)
    assert metrics.delay == pytest.approx(t_delay, abs=pulse.dt)
    assert metrics.width_ratio == pytest.approx(1.0, rel=1e-6)


def test_phase_ramp_identity_from_chi_slope():
    # pure-real linear chi'(delta) with slope s delays by (omega/2)(L/c) s
    p = warm_cell_medium()
    slope = 1e-12
    pulse = dsp.gaussian_pulse(10e-6)
    nyq = math.pi / pulse.dt
    grid = np.linspace(-nyq, nyq, pulse.times.size + 1)
    spec = SusceptibilitySpectrum(grid, slope * grid + 0j)
    tf = dsp.transfer_function(spec, p)
    _, metrics = dsp.propagate_pulse(pulse, tf)
    expected = (p.carrier / 2.0) * (p.length / vapor.C_LIGHT) * slope
    assert metrics.delay == pytest.approx(expected, rel=1e-6)


def test_propagate_dense_grid_oracle():
    # 10 us pulse through the 50 kHz window vs a 10x denser rerun
    p = warm_cell_medium(50e3)
    base = dsp.gaussian_pulse(10e-6, span=1.6e-3, n=16384)
    dense = dsp.gaussian_pulse(10e-6, span=1.6e-3, n=163840)
    _, m1 = dsp.propagate_pulse(base, _full_band_transfer(p, base))
    _, m2 = dsp.propagate_pulse(dense, _full_band_transfer(p, dense))
    assert m1.width_ratio == pytest.approx(m2.width_ratio, rel=5e-3)
    assert m1.peak_ratio == pytest.approx(m2.peak_ratio, rel=5e-3)
    assert m1.delay == pytest.approx(m2.delay, rel=5e-3)


def test_propagate_energy_bound():
    p = warm_cell_medium(50e3)
    pulse = dsp.gaussian_pulse(5e-6, span=1.6e-3, n=16384)
    _, metrics = dsp.propagate_pulse(pulse, _full_band_transfer(p, pulse))
    assert metrics.energy_out <= metrics.energy_in * (1 + 1e-12)


def test_propagate_bandwidth_leakage_error():
    pulse = dsp.gaussian_pulse(2e-6)
    tf = TransferFunction(np.linspace(-1e5, 1e5, 64), np.ones(64, complex))
    with pytest.raises(GridResolutionError):
        dsp.propagate_pulse(pulse, tf)


def test_broadening_and_delay_saturation():
    # width ratio non-increasing -> 1, delay non-decreasing and saturating
    p = warm_cell_medium(50e3)
    durations = (2e-6, 5e-6, 10e-6, 30e-6, 100e-6)
    widths, delays = [], []
    for duration in durations:
        pulse = dsp.gaussian_pulse(duration, span=1.6e-3, n=16384)
        _, metrics = dsp.propagate_pulse(pulse, _full_band_transfer(p, pulse))
        widths.append(metrics.width_ratio)
        delays.append(metrics.delay)
    assert all(a >= b for a, b in zip(widths, widths[1:]))
    assert widths[-1] <= 1.05
    assert all(a <= b for a, b in zip(delays, delays[1:]))
    assert abs(delays[-1] - delays[-2]) <= 0.05 * delays[-1]


def test_pulse_validation():
    with pytest.raises(InvalidInputError):
        dsp.gaussian_pulse(-1.0)
    with pytest.raises(InvalidInputError):  # span below 8 durations
        Pulse(times=np.linspace(0, 1e-5, 64), envelope=np.zeros(64), duration=1e-5)
    with pytest.raises(InvalidInputError):
        Pulse(times=np.linspace(0, 1, 64), envelope=np.full(64, np.nan))


def test_csv_round_trips(tmp_path):
    p = warm_cell_medium()
    grid = np.linspace(-1e6, 1e6, 65)
    spectrum = dsp.sample_susceptibility(p, grid)
    path = tmp_path / "spectrum.csv"
    dsp.spectrum_to_csv(spectrum, path)
    header = path.read_text().splitlines()[0]
    assert header == "detuning_hz,re,im"
    back = dsp.spectrum_from_csv(path)
    np.testing.assert_allclose(back.detunings, spectrum.detunings, rtol=1e-8)
    np.testing.assert_allclose(back.chi, spectrum.chi, rtol=1e-6, atol=1e-12)

    pulse = dsp.gaussian_pulse(10e-6, n=256)
    path = tmp_path / "pulse.csv"
    dsp.pulse_to_csv(pulse, path)
    back = dsp.pulse_from_csv(path)
    np.testing.assert_allclose(back.envelope, pulse.envelope, atol=1e-6)
