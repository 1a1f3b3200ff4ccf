import math

import numpy as np
import pytest

from slowlight import harness
from slowlight.errors import UsageError
from slowlight.harness import SweepConfig, fit_transparency_window, load_config, run_sweep

SLOWING_INI = """
[experiment]
kind = slowing
parameter = pulse_duration
values = 2e-6, 5e-6, 10e-6, 30e-6, 100e-6
seed = 3

[medium]
kappa = 0.0128413
gamma = 3.6128316e7
omega_c = {omega_c}
length = 0.04
wavelength = 794.987e-9

[pulse]
grid_points = 16384
span = 1.6e-3
"""

ROTATION_INI = """
[experiment]
kind = rotation_steady
parameter = b_field
values = {values}

[atom]
gamma = 5e4
gamma0 = 628.3185307

[cell]
density_per_cm3 = 1.657e10

[protocol]
control_level = 2.4e5
signal_cw_fraction = {signal_cw}
signal_phase = 0.0

[grid]
nz = 100

[detection]
extinction_ratio = 0.0
"""


def write_config(tmp_path, text, name="sweep.ini"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_shipped_configs_load():
    for name in ("fig2a", "fig2b", "fig3ai", "fig3bi", "fig4a"):
        cfg = load_config(name)
        assert cfg.kind in harness.KIND_COLUMNS
        assert len(cfg.values) >= 2


def test_config_validation(tmp_path):
    bad = SLOWING_INI.format(omega_c=2.6895e7).replace("kind = slowing", "kind = mystery")
    with pytest.raises(UsageError):
        load_config(write_config(tmp_path, bad))
    bad = SLOWING_INI.format(omega_c=2.6895e7).replace(
        "values = 2e-6, 5e-6, 10e-6, 30e-6, 100e-6", "values = 1e-6, 3e-6, 2e-6"
    )
    with pytest.raises(UsageError):
        load_config(write_config(tmp_path, bad))
    with pytest.raises(UsageError):
        load_config(tmp_path / "missing.ini")


def test_sweep_deterministic_and_worker_independent(tmp_path):
    path = write_config(tmp_path, SLOWING_INI.format(omega_c=2.6895e7))
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    out3 = tmp_path / "c.csv"
    run_sweep(path, out=out1)
    run_sweep(path, out=out2)
    run_sweep(path, out=out3, workers=2)
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes() == out3.read_bytes()


def test_sweep_spot_check_random_row(tmp_path):
    # re-running one randomly chosen grid point reproduces its row exactly
    path = write_config(tmp_path, SLOWING_INI.format(omega_c=2.6895e7))
    cfg = load_config(path)
    result = run_sweep(cfg, out=tmp_path / "sweep.csv")
    rng = np.random.default_rng(cfg.seed)
    index = int(rng.integers(len(cfg.values)))
    _, row, err = harness._run_point((cfg, index, 1.0))
    assert err is None
    assert row == result.rows[index]


def test_fit_recovers_injected_window(tmp_path):
    for target_hz in (50e3, 100e3):
        gamma = 3.6128316e7
        kappa = 0.0128413
        k = 2 * math.pi / 794.987e-9
        omega_c = math.sqrt(gamma * 2 * math.pi * target_hz * math.sqrt(kappa * k * 0.04))
        path = write_config(tmp_path, SLOWING_INI.format(omega_c=omega_c))
        out = tmp_path / f"sweep_{int(target_hz)}.csv"
        run_sweep(path, out=out)
        fit = fit_transparency_window(out)
        assert not fit.flagged
        assert fit.window_hz == pytest.approx(target_hz, rel=0.10)


def test_fit_flat_data_flagged():
    flat = np.array([[d, 0.0, 1.0, 1.0] for d in (2e-6, 5e-6, 1e-5, 3e-5, 1e-4)])
    fit = fit_transparency_window(flat)
    assert fit.flagged


def test_sweep_partial_failure_flags_row(tmp_path):
    # a 300 us pulse cannot be stored in this medium: that grid point
    # fails, the sweep continues, and the row is flagged
    text = """
[experiment]
kind = storage
parameter = pulse_duration
values = 10e-6, 300e-6

[atom]
gamma = 1.667e5
gamma0 = 628.3185307

[cell]
density_per_cm3 = 1.657e10

[protocol]
control_level = 2.3573e5
storage_time = 40e-6

[grid]
nz = 100
"""
    result = run_sweep(write_config(tmp_path, text), out=tmp_path / "failing.csv")
    assert len(result.failures) == 1
    assert result.rows[0][-1] == "ok"
    assert result.rows[1][-1] == "failed"
    data = harness.load_sweep_csv(tmp_path / "failing.csv")
    assert data[1, -1] == 0.0  # failed status


def test_rotation_steady_symmetry(tmp_path):
    values = "-8e-7, -4e-7, 4e-7, 8e-7"
    path = write_config(tmp_path, ROTATION_INI.format(values=values, signal_cw="0.0"))
    result = run_sweep(path, out=tmp_path / "rot.csv")
    rows = np.array([r[:-1] for r in result.rows], dtype=float)
    i_sig, rot = rows[:, 1], rows[:, 3]
    i_total = rows[:, 1] + rows[:, 2]
    assert abs(i_sig[0] - i_sig[3]) <= 1e-8 * i_total.max()
    assert abs(i_sig[1] - i_sig[2]) <= 1e-8 * i_total.max()
    assert rot[0] == pytest.approx(-rot[3], abs=1e-10 * max(1.0, abs(rot[0])))


def test_rotation_asymmetric_with_signal_present(tmp_path):
    # interference of the orthogonal signal light with the rotated control
    # breaks the B -> -B symmetry of the detected intensity
    values = "-8e-7, 8e-7"
    path = write_config(tmp_path, ROTATION_INI.format(values=values, signal_cw="0.05"))
    result = run_sweep(path, out=tmp_path / "rot_sig.csv")
    rows = np.array([r[:-1] for r in result.rows], dtype=float)
    i_minus, i_plus = rows[0, 1], rows[1, 1]
    assert abs(i_plus - i_minus) > 1e-4 * max(i_plus, i_minus)


def test_cli_exit_codes(tmp_path, capsys):
    from slowlight.cli import main

    assert main(["selftest"]) == 0
    assert main(["sweep", "no-such-config"]) == 1
    bad = tmp_path / "bad.ini"
    bad.write_text("[experiment]\nkind = mystery\nparameter = x\nvalues = 1, 2\n")
    assert main(["sweep", str(bad)]) == 1
    capsys.readouterr()


def test_cli_partial_failure_exit_code(tmp_path, capsys):
    from slowlight.cli import main

    text = """
[experiment]
kind = storage
parameter = pulse_duration
values = 10e-6, 300e-6

[atom]
gamma = 1.667e5
gamma0 = 628.3185307

[cell]
density_per_cm3 = 1.657e10

[protocol]
control_level = 2.3573e5
storage_time = 40e-6

[grid]
nz = 100
"""
    path = write_config(tmp_path, text, name="partial.ini")
    assert main(["sweep", str(path), "--out", str(tmp_path / "partial.csv")]) == 2
    captured = capsys.readouterr()
    assert "failed" in captured.err


def test_storage_sweep_over_field(tmp_path):
    # field-swept storage emits both subtraction variants per row
    text = """
[experiment]
kind = storage
parameter = b_field
values = 0.0, 4e-7

[atom]
gamma = 1.667e5
gamma0 = 628.3185307

[cell]
density_per_cm3 = 1.657e10

[protocol]
control_level = 2.3573e5
signal_duration = 10e-6
storage_time = 60e-6

[grid]
nz = 100
"""
    result = run_sweep(write_config(tmp_path, text), out=tmp_path / "bfield.csv")
    assert not result.failures
    for _, eta, eta_peakwise, store_peak, status in result.rows:
        assert status == "ok"
        assert 0.0 <= eta <= 1.0 and 0.0 <= eta_peakwise <= 1.0
        assert store_peak >= 0.0


def test_cli_sweep_and_fit(tmp_path, capsys):
    from slowlight.cli import main

    path = write_config(tmp_path, SLOWING_INI.format(omega_c=2.6895e7))
    out = tmp_path / "cli.csv"
    assert main(["sweep", str(path), "--out", str(out)]) == 0
    assert out.exists()
    assert main(["fit", str(out)]) == 0
    captured = capsys.readouterr()
    assert "window_hz" in captured.out


def test_grid_scale_flag(tmp_path):
    path = write_config(tmp_path, SLOWING_INI.format(omega_c=2.6895e7))
    coarse = run_sweep(path, out=tmp_path / "s1.csv", grid_scale=1.0)
    fine = run_sweep(path, out=tmp_path / "s2.csv", grid_scale=2.0)
    for row_c, row_f in zip(coarse.rows, fine.rows):
        assert row_f[1] == pytest.approx(row_c[1], rel=1e-3)  # delay stable


def test_programmatic_config_rejects_bad_grid():
    with pytest.raises(UsageError):
        SweepConfig(kind="slowing", parameter="x", values=(), options={})
    with pytest.raises(UsageError):
        SweepConfig(kind="nope", parameter="x", values=(1.0,), options={})
