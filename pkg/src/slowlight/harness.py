"""Configuration-driven sweeps that regenerate the figure datasets.

A sweep is described by an INI file (plain-text key-value sections, see the
shipped configs under slowlight/configs). Five experiment kinds exist:

``slowing``
    Gaussian pulses of swept duration through the analytic transparency
    transfer function; emits delay, width ratio, and peak ratio per
    duration.
``storage``
    Full switched-control storage runs; emits the efficiency (trace-wise
    leakage subtraction) and the peak-wise variant per swept value
    (pulse_duration, gamma0, storage_time, or b_field).
``rotation_steady``
    Steady-state control-only transmission versus magnetic field; emits
    the detector-port intensities and the polarization rotation angle.
``sir``
    Switch-induced-rotation peak after control re-on versus magnetic
    field, with no signal pulse.
``delay_vs_density``
    Weak-probe slowing delay versus atomic density with the control always
    on.

Output is CSV with '#'-prefixed header comments (schema version, kind,
column list, config digest), one row per grid point, nine significant
digits, rows ordered by grid index. Identical configs produce byte-identical
files. Solver failures flag the row (status column) and the sweep continues.

Storage-protocol timing is derived per grid point: the pulse center sits at
2.4 durations, and the control switches off at center + T_g - off_lead
durations, where T_g is the analytic group delay of the configured medium,
so the stored pulse sits just short of the exit for every duration.
"""

from __future__ import annotations

import hashlib
import io
import math
from concurrent.futures import ProcessPoolExecutor
from configparser import ConfigParser
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.optimize import least_squares

from . import dispersion, maxwell_bloch, polarimetry, vapor
from .dispersion import MediumParams, analytic_params_from_atom
from .errors import FitFailureError, InvalidInputError, SlowlightError, UsageError
from .lambda_atom import AtomSpec
from .maxwell_bloch import Grid1D, StorageProtocol
from .vapor import CellConfig, Isotope

SCHEMA = "slowlight-sweep-v1"

KIND_COLUMNS = {
    "slowing": ("pulse_duration_s", "delay_s", "width_ratio", "peak_ratio", "status"),
    "storage": ("value", "eta", "eta_peakwise", "store_peak", "status"),
    "rotation_steady": ("b_tesla", "i_signal", "i_control", "rotation_rad", "status"),
    "sir": ("b_tesla", "sir_peak", "status"),
    "delay_vs_density": ("density_per_cm3", "delay_s", "width_ratio", "status"),
}

STORAGE_PARAMETERS = ("pulse_duration", "gamma0", "storage_time", "b_field")


@dataclass(frozen=True)
class SweepConfig:
    """Parsed sweep description."""

    kind: str
    parameter: str
    values: tuple[float, ...]
    options: dict           # {section: {key: str}}
    seed: int = 0
    source_text: str = ""   # canonical text used for the output digest

    def __post_init__(self):
        if self.kind not in KIND_COLUMNS:
            raise UsageError(
                f"unknown experiment kind {self.kind!r}; expected one of {sorted(KIND_COLUMNS)}"
            )
        if len(self.values) == 0:
            raise UsageError("sweep grid is empty")
        diffs = np.diff(self.values)
        if len(self.values) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise UsageError("sweep grid must be strictly monotone")

    def digest(self) -> str:
        return hashlib.sha256(self.source_text.encode()).hexdigest()[:16]


def shipped_config_path(name: str) -> Path:
    """Resolve a shipped config name (fig2a, fig2b, fig3ai, fig3bi, fig4a)."""
    candidate = resources.files("slowlight").joinpath(f"configs/{name}.ini")
    with resources.as_file(candidate) as path:
        if not path.exists():
            raise UsageError(f"no shipped config named {name!r}")
        return Path(path)


def load_config(path_or_name: str | Path) -> SweepConfig:
    path = Path(path_or_name)
    if not path.exists() and not str(path_or_name).endswith(".ini"):
        path = shipped_config_path(str(path_or_name))
    if not path.exists():
        raise UsageError(f"config file {path} not found")
    text = path.read_text()
    parser = ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string(text)
    if not parser.has_section("experiment"):
        raise UsageError("config needs an [experiment] section")
    exp = parser["experiment"]
    try:
        raw = exp["values"]
        if raw.startswith("linspace:"):
            start, stop, count = raw.split(":")[1:]
            values = tuple(np.linspace(float(start), float(stop), int(count)))
        else:
            values = tuple(float(v) for v in raw.replace(",", " ").split())
    except (KeyError, ValueError) as exc:
        raise UsageError(f"bad or missing 'values' in [experiment]: {exc}") from exc
    options = {s: dict(parser[s]) for s in parser.sections() if s != "experiment"}
    return SweepConfig(
        kind=exp.get("kind", ""),
        parameter=exp.get("parameter", ""),
        values=values,
        options=options,
        seed=int(exp.get("seed", "0")),
        source_text=text,
    )


def _opt(options, section, key, default=None, cast=float):
    raw = options.get(section, {}).get(key)
    if raw is None:
        if default is None:
            raise UsageError(f"config is missing [{section}] {key}")
        return default
    return cast(raw)


def _medium_from_config(options) -> MediumParams:
    return MediumParams(
        kappa=_opt(options, "medium", "kappa"),
        gamma=_opt(options, "medium", "gamma"),
        omega_c=_opt(options, "medium", "omega_c"),
        length=_opt(options, "medium", "length"),
        carrier=2 * math.pi * vapor.C_LIGHT / _opt(options, "medium", "wavelength"),
    )


def _atom_from_config(options) -> AtomSpec:
    branch_plus = _opt(options, "atom", "branch_plus", 0.5)
    return AtomSpec(
        gamma=_opt(options, "atom", "gamma", vapor.GAMMA_D1),
        branch_plus=branch_plus,
        branch_minus=_opt(options, "atom", "branch_minus", 1.0 - branch_plus),
        gamma0=_opt(options, "atom", "gamma0", vapor.GAMMA0_DEFAULT),
        zeeman_rate=_opt(options, "atom", "zeeman_rate", vapor.MU_B_OVER_HBAR),
    )


def _cell_from_config(options) -> CellConfig:
    return CellConfig(
        length=_opt(options, "cell", "length", 0.04),
        diameter=_opt(options, "cell", "diameter", 0.02),
        temperature=_opt(options, "cell", "temperature", 360.15),
        isotope=Isotope(_opt(options, "cell", "isotope", "Rb87", cast=str)),
    )


def _grid_from_config(options, grid_scale: float) -> Grid1D:
    grid = Grid1D(
        nz=int(_opt(options, "grid", "nz", 200)),
        dt=_opt(options, "grid", "dt", 0.0) or None,
    )
    return grid.scaled(grid_scale) if grid_scale != 1.0 else grid


def _protocol_from_config(options, duration, cell, atom, kappa) -> StorageProtocol:
    """Protocol with per-duration auto timing (see module docstring)."""
    control_level = _opt(options, "protocol", "control_level")
    peak_fraction = _opt(options, "protocol", "signal_peak_fraction", 0.1)
    off_lead = _opt(options, "protocol", "off_lead", 1.5)
    center = 2.4 * duration
    # The y-polarized signal probes the dark state of the full x control
    # field, so the effective control Rabi frequency is control_level
    # itself (not the per-circular-component amplitude).
    params = analytic_params_from_atom(
        atom.gamma, control_level, kappa,
        cell.length, cell.isotope_data.wavelength,
    )
    t_g = dispersion.group_delay(params)
    off = center + t_g - off_lead * duration
    if off <= center:
        raise UsageError(
            f"group delay {t_g:.3e} s too short to store a {duration:.3e} s pulse"
        )
    return StorageProtocol(
        signal_duration=duration,
        signal_peak=peak_fraction * control_level,
        signal_center=center,
        control_level=control_level,
        control_off_time=off,
        storage_time=_opt(options, "protocol", "storage_time", 130e-6),
        rise_time=_opt(options, "protocol", "rise_time", 1e-6),
        signal_phase=_opt(options, "protocol", "signal_phase", 0.0),
        circular_imbalance=_opt(options, "protocol", "circular_imbalance", 0.0),
    )


# ---------------------------------------------------------------------------
# Per-point experiment implementations. Each returns a tuple of floats in
# the kind's column order (without the trailing status column).

def _point_slowing(value, cfg: SweepConfig, grid_scale):
    medium = _medium_from_config(cfg.options)
    n = int(round(_opt(cfg.options, "pulse", "grid_points", 16384) * grid_scale))
    span = _opt(cfg.options, "pulse", "span", 16.0 * max(cfg.values))
    pulse = dispersion.gaussian_pulse(value, peak=1.0, center=span / 3.0, span=span, n=n)
    nyquist = math.pi / pulse.dt
    grid = np.linspace(-nyquist, nyquist, n + 1)
    transfer = dispersion.analytic_transfer(medium, grid)
    _, metrics = dispersion.propagate_pulse(pulse, transfer)
    return (value, metrics.delay, metrics.width_ratio, metrics.peak_ratio)


def _point_storage(value, cfg: SweepConfig, grid_scale):
    atom = _atom_from_config(cfg.options)
    cell = _cell_from_config(cfg.options)
    kappa = _kappa_from_config(cfg.options, cell)
    duration = _opt(cfg.options, "protocol", "signal_duration", 10e-6)
    b_field = _opt(cfg.options, "field", "b", 0.0)
    if cfg.parameter == "pulse_duration":
        duration = value
    elif cfg.parameter == "gamma0":
        atom = replace(atom, gamma0=value)
    elif cfg.parameter == "b_field":
        b_field = value
    protocol = _protocol_from_config(cfg.options, duration, cell, atom, kappa)
    if cfg.parameter == "storage_time":
        protocol = replace(protocol, storage_time=value)
    grid = _grid_from_config(cfg.options, grid_scale)
    extinction = _opt(cfg.options, "detection", "extinction_ratio", 1e-4)
    kwargs = dict(grid=grid, extinction_ratio=extinction, kappa=kappa)
    trace = maxwell_bloch.simulate(protocol, cell, atom, b_field, **kwargs)
    leak = maxwell_bloch.leakage_reference(protocol, cell, atom, b_field, **kwargs)
    result = maxwell_bloch.storage_efficiency(trace, protocol, leak)
    window = trace.times >= protocol.control_on_again
    store_peak = float(trace.i_signal[window].max())
    peakwise = max(0.0, store_peak - float(leak.i_signal[window].max()))
    eta_peakwise = min(1.0, peakwise / protocol.signal_peak**2)
    return (value, result.eta, eta_peakwise, store_peak)


def _point_rotation_steady(value, cfg: SweepConfig, grid_scale):
    atom = _atom_from_config(cfg.options)
    cell = _cell_from_config(cfg.options)
    kappa = _kappa_from_config(cfg.options, cell)
    control_level = _opt(cfg.options, "protocol", "control_level")
    signal_cw = _opt(cfg.options, "protocol", "signal_cw_fraction", 0.0) * control_level
    phase = _opt(cfg.options, "protocol", "signal_phase", 0.0)
    imbalance = _opt(cfg.options, "protocol", "circular_imbalance", 0.0)
    extinction = _opt(cfg.options, "detection", "extinction_ratio", 1e-4)
    nz = _grid_from_config(cfg.options, grid_scale).nz

    s = signal_cw * np.exp(1j * phase)
    om_p0 = math.sqrt(1 + imbalance) * (control_level + 1j * s) / math.sqrt(2)
    om_m0 = math.sqrt(1 - imbalance) * (control_level - 1j * s) / math.sqrt(2)
    _, omp, omm = maxwell_bloch.steady_transmission(
        atom, value, om_p0, om_m0, cell, nz=nz, kappa=kappa
    )
    e_x, e_y = polarimetry.circular_to_lin(omp[-1], omm[-1])
    i_sig, i_ctrl = polarimetry.project_ports(e_x, e_y, math.pi / 2, extinction)
    rotation = 0.5 * (
        np.angle(omp[-1] / om_p0) - np.angle(omm[-1] / om_m0)
    )
    return (value, float(i_sig), float(i_ctrl), float(rotation))


def _point_sir(value, cfg: SweepConfig, grid_scale):
    atom = _atom_from_config(cfg.options)
    cell = _cell_from_config(cfg.options)
    kappa = _kappa_from_config(cfg.options, cell)
    control_level = _opt(cfg.options, "protocol", "control_level")
    duration = _opt(cfg.options, "protocol", "signal_duration", 10e-6)
    off_time = _opt(cfg.options, "protocol", "off_time", 30e-6)
    protocol = StorageProtocol(
        signal_duration=duration,
        signal_peak=0.0,
        signal_center=off_time / 2.0,
        control_level=control_level,
        control_off_time=off_time,
        storage_time=_opt(cfg.options, "protocol", "storage_time", 130e-6),
        rise_time=_opt(cfg.options, "protocol", "rise_time", 1e-6),
    )
    observe = _opt(cfg.options, "protocol", "observe_time", 60e-6)
    grid = _grid_from_config(cfg.options, grid_scale)
    peak = maxwell_bloch.sir_peak(
        float(value), protocol, cell, atom, grid=grid,
        t_end=protocol.control_on_again + observe, kappa=kappa,
    )
    return (value, peak)


def _point_delay_vs_density(value, cfg: SweepConfig, grid_scale):
    atom = _atom_from_config(cfg.options)
    cell = _cell_from_config(cfg.options)
    kappa = vapor.kappa_from_density(
        value * vapor.PER_CM3_TO_PER_M3, cell.isotope_data.wavelength
    )
    control_level = _opt(cfg.options, "protocol", "control_level")
    duration = _opt(cfg.options, "protocol", "signal_duration", 100e-6)
    peak_fraction = _opt(cfg.options, "protocol", "signal_peak_fraction", 0.02)
    params = analytic_params_from_atom(
        atom.gamma, control_level, kappa,
        cell.length, cell.isotope_data.wavelength,
    )
    t_g = dispersion.group_delay(params)
    center = 2.4 * duration
    protocol = StorageProtocol(
        signal_duration=duration,
        signal_peak=peak_fraction * control_level,
        signal_center=center,
        control_level=control_level,
    )
    grid = _grid_from_config(cfg.options, grid_scale)
    trace = maxwell_bloch.simulate(
        protocol, cell, atom,
        b_field=_opt(cfg.options, "field", "b", 0.0),
        t_end=center + t_g + 3.0 * duration,
        grid=grid, extinction_ratio=0.0, kappa=kappa,
    )
    delay = maxwell_bloch.signal_delay(trace, protocol)
    fwhm = maxwell_bloch.trace_fwhm(trace)
    return (value, delay, fwhm / duration)


def _kappa_from_config(options, cell) -> float:
    density = _opt(options, "cell", "density_per_cm3", 0.0)
    if density > 0:
        return vapor.kappa_from_density(
            density * vapor.PER_CM3_TO_PER_M3, cell.isotope_data.wavelength
        )
    return vapor.kappa_from_cell(cell)


_POINT_RUNNERS = {
    "slowing": _point_slowing,
    "storage": _point_storage,
    "rotation_steady": _point_rotation_steady,
    "sir": _point_sir,
    "delay_vs_density": _point_delay_vs_density,
}


def _run_point(payload):
    cfg, index, grid_scale = payload
    value = cfg.values[index]
    try:
        row = _POINT_RUNNERS[cfg.kind](value, cfg, grid_scale)
        return index, row + ("ok",), None
    except (SlowlightError, FloatingPointError, np.linalg.LinAlgError) as exc:
        nan_row = (value,) + (math.nan,) * (len(KIND_COLUMNS[cfg.kind]) - 2)
        return index, nan_row + ("failed",), f"{type(exc).__name__}: {exc}"


@dataclass
class SweepResult:
    path: Path
    rows: list
    failures: list   # (index, message)


def run_sweep(
    config: SweepConfig | str | Path,
    out: str | Path | None = None,
    workers: int = 1,
    grid_scale: float = 1.0,
) -> SweepResult:
    """Execute a sweep and write its CSV dataset.

    Grid points are independent; with workers > 1 they are dispatched to a
    process pool and re-ordered by grid index, so the output does not
    depend on the worker count.
    """
    cfg = config if isinstance(config, SweepConfig) else load_config(config)
    if cfg.kind == "storage" and cfg.parameter not in STORAGE_PARAMETERS:
        raise UsageError(
            f"storage sweeps accept parameters {STORAGE_PARAMETERS}, got {cfg.parameter!r}"
        )
    out = Path(out) if out is not None else Path(f"{cfg.kind}_sweep.csv")
    payloads = [(cfg, i, grid_scale) for i in range(len(cfg.values))]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, payloads))
    else:
        results = [_run_point(p) for p in payloads]
    results.sort(key=lambda item: item[0])
    rows = [row for _, row, _ in results]
    failures = [(i, msg) for i, _, msg in results if msg is not None]

    columns = KIND_COLUMNS[cfg.kind]
    buf = io.StringIO()
    buf.write(f"# {SCHEMA}\n")
    buf.write(f"# kind={cfg.kind} parameter={cfg.parameter}\n")
    buf.write(f"# config_digest={cfg.digest()} seed={cfg.seed}\n")
    buf.write("# columns=" + ",".join(columns) + "\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        cells = [f"{v:.9g}" if isinstance(v, (int, float)) else str(v) for v in row]
        buf.write(",".join(cells) + "\n")
    out.write_text(buf.getvalue())
    return SweepResult(path=out, rows=rows, failures=failures)


def load_sweep_csv(path) -> np.ndarray:
    """Numeric columns of a sweep CSV (failed rows become NaN)."""
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        cells = line.split(",")
        try:
            float(cells[0])
        except ValueError:
            continue  # header row
        rows.append(
            [float(c) if c not in ("ok", "failed") else math.nan for c in cells[:-1]]
            + [1.0 if cells[-1] == "ok" else 0.0]
        )
    if not rows:
        raise InvalidInputError(f"{path} contains no data rows")
    return np.array(rows)


# ---------------------------------------------------------------------------
# Transparency-window fit

@dataclass(frozen=True)
class FitResult:
    window_hz: float
    residual: float
    flagged: bool = False


def _broadening_model(durations, window):
    sigma = dispersion.FWHM_TO_SIGMA * np.asarray(durations)
    ratio = np.sqrt(1.0 + 1.0 / (sigma * window) ** 2)
    return ratio, 1.0 / ratio**2


def fit_transparency_window(dataset) -> FitResult:
    """Least-squares window width from a slowing sweep.

    The model is the closed-form response of a Gaussian pulse to the
    near-resonance transparency profile exp(-(delta/W)^2): width ratio
    sqrt(1 + 1/(sigma W)^2) and peak ratio its inverse square, with W the
    single fitted parameter, reported in cyclic Hz. Data that show no
    broadening are unidentifiable and come back flagged.
    """
    if isinstance(dataset, (str, Path)):
        data = load_sweep_csv(dataset)[:, :4]
    else:
        data = np.asarray(dataset, dtype=float)
    if data.ndim != 2 or data.shape[0] < 4:
        raise InvalidInputError("need at least 4 duration points to fit the window")
    durations = data[:, 0]
    width_ratio = data[:, 2]
    peak_ratio = data[:, 3]
    good = np.isfinite(width_ratio) & np.isfinite(peak_ratio)
    if good.sum() < 4:
        raise InvalidInputError("need at least 4 finite rows to fit the window")
    durations, width_ratio, peak_ratio = durations[good], width_ratio[good], peak_ratio[good]

    sigma_min = dispersion.FWHM_TO_SIGMA * durations.min()
    r_max = width_ratio.max()
    if r_max > 1.01:
        w0 = 1.0 / (sigma_min * math.sqrt(r_max**2 - 1.0))
    else:
        w0 = 10.0 / sigma_min

    def residuals(log_w):
        r_model, p_model = _broadening_model(durations, math.exp(log_w[0]))
        return np.concatenate([r_model - width_ratio, p_model - peak_ratio])

    result = least_squares(residuals, x0=[math.log(w0)], method="lm", max_nfev=400)
    window = math.exp(float(result.x[0]))
    if not result.success:
        raise FitFailureError(
            f"window fit did not converge: {result.message}",
            best_value=window / (2 * math.pi),
        )
    flagged = window * sigma_min > 10.0
    return FitResult(
        window_hz=window / (2 * math.pi),
        residual=float(np.linalg.norm(result.fun)),
        flagged=flagged,
    )


# ---------------------------------------------------------------------------
# Self test

def selftest(verbose=True) -> int:
    """Fast end-to-end sanity checks; returns a process exit code."""
    checks = []

    def record(name, ok):
        checks.append((name, ok))
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}")

    n65 = vapor.killian_density(338.0)
    record("killian density 338 K", abs(n65 - 0.46e12) < 0.1 * 0.46e12)
    ratio = dispersion.eit_window(
        MediumParams(0.0128, 1.0, 12.0, 0.04, 2.37e15), 7.9e6
    ) / dispersion.eit_window(MediumParams(0.0128, 1.0, 3.8, 0.04, 2.37e15), 7.9e6)
    record("window scaling (12/3.8)^2", abs(ratio - (12.0 / 3.8) ** 2) < 1e-9)
    ep, em = polarimetry.lin_to_circular(1.0, 0.0)
    ex, ey = polarimetry.circular_to_lin(ep, em)
    record("polarimetry round trip", abs(ex - 1.0) < 1e-12 and abs(ey) < 1e-12)
    pulse = dispersion.gaussian_pulse(10e-6)
    ident = dispersion.TransferFunction(
        detunings=np.linspace(-math.pi / pulse.dt, math.pi / pulse.dt, 513),
        values=np.ones(513, dtype=complex),
    )
    _, metrics = dispersion.propagate_pulse(pulse, ident)
    record("identity propagation", abs(metrics.delay) < pulse.dt and abs(metrics.peak_ratio - 1) < 1e-9)
    zshift = vapor.zeeman_shift(2e-7) / (2 * math.pi)
    record("zeeman 2 mG -> 2.8 kHz", abs(zshift - 2800.0) < 0.02 * 2800.0)
    return 0 if all(ok for _, ok in checks) else 1
