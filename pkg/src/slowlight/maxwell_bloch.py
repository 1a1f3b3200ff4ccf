"""1-D co-propagation of control and signal envelopes through the vapor.

Model
-----
The cell is discretized into nz slabs (atom columns at z_i = i L / nz,
i = 0..nz). In the retarded frame each column evolves under the local
sigma+/- Rabi fields via the lambda_atom master equation (classic RK4 with
the field held at its midpoint extrapolation 1.5 Omega_n - 0.5 Omega_{n-1},
which keeps the atom-field coupling second order in dt), after which the
fields are rebuilt from the entrance boundary by integrating the
slowly-varying-envelope law

    d Omega_sigma / dz = i (omega / 2c) kappa gamma rho_{e,g_sigma}(z).

Each slab applies the exponential local solve Omega -> Omega exp(zeta)
with zeta = i eta dz (rho_i + rho_{i+1}) / (2 Omega_i): exact whenever the
coherence is proportional to the local field (steady transparency,
dispersion, opaque transients, which saturate stably instead of
overshooting), with a gain cap and an additive fallback for near-zero
fields where the coherence acts as a free source (storage, early
retrieval). The additive branch is the only one that requires spatial
resolution, so a source increment above 0.2 of the drive scale in that
branch raises GridResolutionError.

The beam is linearly polarized: an x control field c(t) (switched with
raised-cosine edges) plus a weak orthogonal y signal pulse s(t). The
circular components driving the atoms are Omega_pm = (c +/- i s e^{i phi})
/ sqrt(2). After the cell a polarizing splitter projects onto the detector
axis (orthogonal to the control polarization): I_signal = |E_y|^2 plus a
configurable extinction-ratio leakage of the control port.

Atoms are initialized column by column in the steady state of the entrance
fields at t = 0 (relaxation sweep), so always-on-control runs start in
equilibrium.

The time loop runs in a numba-compiled kernel when numba is importable and
falls back to an equivalent vectorized numpy stepper otherwise. State
invariants (finiteness, trace, positivity) are verified at chunk
boundaries and at the end of the run; hermiticity is enforced by
construction every step. Any total optical energy gain above 1e-9
relative aborts the run (the medium is passive).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import lambda_atom, polarimetry, vapor
from .dispersion import FWHM_TO_SIGMA
from .errors import (
    ConfigurationError,
    GridResolutionError,
    InvalidInputError,
    NumericalFailureError,
)
from .lambda_atom import EXCITED, G_MINUS, G_PLUS, AtomSpec, DriveConfig
from .vapor import C_LIGHT, CellConfig

try:  # optional accelerator; the numpy path is the reference implementation
    from . import _mb_kernel

    _HAVE_NUMBA = _mb_kernel.HAVE_NUMBA
except Exception:  # pragma: no cover - import-time environment issue
    _mb_kernel = None
    _HAVE_NUMBA = False

SQRT2 = math.sqrt(2.0)
SOURCE_PER_STEP_MAX = 0.2  # additive-branch increment bound, fraction of drive scale
GAIN_CAP = 0.5             # per-slab amplitude gain exponent cap
ENERGY_GAIN_TOL = 1e-9
_CHUNK_STEPS = 4000
_FIELD_FLOOR_FRACTION = 1e-3


@dataclass(frozen=True)
class StorageProtocol:
    """Timing of the control switching and the Gaussian signal pulse.

    control_off_time = math.inf means the control is never switched
    (slowing configuration). Rabi amplitudes are the x (control) and y
    (signal) linear components in rad/s.
    """

    signal_duration: float          # intensity FWHM, s
    signal_peak: float              # rad/s, 0 for control-only runs
    signal_center: float            # s
    control_level: float            # rad/s
    control_off_time: float = math.inf
    storage_time: float = 130e-6
    rise_time: float = 1e-6
    signal_phase: float = 0.0       # relative phase of the signal field
    circular_imbalance: float = 0.0  # fractional sigma+/- intensity imbalance

    def __post_init__(self):
        if self.signal_duration <= 0:
            raise InvalidInputError("signal duration must be positive")
        if self.signal_peak < 0 or self.control_level < 0:
            raise InvalidInputError("field amplitudes must be non-negative")
        if not self.control_off_time > self.signal_center:
            raise InvalidInputError("control must switch off after the pulse center")
        if self.storage_time <= 0:
            raise InvalidInputError("storage time must be positive")
        if self.rise_time <= 0:
            raise InvalidInputError("rise time must be positive")
        if abs(self.circular_imbalance) >= 1.0:
            raise InvalidInputError("|circular imbalance| must be below 1")

    @property
    def control_on_again(self) -> float:
        return self.control_off_time + self.storage_time

    def control_envelope(self, t):
        """Raised-cosine switched control amplitude at time(s) t."""
        t = np.asarray(t, dtype=float)
        if not math.isfinite(self.control_off_time):
            return np.full_like(t, self.control_level)
        t_off, rise, t_on = self.control_off_time, self.rise_time, self.control_on_again
        with np.errstate(invalid="ignore"):
            down = 0.5 * (1.0 + np.cos(np.pi * (t - (t_off - rise)) / rise))
            up = 0.5 * (1.0 - np.cos(np.pi * (t - t_on) / rise))
        w = np.select(
            [t < t_off - rise, t < t_off, t < t_on, t < t_on + rise],
            [1.0, down, 0.0, up],
            default=1.0,
        )
        return self.control_level * w

    def signal_envelope(self, t):
        t = np.asarray(t, dtype=float)
        sigma = FWHM_TO_SIGMA * self.signal_duration
        return self.signal_peak * np.exp(-((t - self.signal_center) ** 2) / (2.0 * sigma**2))

    def circular_components(self, t):
        """Entrance-boundary (Omega_plus, Omega_minus) at time(s) t."""
        c = self.control_envelope(t)
        s = self.signal_envelope(t) * np.exp(1j * self.signal_phase)
        scale_p = math.sqrt(1.0 + self.circular_imbalance)
        scale_m = math.sqrt(1.0 - self.circular_imbalance)
        omega_p = scale_p * (c + 1j * s) / SQRT2
        omega_m = scale_m * (c - 1j * s) / SQRT2
        return omega_p, omega_m

    def max_rabi(self) -> float:
        return (
            self.control_level * math.sqrt(1.0 + abs(self.circular_imbalance))
            + self.signal_peak
        ) / SQRT2


@dataclass(frozen=True)
class Grid1D:
    """Spatial/temporal resolution of one propagation run."""

    nz: int = 200          # z intervals over the cell length
    dt: float | None = None  # None: use the stability bound

    def __post_init__(self):
        if self.nz < 50:
            raise ConfigurationError("need nz >= 50 (dz <= L/50)")
        if self.dt is not None and self.dt <= 0:
            raise ConfigurationError("dt must be positive")

    def scaled(self, factor: float) -> "Grid1D":
        """Uniformly refine (factor > 1) both z and t resolution."""
        return Grid1D(
            nz=int(round(self.nz * factor)),
            dt=None if self.dt is None else self.dt / factor,
        )


@dataclass
class DetectorTrace:
    """Signal- and control-port intensities after the splitter."""

    times: np.ndarray
    i_signal: np.ndarray
    i_control: np.ndarray

    def __post_init__(self):
        if np.any(self.i_signal < 0) or np.any(self.i_control < 0):
            raise InvalidInputError("intensities must be non-negative")
        if not (
            np.all(np.isfinite(self.i_signal)) and np.all(np.isfinite(self.i_control))
        ):
            raise InvalidInputError("intensities must be finite")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def to_csv(self, path, metadata: dict | None = None) -> None:
        """Write time_s,i_signal,i_control rows plus a sidecar header file."""
        path = Path(path)
        buf = io.StringIO()
        buf.write("time_s,i_signal,i_control\n")
        for t, a, b in zip(self.times, self.i_signal, self.i_control):
            buf.write(f"{t:.9g},{a:.9g},{b:.9g}\n")
        path.write_text(buf.getvalue())
        meta = {"schema": "slowlight-trace-v1", "rows": len(self.times)}
        meta.update(metadata or {})
        side = Path(str(path) + ".meta")
        side.write_text("".join(f"{k} = {v}\n" for k, v in meta.items()))


@dataclass(frozen=True)
class EfficiencyResult:
    eta: float
    negative_corrected: bool = False


def trace_from_csv(path) -> DetectorTrace:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    return DetectorTrace(times=data[:, 0], i_signal=data[:, 1], i_control=data[:, 2])


def _column_steady_state(atom, b_field, omega_p, omega_m):
    drive = DriveConfig(
        omega_plus=complex(omega_p), omega_minus=complex(omega_m), b_field=b_field
    )
    try:
        return lambda_atom.steady_state(atom, drive)
    except lambda_atom.DegenerateSteadyStateError:
        return np.diag([0.5, 0.5, 0.0]).astype(complex)


def _advance_one(om, s, floor):
    """One-slab field update: exponential local solve above the field floor."""
    if abs(om) > floor:
        zeta = s / om
        if zeta.real <= GAIN_CAP:
            return om * np.exp(zeta)
    return om + s


def _initialize_columns(atom, b_field, eta_dz, omega_p0, omega_m0, nz, floor=0.0):
    """Relaxation sweep: per-column steady state with field attenuation."""
    rho = np.empty((nz + 1, 3, 3), dtype=complex)
    omp = np.empty(nz + 1, dtype=complex)
    omm = np.empty(nz + 1, dtype=complex)
    omp[0], omm[0] = omega_p0, omega_m0
    rho[0] = _column_steady_state(atom, b_field, omp[0], omm[0])
    for i in range(nz):
        sp = 1j * eta_dz * rho[i, EXCITED, G_PLUS]
        sm = 1j * eta_dz * rho[i, EXCITED, G_MINUS]
        pred = _column_steady_state(
            atom, b_field,
            _advance_one(omp[i], sp, floor), _advance_one(omm[i], sm, floor),
        )
        sp2 = 1j * eta_dz * pred[EXCITED, G_PLUS]
        sm2 = 1j * eta_dz * pred[EXCITED, G_MINUS]
        omp[i + 1] = _advance_one(omp[i], 0.5 * (sp + sp2), floor)
        omm[i + 1] = _advance_one(omm[i], 0.5 * (sm + sm2), floor)
        rho[i + 1] = _column_steady_state(atom, b_field, omp[i + 1], omm[i + 1])
    return rho, omp, omm


def steady_transmission(
    atom: AtomSpec,
    b_field: float,
    omega_plus0: complex,
    omega_minus0: complex,
    cell: CellConfig,
    nz: int = 200,
    kappa: float | None = None,
):
    """CW transmission: relax every column, return (rho, omega_p, omega_m).

    The atom columns are brought to the steady state of the attenuated
    local fields slab by slab; the returned field profiles include the
    entrance values at index 0 and the cell output at index nz. Used for
    steady optical-rotation scans.
    """
    if kappa is None:
        kappa = vapor.kappa_from_cell(cell)
    carrier = 2.0 * math.pi * C_LIGHT / cell.isotope_data.wavelength
    eta_dz = (carrier / (2.0 * C_LIGHT)) * kappa * atom.gamma * (cell.length / nz)
    return _initialize_columns(atom, b_field, eta_dz, omega_plus0, omega_minus0, nz)


def _advance_field(om0, source, floor, scale):
    """March one field component across the slabs (see module docstring).

    Returns the new field profile and the largest additive-branch source
    increment as a fraction of the drive scale (with the slab it occurred
    at) for the resolution check.
    """
    n = source.size
    out = np.empty(n, dtype=complex)
    out[0] = om0
    worst = 0.0
    worst_slab = -1
    for i in range(n - 1):
        s = 0.5 * (source[i] + source[i + 1])
        om = out[i]
        if abs(om) > floor:
            zeta = s / om
            if zeta.real > GAIN_CAP:
                out[i + 1] = om + s
                frac = abs(s) / scale
                if frac > worst:
                    worst, worst_slab = frac, i
            else:
                out[i + 1] = om * np.exp(zeta)
        else:
            out[i + 1] = om + s
            frac = abs(s) / scale
            if frac > worst:
                worst, worst_slab = frac, i
    return out, worst, worst_slab


def _sweep_fields(rho, omega_p0, omega_m0, eta_dz, floor, scale):
    """Field profiles from the entrance boundary and current coherences."""
    sp = 1j * eta_dz * rho[:, EXCITED, G_PLUS]
    sm = 1j * eta_dz * rho[:, EXCITED, G_MINUS]
    omp, worst_p, slab_p = _advance_field(omega_p0, sp, floor, scale)
    omm, worst_m, slab_m = _advance_field(omega_m0, sm, floor, scale)
    if worst_p >= worst_m:
        return omp, omm, worst_p, slab_p
    return omp, omm, worst_m, slab_m


def _check_columns(rho, step):
    if not np.all(np.isfinite(rho.view(float))):
        raise NumericalFailureError("non-finite atomic state", step=step)
    traces = np.einsum("nii->n", rho).real
    bad = np.nonzero(np.abs(traces - 1.0) > lambda_atom.TRACE_TOL)[0]
    if bad.size:
        raise NumericalFailureError(
            f"trace drift {traces[bad[0]] - 1.0:.3e}", step=step, slab=int(bad[0])
        )
    lam = np.linalg.eigvalsh(rho)
    bad = np.nonzero(lam.min(axis=1) < -lambda_atom.EIGENVALUE_TOL)[0]
    if bad.size:
        raise NumericalFailureError(
            f"negative eigenvalue {lam[bad[0]].min():.3e}", step=step, slab=int(bad[0])
        )


def _numpy_chunk(
    rho, omp, omm, omp_prev, omm_prev,
    bnd_p, bnd_m, n0, nsteps, dt, atom, zb, delta, eta_dz, floor, scale,
):
    """Reference stepper: RK4 on each column with the field frozen at its
    Adams-Bashforth midpoint extrapolation (second-order coupling), then
    the exponential field sweep."""
    nslab = rho.shape[0]
    out_p = np.empty(nsteps, dtype=complex)
    out_m = np.empty(nsteps, dtype=complex)
    worst = 0.0
    worst_at = (-1, -1)
    h = np.zeros((nslab, 3, 3), dtype=complex)
    h[:, G_MINUS, G_MINUS] = -zb
    h[:, G_PLUS, G_PLUS] = +zb
    h[:, EXCITED, EXCITED] = -delta
    for n in range(nsteps):
        mid_p = 1.5 * omp - 0.5 * omp_prev
        mid_m = 1.5 * omm - 0.5 * omm_prev
        h[:, EXCITED, G_PLUS] = -0.5 * mid_p
        h[:, G_PLUS, EXCITED] = -0.5 * np.conj(mid_p)
        h[:, EXCITED, G_MINUS] = -0.5 * mid_m
        h[:, G_MINUS, EXCITED] = -0.5 * np.conj(mid_m)
        k1 = lambda_atom.master_rhs(rho, h, atom)
        k2 = lambda_atom.master_rhs(rho + (0.5 * dt) * k1, h, atom)
        k3 = lambda_atom.master_rhs(rho + (0.5 * dt) * k2, h, atom)
        k4 = lambda_atom.master_rhs(rho + dt * k3, h, atom)
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho[:] = 0.5 * (rho + rho.conj().swapaxes(-1, -2))
        omp_prev, omm_prev = omp, omm
        omp, omm, overshoot, slab = _sweep_fields(
            rho, bnd_p[n0 + n + 1], bnd_m[n0 + n + 1], eta_dz, floor, scale
        )
        if overshoot > worst:
            worst, worst_at = overshoot, (n0 + n + 1, slab)
        out_p[n] = omp[-1]
        out_m[n] = omm[-1]
    return rho, omp, omm, omp_prev, omm_prev, out_p, out_m, worst, worst_at


def stability_bound(atom: AtomSpec, protocol: StorageProtocol, b_field: float,
                    detuning: float = 0.0) -> float:
    """Largest stable dt for a run: 1 / (50 max(gamma, |Omega|, |delta|, zB))."""
    max_rate = max(
        atom.gamma,
        protocol.max_rabi(),
        abs(detuning),
        atom.zeeman_rate * abs(b_field),
    )
    return 1.0 / (50.0 * max_rate)


def simulate(
    protocol: StorageProtocol,
    cell: CellConfig,
    atom: AtomSpec,
    b_field: float,
    t_end: float | None = None,
    grid: Grid1D | None = None,
    extinction_ratio: float = 1e-4,
    detuning: float = 0.0,
    kappa: float | None = None,
) -> DetectorTrace:
    """Propagate one full protocol through the cell.

    t_end defaults to control_on_again + 6 signal durations for switched
    protocols; always-on protocols must state it explicitly. kappa
    overrides the cell-derived density constant (density sweeps).
    """
    grid = grid or Grid1D()
    if t_end is None:
        if not math.isfinite(protocol.control_on_again):
            raise ConfigurationError("t_end is required when the control is never switched")
        t_end = protocol.control_on_again + 6.0 * protocol.signal_duration
    if t_end <= 0:
        raise ConfigurationError("t_end must be positive")

    bound = stability_bound(atom, protocol, b_field, detuning)
    dt = grid.dt if grid.dt is not None else bound
    if dt > bound * (1 + 1e-9):
        raise ConfigurationError(f"dt = {dt:.3e} s violates the stability bound {bound:.3e} s")
    n_steps = max(1, math.ceil(t_end / dt - 1e-12))
    dt = t_end / n_steps
    times = dt * np.arange(n_steps + 1)

    if kappa is None:
        kappa = vapor.kappa_from_cell(cell)
    carrier = 2.0 * math.pi * C_LIGHT / cell.isotope_data.wavelength
    dz = cell.length / grid.nz
    eta_dz = (carrier / (2.0 * C_LIGHT)) * kappa * atom.gamma * dz
    zb = atom.zeeman_rate * b_field
    scale = max(protocol.max_rabi(), 1e-300)
    floor = _FIELD_FLOOR_FRACTION * scale

    bnd_p, bnd_m = protocol.circular_components(times)
    rho, omp, omm = _initialize_columns(
        atom, b_field, eta_dz, bnd_p[0], bnd_m[0], grid.nz, floor=floor
    )

    out_p = np.empty(n_steps + 1, dtype=complex)
    out_m = np.empty(n_steps + 1, dtype=complex)
    out_p[0], out_m[0] = omp[-1], omm[-1]

    worst_src = 0.0
    worst_at = (-1, -1)
    done = 0
    omp_prev, omm_prev = omp.copy(), omm.copy()
    use_kernel = _HAVE_NUMBA
    while done < n_steps:
        todo = min(_CHUNK_STEPS, n_steps - done)
        if use_kernel:
            rho, omp, omm, omp_prev, omm_prev, chunk_p, chunk_m, src, src_at = (
                _mb_kernel.run_chunk(
                    rho, omp, omm, omp_prev, omm_prev, bnd_p, bnd_m, done, todo, dt,
                    atom.gamma, atom.branch_plus, atom.branch_minus, atom.gamma0,
                    zb, detuning, eta_dz, floor, scale,
                )
            )
        else:
            rho, omp, omm, omp_prev, omm_prev, chunk_p, chunk_m, src, src_at = (
                _numpy_chunk(
                    rho, omp, omm, omp_prev, omm_prev, bnd_p, bnd_m, done, todo, dt,
                    atom, zb, detuning, eta_dz, floor, scale,
                )
            )
        out_p[done + 1 : done + todo + 1] = chunk_p
        out_m[done + 1 : done + todo + 1] = chunk_m
        done += todo
        if src > worst_src:
            worst_src, worst_at = src, tuple(src_at)
        _check_columns(rho, step=done)

    if worst_src > SOURCE_PER_STEP_MAX:
        raise GridResolutionError(
            f"low-field source increment reached {worst_src:.3f} of the drive scale "
            f"(> {SOURCE_PER_STEP_MAX}) at step {worst_at[0]}, slab {worst_at[1]}: "
            "refine the grid"
        )

    energy_in = float(np.sum(np.abs(bnd_p) ** 2 + np.abs(bnd_m) ** 2) * dt)
    energy_out = float(np.sum(np.abs(out_p) ** 2 + np.abs(out_m) ** 2) * dt)
    if energy_out > energy_in * (1.0 + ENERGY_GAIN_TOL):
        raise NumericalFailureError(
            f"optical energy gain: out {energy_out:.12e} > in {energy_in:.12e}"
        )

    e_x, e_y = polarimetry.circular_to_lin(out_p, out_m)
    i_signal, i_control = polarimetry.project_ports(
        e_x, e_y, detector_axis_angle=math.pi / 2.0, extinction_ratio=extinction_ratio
    )
    return DetectorTrace(times=times, i_signal=i_signal, i_control=i_control)


def leakage_reference(
    protocol: StorageProtocol, cell, atom, b_field, **kwargs
) -> DetectorTrace:
    """The same run with the signal pulse turned off (leakage calibration).

    Pins dt to the signal run's stability bound so both traces share one
    time grid.
    """
    grid = kwargs.pop("grid", None) or Grid1D()
    if grid.dt is None:
        bound = stability_bound(
            atom, protocol, b_field, kwargs.get("detuning", 0.0)
        )
        grid = replace(grid, dt=bound)
    return simulate(
        replace(protocol, signal_peak=0.0), cell, atom, b_field, grid=grid, **kwargs
    )


def storage_efficiency(
    trace: DetectorTrace,
    protocol: StorageProtocol,
    leakage: DetectorTrace,
) -> EfficiencyResult:
    """Recovered-peak to input-peak intensity ratio, leakage subtracted.

    The post-storage window runs from control re-on to re-on plus five
    pulse durations; the leakage trace (identical protocol, zero signal) is
    subtracted pointwise before the peak is taken. A negative corrected
    peak reports eta = 0 with the flag set.
    """
    if not math.isfinite(protocol.control_on_again):
        raise InvalidInputError("storage efficiency needs a switched protocol")
    if protocol.signal_peak <= 0:
        raise InvalidInputError("protocol has no signal pulse")
    if trace.times.shape != leakage.times.shape or not np.allclose(
        trace.times, leakage.times, rtol=0, atol=1e-15 + 1e-9 * trace.dt
    ):
        raise InvalidInputError("leakage reference must share the trace time grid")
    t_on = protocol.control_on_again
    window = (trace.times >= t_on) & (
        trace.times <= t_on + 5.0 * protocol.signal_duration
    )
    if not np.any(window):
        raise InvalidInputError("trace does not cover the post-storage window")
    corrected = trace.i_signal[window] - leakage.i_signal[window]
    peak = float(corrected.max())
    if peak < 0:
        return EfficiencyResult(eta=0.0, negative_corrected=True)
    denom = protocol.signal_peak**2
    return EfficiencyResult(eta=float(min(1.0, peak / denom)))


def sir_peak(
    b_field: float,
    protocol: StorageProtocol,
    cell: CellConfig,
    atom: AtomSpec,
    grid: Grid1D | None = None,
    t_end: float | None = None,
    kappa: float | None = None,
) -> float:
    """Peak signal-port intensity after control re-on at one field value.

    Uses ideal polarimetry (zero extinction ratio) so the B = 0 value
    reflects the vapor alone.
    """
    if protocol.signal_peak != 0:
        raise InvalidInputError("SIR scans require a zero signal pulse")
    trace = simulate(
        protocol, cell, atom, float(b_field),
        t_end=t_end, grid=grid, extinction_ratio=0.0, kappa=kappa,
    )
    window = trace.times >= protocol.control_on_again
    return float(trace.i_signal[window].max())


def sir_scan(
    b_grid,
    protocol: StorageProtocol,
    cell: CellConfig,
    atom: AtomSpec,
    grid: Grid1D | None = None,
    t_end: float | None = None,
    kappa: float | None = None,
) -> np.ndarray:
    """Switch-induced-rotation peak after control re-on, per magnetic field."""
    return np.array(
        [sir_peak(b, protocol, cell, atom, grid=grid, t_end=t_end, kappa=kappa) for b in b_grid]
    )


def trace_fwhm(trace: DetectorTrace) -> float:
    """Intensity FWHM of the signal-port peak (linear crossing interpolation)."""
    y = trace.i_signal
    i = int(np.argmax(y))
    half = y[i] / 2.0
    left = i
    while left > 0 and y[left] > half:
        left -= 1
    right = i
    while right < y.size - 1 and y[right] > half:
        right += 1
    if y[left] > half or y[right] > half:
        raise InvalidInputError("signal peak does not fall to half maximum inside the trace")
    tl = left + (half - y[left]) / (y[left + 1] - y[left])
    tr = right - 1 + (y[right - 1] - half) / (y[right - 1] - y[right])
    return float((tr - tl) * trace.dt)


def signal_delay(trace: DetectorTrace, protocol: StorageProtocol) -> float:
    """Retarded-frame delay of the signal-port peak vs the input center."""
    i = int(np.argmax(trace.i_signal))
    t_peak = trace.times[i]
    if 0 < i < trace.times.size - 1:
        y0, y1, y2 = trace.i_signal[i - 1 : i + 2]
        denom = y0 - 2.0 * y1 + y2
        if denom != 0:
            t_peak = trace.times[i] + 0.5 * (y0 - y2) / denom * trace.dt
    return float(t_peak - protocol.signal_center)
