"""Three-level Lambda-system density matrix under bichromatic drive.

Conventions (used everywhere in the package)
--------------------------------------------
Basis order is (|->, |+>, |e>) = indices (0, 1, 2). The two ground states
are labeled by the circularly polarized field component that drives them:
sigma+ couples |+> <-> |e> and sigma- couples |-> <-> |e>.

The frame rotates at the laser frequency. With detuning delta = omega -
omega_0, the excited diagonal carries -delta. An axial field B shifts the
ground levels by +/- mu_B B / hbar: +zeeman_rate*B on |+>, -zeeman_rate*B
on |->. Couplings enter as H[e, g] = -Omega_g / 2 (and the conjugate below
the diagonal).

Dissipation is standard Lindblad form: jump operators sqrt(gamma b_pm)
|pm><e| for radiative decay with branching fractions b_pm, plus pure
ground-coherence dephasing at rate gamma0 (implemented so |rho_+-| decays
exactly as exp(-gamma0 t); optical coherences pick up the corresponding
extra gamma0/4).

Susceptibility extraction: chi_sigma = kappa * gamma * rho_{e,g_sigma} /
Omega_sigma with kappa = 3 N lambda^3 / (8 pi^2). In the weak-probe limit
this reduces to the analytic dispersion formula with coherence-convention
parameters (gamma/2, |Omega_control|/2); see dispersion.analytic_params_from_atom.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from . import vapor
from .errors import (
    ConfigurationError,
    DegenerateSteadyStateError,
    InvalidInputError,
    NumericalFailureError,
)

# Basis indices
G_MINUS, G_PLUS, EXCITED = 0, 1, 2

# DensityMatrix invariant tolerances
HERMITICITY_TOL = 1e-12
TRACE_TOL = 1e-9
EIGENVALUE_TOL = 1e-9

Envelope = Union[complex, Callable[[float], complex]]


@dataclass(frozen=True)
class AtomSpec:
    """Lambda-system rate constants."""

    gamma: float = vapor.GAMMA_D1          # excited radiative decay (rad/s)
    branch_plus: float = 0.5               # fraction of decay into |+>
    branch_minus: float = 0.5              # fraction of decay into |->
    gamma0: float = vapor.GAMMA0_DEFAULT   # ground coherence decay (rad/s)
    zeeman_rate: float = vapor.MU_B_OVER_HBAR  # rad/s per tesla

    def __post_init__(self):
        if self.gamma <= 0:
            raise InvalidInputError("gamma must be positive")
        if self.branch_plus < 0 or self.branch_minus < 0:
            raise InvalidInputError("branching fractions must be non-negative")
        if abs(self.branch_plus + self.branch_minus - 1.0) > 1e-12:
            raise InvalidInputError("branching fractions must sum to 1")
        if self.gamma0 < 0:
            raise InvalidInputError("gamma0 must be non-negative")
        if self.zeeman_rate <= 0:
            raise InvalidInputError("zeeman_rate must be positive")


@dataclass(frozen=True)
class DriveConfig:
    """Classical drive: sigma+/- Rabi envelopes, common detuning, axial field.

    Envelopes may be complex constants or callables of time returning a
    complex Rabi frequency in rad/s.
    """

    omega_plus: Envelope = 0.0
    omega_minus: Envelope = 0.0
    detuning: float = 0.0    # rad/s
    b_field: float = 0.0     # tesla

    def __post_init__(self):
        if not math.isfinite(self.detuning):
            raise InvalidInputError("detuning must be finite")
        if not math.isfinite(self.b_field):
            raise InvalidInputError("b_field must be finite")
        for name in ("omega_plus", "omega_minus"):
            value = getattr(self, name)
            if not callable(value) and not np.isfinite(complex(value)):
                raise InvalidInputError(f"{name} must be finite")

    def rabi_at(self, t: float) -> tuple[complex, complex]:
        op = self.omega_plus(t) if callable(self.omega_plus) else self.omega_plus
        om = self.omega_minus(t) if callable(self.omega_minus) else self.omega_minus
        return complex(op), complex(om)

    @property
    def is_constant(self) -> bool:
        return not (callable(self.omega_plus) or callable(self.omega_minus))


@dataclass
class Trajectory:
    """Density-matrix time series returned by evolve()."""

    times: np.ndarray        # (n,) seconds
    rhos: np.ndarray         # (n, 3, 3) complex

    def __len__(self):
        return len(self.times)


def check_density_matrix(rho: np.ndarray, step: int | None = None, slab: int | None = None):
    """Raise NumericalFailureError unless rho is a valid density matrix.

    Hermitian to 1e-12, unit trace to 1e-9, eigenvalues >= -1e-9.
    """
    rho = np.asarray(rho)
    if rho.shape != (3, 3):
        raise InvalidInputError(f"density matrix must be 3x3, got {rho.shape}")
    if not np.all(np.isfinite(rho.view(float))):
        raise NumericalFailureError("non-finite density matrix", step=step, slab=slab)
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > HERMITICITY_TOL:
        raise NumericalFailureError(f"hermiticity violated by {herm:.3e}", step=step, slab=slab)
    tr = abs(np.trace(rho) - 1.0)
    if tr > TRACE_TOL:
        raise NumericalFailureError(f"trace deviates from 1 by {tr:.3e}", step=step, slab=slab)
    lam = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if lam.min() < -EIGENVALUE_TOL:
        raise NumericalFailureError(f"negative eigenvalue {lam.min():.3e}", step=step, slab=slab)


def ground_state(population_plus: float = 1.0) -> np.ndarray:
    """Diagonal ground-state density matrix with the given |+> population."""
    if not 0.0 <= population_plus <= 1.0:
        raise InvalidInputError("population must be in [0, 1]")
    return np.diag([1.0 - population_plus, population_plus, 0.0]).astype(complex)


def build_hamiltonian(atom: AtomSpec, drive: DriveConfig, t: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian (rad/s) at time t."""
    omega_p, omega_m = drive.rabi_at(t)
    if not (np.isfinite(omega_p) and np.isfinite(omega_m)):
        raise InvalidInputError(f"drive envelope non-finite at t = {t}")
    zb = atom.zeeman_rate * drive.b_field
    h = np.zeros((3, 3), dtype=complex)
    h[G_MINUS, G_MINUS] = -zb
    h[G_PLUS, G_PLUS] = +zb
    h[EXCITED, EXCITED] = -drive.detuning
    h[EXCITED, G_PLUS] = -0.5 * omega_p
    h[G_PLUS, EXCITED] = -0.5 * np.conj(omega_p)
    h[EXCITED, G_MINUS] = -0.5 * omega_m
    h[G_MINUS, EXCITED] = -0.5 * np.conj(omega_m)
    return h


def _dissipator_rates(atom: AtomSpec) -> tuple[float, float, float, float, float]:
    g = atom.gamma
    g_opt = 0.5 * g + 0.25 * atom.gamma0   # optical coherence decay
    return g, g * atom.branch_minus, g * atom.branch_plus, g_opt, atom.gamma0


def master_rhs(rho: np.ndarray, h: np.ndarray, atom: AtomSpec) -> np.ndarray:
    """d rho / dt = -i [H, rho] + D[rho], batched over leading axes.

    Relies on rho and h being Hermitian so that rho H = (H rho)^dagger.
    """
    hr = h @ rho
    out = -1j * (hr - hr.conj().swapaxes(-1, -2))
    g, feed_m, feed_p, g_opt, g0 = _dissipator_rates(atom)
    ee = rho[..., EXCITED, EXCITED]
    out[..., EXCITED, EXCITED] -= g * ee
    out[..., G_MINUS, G_MINUS] += feed_m * ee
    out[..., G_PLUS, G_PLUS] += feed_p * ee
    out[..., G_MINUS, EXCITED] -= g_opt * rho[..., G_MINUS, EXCITED]
    out[..., EXCITED, G_MINUS] -= g_opt * rho[..., EXCITED, G_MINUS]
    out[..., G_PLUS, EXCITED] -= g_opt * rho[..., G_PLUS, EXCITED]
    out[..., EXCITED, G_PLUS] -= g_opt * rho[..., EXCITED, G_PLUS]
    out[..., G_MINUS, G_PLUS] -= g0 * rho[..., G_MINUS, G_PLUS]
    out[..., G_PLUS, G_MINUS] -= g0 * rho[..., G_PLUS, G_MINUS]
    return out


def jump_operators(atom: AtomSpec) -> list[np.ndarray]:
    """Lindblad jump operators equivalent to master_rhs (used by tests and
    the Liouvillian builder)."""
    ops = []
    lm = np.zeros((3, 3), dtype=complex)
    lm[G_MINUS, EXCITED] = math.sqrt(atom.gamma * atom.branch_minus)
    ops.append(lm)
    lp = np.zeros((3, 3), dtype=complex)
    lp[G_PLUS, EXCITED] = math.sqrt(atom.gamma * atom.branch_plus)
    ops.append(lp)
    if atom.gamma0 > 0:
        lz = np.diag([-1.0, 1.0, 0.0]).astype(complex) * math.sqrt(atom.gamma0 / 2.0)
        ops.append(lz)
    return ops


def stability_dt(atom: AtomSpec, drive: DriveConfig, sample_times=None) -> float:
    """Largest dt allowed by the fixed-step integrator precondition.

    dt <= 1 / (50 * max(gamma, |Omega+|, |Omega-|, |delta|, zeeman_rate*B)),
    with time-dependent envelopes sampled at the given times.
    """
    rates = [atom.gamma, abs(drive.detuning), atom.zeeman_rate * abs(drive.b_field)]
    if drive.is_constant:
        op, om = drive.rabi_at(0.0)
        rates += [abs(op), abs(om)]
    else:
        if sample_times is None:
            raise InvalidInputError("sample_times required for time-dependent envelopes")
        for t in sample_times:
            op, om = drive.rabi_at(float(t))
            rates += [abs(op), abs(om)]
    return 1.0 / (50.0 * max(max(rates), 1e-300))


def evolve(
    rho0: np.ndarray,
    atom: AtomSpec,
    drive: DriveConfig,
    t_span: tuple[float, float],
    dt: float,
) -> Trajectory:
    """Integrate the master equation with classic fixed-step RK4.

    Envelopes are evaluated at the RK4 stage times, the state is
    re-symmetrized each step, and the density-matrix invariants are
    verified over the whole trajectory (reporting the first bad step).
    dt is adjusted downward to divide the span evenly.
    """
    t0, t1 = map(float, t_span)
    if dt <= 0 or t1 <= t0:
        raise ConfigurationError("need dt > 0 and t1 > t0")
    n_steps = max(1, math.ceil((t1 - t0) / dt - 1e-12))
    dt_eff = (t1 - t0) / n_steps
    times = t0 + dt_eff * np.arange(n_steps + 1)

    bound = stability_dt(atom, drive, sample_times=times[:: max(1, n_steps // 512)])
    if dt_eff > bound * (1 + 1e-9):
        raise ConfigurationError(
            f"dt = {dt_eff:.3e} s violates the stability bound {bound:.3e} s"
        )

    rho = np.array(rho0, dtype=complex)
    check_density_matrix(rho, step=0)
    rhos = np.empty((n_steps + 1, 3, 3), dtype=complex)
    rhos[0] = rho

    for n in range(n_steps):
        t = times[n]
        h1 = build_hamiltonian(atom, drive, t)
        h2 = build_hamiltonian(atom, drive, t + 0.5 * dt_eff)
        h4 = build_hamiltonian(atom, drive, t + dt_eff)
        k1 = master_rhs(rho, h1, atom)
        k2 = master_rhs(rho + 0.5 * dt_eff * k1, h2, atom)
        k3 = master_rhs(rho + 0.5 * dt_eff * k2, h2, atom)
        k4 = master_rhs(rho + dt_eff * k3, h4, atom)
        rho = rho + (dt_eff / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if not np.all(np.isfinite(rho.view(float))):
            raise NumericalFailureError("non-finite state", step=n + 1)
        rhos[n + 1] = rho

    # Batched invariant verification; report the first offending step.
    traces = np.einsum("nii->n", rhos).real
    bad = np.nonzero(np.abs(traces - 1.0) > TRACE_TOL)[0]
    if bad.size:
        raise NumericalFailureError(
            f"trace drifted to {traces[bad[0]]:.12f}", step=int(bad[0])
        )
    lam = np.linalg.eigvalsh(rhos)
    bad = np.nonzero(lam.min(axis=1) < -EIGENVALUE_TOL)[0]
    if bad.size:
        raise NumericalFailureError(
            f"negative eigenvalue {lam[bad[0]].min():.3e}", step=int(bad[0])
        )
    return Trajectory(times=times, rhos=rhos)


def liouvillian(atom: AtomSpec, drive: DriveConfig) -> np.ndarray:
    """9x9 Liouvillian in the row-major (C-order) vec convention."""
    if not drive.is_constant:
        raise InvalidInputError("steady-state analysis requires a constant drive")
    h = build_hamiltonian(atom, drive, 0.0)
    eye = np.eye(3, dtype=complex)
    lv = -1j * (np.kron(h, eye) - np.kron(eye, h.T))
    for op in jump_operators(atom):
        opd_op = op.conj().T @ op
        lv += np.kron(op, op.conj())
        lv -= 0.5 * (np.kron(opd_op, eye) + np.kron(eye, opd_op.T))
    return lv


STEADY_RESIDUAL_TOL = 1e-10
_KERNEL_SV_TOL = 1e-9


def steady_state(atom: AtomSpec, drive: DriveConfig) -> np.ndarray:
    """Unique stationary density matrix of the constant-drive Liouvillian.

    The Liouvillian is scaled by the largest rate before the kernel is
    extracted by SVD, so the residual tolerance is rate-independent. A
    kernel of dimension != 1 raises DegenerateSteadyStateError with the
    kernel dimension.
    """
    op, om = drive.rabi_at(0.0)
    scale = max(
        atom.gamma, atom.gamma0, abs(op), abs(om),
        abs(drive.detuning), atom.zeeman_rate * abs(drive.b_field),
    )
    lv = liouvillian(atom, drive) / scale
    _, svals, vh = np.linalg.svd(lv)
    kernel_dim = int(np.count_nonzero(svals < _KERNEL_SV_TOL))
    if kernel_dim != 1:
        raise DegenerateSteadyStateError(kernel_dim)
    rho = vh[-1].conj().reshape(3, 3)
    rho = 0.5 * (rho + rho.conj().T)
    tr = np.trace(rho).real
    if abs(tr) < 1e-8:
        raise DegenerateSteadyStateError(kernel_dim)
    rho /= tr
    residual = np.linalg.norm(lv @ rho.reshape(-1))
    if residual > STEADY_RESIDUAL_TOL:
        raise NumericalFailureError(
            f"steady-state residual {residual:.3e} exceeds {STEADY_RESIDUAL_TOL}"
        )
    check_density_matrix(rho)
    return rho


def coherence_susceptibility(
    rho: np.ndarray,
    atom: AtomSpec,
    drive: DriveConfig,
    density_per_m3: float,
    wavelength: float,
    t: float = 0.0,
) -> tuple[complex, complex]:
    """(chi_plus, chi_minus) from the optical coherences of a state.

    chi_sigma = kappa * gamma * rho_{e,g_sigma} / Omega_sigma; the weak-probe
    limit of this normalization reproduces the analytic dispersion formula.
    Requires both Rabi components nonzero (division guard).
    """
    omega_p, omega_m = drive.rabi_at(t)
    if omega_p == 0 or omega_m == 0:
        raise InvalidInputError("susceptibility extraction needs nonzero Rabi components")
    kappa = vapor.kappa_from_density(density_per_m3, wavelength)
    chi_p = kappa * atom.gamma * rho[EXCITED, G_PLUS] / omega_p
    chi_m = kappa * atom.gamma * rho[EXCITED, G_MINUS] / omega_m
    return complex(chi_p), complex(chi_m)
