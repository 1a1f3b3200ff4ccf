"""Numba-compiled inner loop for maxwell_bloch.simulate.

Mirrors maxwell_bloch._numpy_chunk exactly: classic RK4 on each atom column
with the fields frozen over the step, hermitization, then a trapezoidal
field sweep from the entrance boundary. Importable without numba (the
HAVE_NUMBA flag tells the caller whether run_chunk exists).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional extra
    HAVE_NUMBA = False


if HAVE_NUMBA:

    @njit(cache=True)
    def _rhs3(y, h, g, bp, bm, gopt, g0, out):
        # out = -i (h y - (h y)^dagger) + dissipator(y); y and h Hermitian.
        for j in range(3):
            for k in range(3):
                out[j, k] = h[j, 0] * y[0, k] + h[j, 1] * y[1, k] + h[j, 2] * y[2, k]
        for j in range(3):
            for k in range(j, 3):
                cjk = out[j, k]
                ckj = out[k, j]
                out[j, k] = -1j * (cjk - np.conj(ckj))
                if k > j:
                    out[k, j] = -1j * (ckj - np.conj(cjk))
        ee = y[2, 2]
        out[2, 2] -= g * ee
        out[0, 0] += g * bm * ee
        out[1, 1] += g * bp * ee
        out[0, 2] -= gopt * y[0, 2]
        out[2, 0] -= gopt * y[2, 0]
        out[1, 2] -= gopt * y[1, 2]
        out[2, 1] -= gopt * y[2, 1]
        out[0, 1] -= g0 * y[0, 1]
        out[1, 0] -= g0 * y[1, 0]

    @njit(cache=True)
    def _advance(om, s, floor, gain_cap):
        # One-slab field update: exponential local solve above the floor,
        # additive fallback for near-zero fields and capped gain. The
        # second return flags the additive branch (resolution-checked).
        a2 = om.real * om.real + om.imag * om.imag
        if a2 > floor * floor:
            zeta = s / om
            if zeta.real <= gain_cap:
                return om * np.exp(zeta), False
        return om + s, True

    @njit(cache=True)
    def _chunk(
        rho, omp, omm, omp_prev, omm_prev, bnd_p, bnd_m, n0, nsteps, dt,
        g, bp, bm, g0, zb, delta, eta_dz, floor, scale,
        out_p, out_m,
    ):
        nslab = rho.shape[0]
        gopt = 0.5 * g + 0.25 * g0
        gain_cap = 0.5
        h = np.zeros((3, 3), dtype=np.complex128)
        h[0, 0] = -zb
        h[1, 1] = zb
        h[2, 2] = -delta
        y0 = np.empty((3, 3), dtype=np.complex128)
        yt = np.empty((3, 3), dtype=np.complex128)
        k1 = np.empty((3, 3), dtype=np.complex128)
        k2 = np.empty((3, 3), dtype=np.complex128)
        k3 = np.empty((3, 3), dtype=np.complex128)
        k4 = np.empty((3, 3), dtype=np.complex128)
        new_p = np.empty(nslab, dtype=np.complex128)
        new_m = np.empty(nslab, dtype=np.complex128)
        worst = 0.0
        worst_step = -1
        worst_slab = -1

        for n in range(nsteps):
            for i in range(nslab):
                # midpoint-field extrapolation keeps the coupling second order
                mid_p = 1.5 * omp[i] - 0.5 * omp_prev[i]
                mid_m = 1.5 * omm[i] - 0.5 * omm_prev[i]
                h[2, 1] = -0.5 * mid_p
                h[1, 2] = np.conj(h[2, 1])
                h[2, 0] = -0.5 * mid_m
                h[0, 2] = np.conj(h[2, 0])
                for a in range(3):
                    for b in range(3):
                        y0[a, b] = rho[i, a, b]
                _rhs3(y0, h, g, bp, bm, gopt, g0, k1)
                for a in range(3):
                    for b in range(3):
                        yt[a, b] = y0[a, b] + 0.5 * dt * k1[a, b]
                _rhs3(yt, h, g, bp, bm, gopt, g0, k2)
                for a in range(3):
                    for b in range(3):
                        yt[a, b] = y0[a, b] + 0.5 * dt * k2[a, b]
                _rhs3(yt, h, g, bp, bm, gopt, g0, k3)
                for a in range(3):
                    for b in range(3):
                        yt[a, b] = y0[a, b] + dt * k3[a, b]
                _rhs3(yt, h, g, bp, bm, gopt, g0, k4)
                for a in range(3):
                    for b in range(3):
                        yt[a, b] = y0[a, b] + (dt / 6.0) * (
                            k1[a, b] + 2.0 * k2[a, b] + 2.0 * k3[a, b] + k4[a, b]
                        )
                for a in range(3):
                    rho[i, a, a] = complex(yt[a, a].real, 0.0)
                    for b in range(a + 1, 3):
                        avg = 0.5 * (yt[a, b] + np.conj(yt[b, a]))
                        rho[i, a, b] = avg
                        rho[i, b, a] = np.conj(avg)

            new_p[0] = bnd_p[n0 + n + 1]
            new_m[0] = bnd_m[n0 + n + 1]
            sp_prev = 1j * eta_dz * rho[0, 2, 1]
            sm_prev = 1j * eta_dz * rho[0, 2, 0]
            for i in range(nslab - 1):
                sp_next = 1j * eta_dz * rho[i + 1, 2, 1]
                sm_next = 1j * eta_dz * rho[i + 1, 2, 0]
                dp = 0.5 * (sp_prev + sp_next)
                dm = 0.5 * (sm_prev + sm_next)
                new_p[i + 1], add_p = _advance(new_p[i], dp, floor, gain_cap)
                new_m[i + 1], add_m = _advance(new_m[i], dm, floor, gain_cap)
                if add_p:
                    frac = abs(dp) / scale
                    if frac > worst:
                        worst = frac
                        worst_step = n0 + n + 1
                        worst_slab = i
                if add_m:
                    frac = abs(dm) / scale
                    if frac > worst:
                        worst = frac
                        worst_step = n0 + n + 1
                        worst_slab = i
                sp_prev = sp_next
                sm_prev = sm_next
            for i in range(nslab):
                omp_prev[i] = omp[i]
                omm_prev[i] = omm[i]
                omp[i] = new_p[i]
                omm[i] = new_m[i]
            out_p[n] = omp[nslab - 1]
            out_m[n] = omm[nslab - 1]
        return worst, worst_step, worst_slab

    def run_chunk(
        rho, omp, omm, omp_prev, omm_prev, bnd_p, bnd_m, n0, nsteps, dt,
        gamma, branch_plus, branch_minus, gamma0,
        zb, delta, eta_dz, floor, scale,
    ):
        rho = np.ascontiguousarray(rho)
        omp = np.ascontiguousarray(omp)
        omm = np.ascontiguousarray(omm)
        omp_prev = np.ascontiguousarray(omp_prev)
        omm_prev = np.ascontiguousarray(omm_prev)
        out_p = np.empty(nsteps, dtype=np.complex128)
        out_m = np.empty(nsteps, dtype=np.complex128)
        worst, step, slab = _chunk(
            rho, omp, omm, omp_prev, omm_prev,
            np.ascontiguousarray(bnd_p), np.ascontiguousarray(bnd_m),
            n0, nsteps, dt,
            gamma, branch_plus, branch_minus, gamma0,
            zb, delta, eta_dz, floor, scale,
            out_p, out_m,
        )
        return rho, omp, omm, omp_prev, omm_prev, out_p, out_m, worst, (step, slab)
