#!/usr/bin/env python3
"""Store and retrieve a signal pulse.

Runs the full switched-control protocol on the slow-rate test medium:
the control slows a 30 us signal pulse, switches off with the pulse just
short of the exit, waits 130 us, and switches back on. The recovered pulse
appears at the signal detector after re-on. Writes the detector trace to
storage_trace.csv (+ .meta sidecar) and prints the efficiency.
"""

import math

from slowlight import dispersion as dsp, maxwell_bloch as mb
from slowlight.lambda_atom import AtomSpec
from slowlight.vapor import CellConfig

LAM = 794.987e-9
cell = CellConfig(length=0.04, diameter=0.02, temperature=300.0)
kappa = 100.0 / ((2 * math.pi / LAM) * cell.length)
atom = AtomSpec(gamma=1.667e5, gamma0=2 * math.pi * 100.0)
control = 2.3573e5

t_g = dsp.group_delay(dsp.analytic_params_from_atom(atom.gamma, control, kappa, cell.length, LAM))
duration = 30e-6
center = 2.4 * duration
protocol = mb.StorageProtocol(
    signal_duration=duration,
    signal_peak=0.1 * control,
    signal_center=center,
    control_level=control,
    control_off_time=center + t_g - 1.5 * duration,
    storage_time=130e-6,
)
print(f"group delay {t_g * 1e6:.0f} us; control off at {protocol.control_off_time * 1e6:.0f} us, "
      f"on again at {protocol.control_on_again * 1e6:.0f} us")

trace = mb.simulate(protocol, cell, atom, b_field=0.0, kappa=kappa)
leak = mb.leakage_reference(protocol, cell, atom, 0.0, kappa=kappa)
result = mb.storage_efficiency(trace, protocol, leak)
print(f"storage efficiency eta = {result.eta:.3f}")

trace.to_csv("storage_trace.csv", metadata={"eta": result.eta, "b_tesla": 0.0})
print("wrote storage_trace.csv (+ .meta)")

try:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 3.5))
    ax.plot(trace.times * 1e6, trace.i_signal / protocol.signal_peak**2, label="signal port")
    ax.plot(trace.times * 1e6, leak.i_signal / protocol.signal_peak**2, label="leakage reference")
    for t, name in ((protocol.control_off_time, "off"), (protocol.control_on_again, "on")):
        ax.axvline(t * 1e6, color="gray", ls="--", lw=0.8)
        ax.text(t * 1e6, ax.get_ylim()[1] * 0.9, name)
    ax.set_xlabel("time (us)")
    ax.set_ylabel("I / I_in,peak")
    ax.legend()
    fig.tight_layout()
    fig.savefig("storage_demo.png", dpi=120)
    print("wrote storage_demo.png")
except ImportError:
    pass
