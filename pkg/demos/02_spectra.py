"""Instantaneous spectra along the protocol.

Shows the detuning ramps, the dressed (pulse-free) eigenvalues with their
two crossings of the decoupled level, and the full-Hamiltonian branches
where the pulse turns the second crossing into an avoided one.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cstirap import ProtocolParams, build_schedule, spectrum_full

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

params = ProtocolParams()
sched = build_schedule(params)
t = sched.output_grid(1500)
res = spectrum_full(t, params)
t_minus, t_plus = sched.crossings
print(f"crossings at t = {t_minus:.4f} and {t_plus:.4f} (pulse centre)")

g = res.ground_index
gaps = np.abs(np.delete(res.full_values, g, axis=1)
              - res.full_values[:, [g]]).min(axis=1)
near = np.abs(t - t_plus) < 2.0
print(f"avoided-crossing gap at the pulse: {gaps[near].min():.4f} "
      f"(in units of the always-on amplitude)")

fig, (ax0, ax1) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
ax0.plot(t, sched.delta_s(t), label="delta_s")
ax0.plot(t, sched.delta_p(t), label="delta_p")
ax0.plot(t, sched.delta(t), ":", label="delta (two-photon)")
ax0.plot(t, sched.omega_p(t), "m", lw=1, label="pulse envelope")
ax0.set_ylabel("frequency")
ax0.legend(ncol=2, fontsize=8)

for k, style in ((0, "--"), (1, "--"), (2, "--")):
    ax1.plot(t, res.stokes_values[:, k], "k" + style, lw=0.8)
for k in range(3):
    ax1.plot(t, res.full_values[:, k], lw=1.2)
ax1.plot(t, res.full_values[:, g], "r", lw=2.2,
         label="branch carrying the population")
for tc in (t_minus, t_plus):
    ax1.axvline(tc, color="gray", lw=0.5)
ax1.set_ylim(-2.5, 2.5)
ax1.set_xlabel("t / T")
ax1.set_ylabel("eigenvalues")
ax1.legend()
fig.savefig(OUT / "spectra.png", dpi=150, bbox_inches="tight")

np.savetxt(OUT / "spectra.csv",
           np.column_stack([t, res.stokes_values, res.full_values]),
           delimiter=",", comments="",
           header="t_over_T,s0,s_plus,s_minus,e1,e2,e3")
print(f"wrote {OUT / 'spectra.csv'} and .png")
