"""Baseline population transfer.

Runs the working-point protocol (always-on field, tanh detuning ramps,
Gaussian pulse at the second crossing), overlays the adiabatic-following
approximation, and compares the transient leakage against the two
adiabatic-elimination estimates.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cstirap import (ProtocolParams, ae_bare, ae_stokes, build_schedule,
                     efficiency, evolve_adiabatic, evolve_schrodinger)

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

params = ProtocolParams()  # omega0_T=40, kappa=1, kappa_delta=1.2, h_delta=10
sched = build_schedule(params)
print(f"pulse centre t_c = {sched.pump_center:.4f} T, "
      f"window = [-{sched.t_span:.2f}, {sched.t_span:.2f}] T")

exact = evolve_schrodinger(params)
adiab = evolve_adiabatic(params)
bare = ae_bare(params, exact.times)
dressed = ae_stokes(params, exact.times)

eff = efficiency(exact)
print(f"final transfer P1 = {eff.p1_final:.4f}")
print(f"peak transient P2 = {eff.max_p2:.4f}")
print(f"adiabatic vs exact, max deviation = "
      f"{np.abs(adiab.populations - exact.populations).max():.4f}")
print(f"leakage estimate errors: bare "
      f"{np.nanmax(np.abs(bare.p2 - exact.populations[:, 2])):.4f}, dressed "
      f"{np.nanmax(np.abs(dressed.p2 - exact.populations[:, 2])):.4f}")

header = "t_over_T,P0,P1,P2,P0_ad,P1_ad,P2_ad,P2_ae_bare,P2_ae_stokes"
table = np.column_stack([exact.times, exact.populations, adiab.populations,
                         bare.p2, dressed.p2])
np.savetxt(OUT / "population_transfer.csv", table, delimiter=",",
           header=header, comments="")

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 7), sharex=True)
for i, (label, color) in enumerate([("P0", "tab:red"), ("P1", "tab:blue"),
                                    ("P2", "tab:green")]):
    ax1.plot(exact.times, exact.populations[:, i], color=color, label=label)
    ax1.plot(adiab.times, adiab.populations[:, i], color="gray", lw=1, ls="--")
ax1.set_ylabel("population")
ax1.legend(loc="center left")
ax1.set_title("exact (colour) vs adiabatic following (gray)")

ax2.plot(exact.times, exact.populations[:, 2], "g", label="exact P2")
ax2.plot(bare.times, bare.p2, "k", lw=1, label="bare-basis estimate")
ax2.plot(dressed.times, dressed.p2, "k--", lw=1, label="dressed-basis estimate")
ax2.set_xlabel("t / T")
ax2.set_ylabel("P2")
ax2.legend()
fig.savefig(OUT / "population_transfer.png", dpi=150, bbox_inches="tight")
print(f"wrote {OUT / 'population_transfer.csv'} and .png")
