"""How the protocol fails at large stray detunings.

Four representative points of the stray-detuning plane, one per failure
mode.  The crossing times of the perturbed schedule (relative to the
fixed pulse) explain each history: crossings that drift before the pulse
freeze the system in its initial state, a pulse that no longer opens a
usable avoided crossing loses adiabaticity, and an inverted ordering of
the mixing phases transfers population but rides through the lossy state.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from cstirap import (ProtocolParams, build_schedule, crossings_with_strays,
                     efficiency, evolve_schrodinger)

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

# (two-photon stray, pulsed-field stray) pairs
CASES = [
    ("initial mixing, wrong target", dict(stray_s=-0.5, stray_p=-1.5)),
    ("frozen in the initial state", dict(stray_s=0.5, stray_p=1.5)),
    ("insufficient avoided crossing", dict(stray_s=2.0, stray_p=1.0)),
    ("transfer through the lossy state", dict(stray_s=-2.0, stray_p=-1.0)),
]

base = ProtocolParams()
t_pulse = build_schedule(base).pump_center
print(f"pulse stays centred at t = {t_pulse:.3f} while strays move the crossings\n")

fig, axes = plt.subplots(2, 2, figsize=(9, 6), sharex=True, sharey=True)
for ax, (title, strays) in zip(axes.flat, CASES):
    p = replace(base, **strays)
    roots = crossings_with_strays(p)
    traj = evolve_schrodinger(p, rtol=1e-7, atol=1e-10)
    eff = efficiency(traj)
    two_photon = p.stray_two_photon
    print(f"{title}: strays (two-photon {two_photon:+.1f}, pulsed {p.stray_p:+.1f})")
    print(f"  crossings at {', '.join(f'{r:+.2f}' for r in roots) or 'none'}")
    print(f"  P1 final = {eff.p1_final:.3f}, peak P2 = {eff.max_p2:.3f}")
    if title.startswith("transfer through"):
        lossy = efficiency(evolve_schrodinger(replace(p, gamma2=1.0),
                                              rtol=1e-7, atol=1e-10))
        print(f"  with decay gamma2 = 1/T: P1 final drops to {lossy.p1_final:.3f}")
    for i, c in enumerate(["tab:red", "tab:blue", "tab:green"]):
        ax.plot(traj.times, traj.populations[:, i], color=c, lw=1)
    for r in roots:
        ax.axvline(r, color="gray", lw=0.6, ls=":")
    ax.axvline(t_pulse, color="m", lw=0.6)
    ax.set_title(title, fontsize=9)

for ax in axes[1]:
    ax.set_xlabel("t / T")
for ax in axes[:, 0]:
    ax.set_ylabel("populations")
fig.savefig(OUT / "failure_modes.png", dpi=150, bbox_inches="tight")
print(f"\nwrote {OUT / 'failure_modes.png'}")
