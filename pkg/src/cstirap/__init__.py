"""Chirped population transfer in a three-level Lambda system.

Coherent transfer between the two lower states is driven by tanh-shaped
detuning ramps and a Gaussian pulse while the other field stays on at
constant amplitude.  The package provides the protocol model, exact and
adiabatic propagation, closed-form spectra and leakage estimates, and
sweep/noise-averaging engines, all in dimensionless units (time in pulse
widths, frequencies in units of the always-on Rabi amplitude).
"""

from .analysis import (LeakageEstimate, SpectrumResult, StokesFrame,
                       VARIANT_AS_WRITTEN, VARIANT_SELF_CONSISTENT, ae_bare,
                       ae_stokes, dark_state, p2_figure_of_merit,
                       spectrum_full, stokes_eigenvalues, stokes_frame)
from .linalg3 import EigenSystem3, eig_hermitian_3, follow_branches, match_continuity
from .model import (NoCrossingError, ProtocolParams, PUMP_ALWAYS_ON,
                    STOKES_ALWAYS_ON, Schedule, build_schedule,
                    crossings_with_strays, dual_transform, find_crossings,
                    flip_detunings)
from .propagate import (AdiabaticCrossingError, EfficiencyResult,
                        PropagationError, Trajectory, efficiency,
                        evolve_adiabatic, evolve_schrodinger)
from .sweeps import (EfficiencyMap, LinewidthResult, NoiseAverage, NoiseSpec,
                     SweepAxis, SweepSpec, apply_parameter, linewidth,
                     quasistatic_average, sweep_1d, sweep_2d)

__version__ = "0.1.0"

__all__ = [
    "AdiabaticCrossingError", "EfficiencyMap", "EfficiencyResult",
    "EigenSystem3", "LeakageEstimate", "LinewidthResult", "NoCrossingError",
    "NoiseAverage", "NoiseSpec", "PropagationError", "ProtocolParams",
    "PUMP_ALWAYS_ON", "STOKES_ALWAYS_ON", "Schedule", "SpectrumResult",
    "StokesFrame", "SweepAxis", "SweepSpec", "Trajectory",
    "VARIANT_AS_WRITTEN", "VARIANT_SELF_CONSISTENT", "ae_bare", "ae_stokes",
    "apply_parameter", "build_schedule", "crossings_with_strays",
    "dark_state", "dual_transform", "efficiency", "eig_hermitian_3",
    "evolve_adiabatic", "evolve_schrodinger", "find_crossings",
    "flip_detunings", "follow_branches", "linewidth", "match_continuity",
    "p2_figure_of_merit", "quasistatic_average", "spectrum_full",
    "stokes_eigenvalues", "stokes_frame", "sweep_1d", "sweep_2d",
]
