"""Protocol parameterisation for chirped population transfer.

A three-level Lambda system (states 0, 1, 2) is driven by a pump field on
the 0-2 transition and a Stokes field on the 1-2 transition.  One field is
always on at constant amplitude; the other is a Gaussian pulse.  Transfer
is controlled through tanh-shaped detuning ramps.  Everything here is
dimensionless: times in units of the pulse width T, frequencies in units
of the always-on Rabi amplitude.

The detuning ramps cross the dressed-state resonance where
``4*delta(t)*delta_p(t) = 1`` (in squared amplitude units); the pulsed
field is centred on the later crossing, which is where the avoided
crossing that carries the population transfer opens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import bisect

STOKES_ALWAYS_ON = "stokes-always-on"
PUMP_ALWAYS_ON = "pump-always-on"

#: crossing times are bisected to this absolute tolerance (units of T)
CROSSING_XTOL = 1e-14
#: bound accepted on |4*delta*delta_p - 1| at a returned crossing
CROSSING_RESIDUAL_TOL = 1e-10


class NoCrossingError(ValueError):
    """The detuning schedule never satisfies the crossing condition."""


@dataclass(frozen=True)
class ProtocolParams:
    """Dimensionless protocol knobs.

    omega0_T      adiabaticity parameter: always-on Rabi amplitude times
                  the pulse width
    kappa         peak Rabi ratio of the pulsed to the always-on field
    kappa_delta   ratio of the two single-photon detuning ramps
    h_delta       asymptotic detuning amplitude of the primary ramp
    tau           half-separation of the two tanh ramps (units of T)
    tau_ch        ramp timescale (units of T)
    gamma2        amplitude decay rate of state 2 (units of 1/T)
    stray_s/p     static stray detunings added to each schedule
    mode          which field is always on
    detuning_sign +1 or -1; -1 runs the protocol with reversed ramps
    """

    omega0_T: float = 40.0
    kappa: float = 1.0
    kappa_delta: float = 1.2
    h_delta: float = 10.0
    tau: float = 2.0
    tau_ch: float = 0.6
    gamma2: float = 0.0
    stray_s: float = 0.0
    stray_p: float = 0.0
    mode: str = STOKES_ALWAYS_ON
    detuning_sign: int = 1

    def __post_init__(self):
        if self.omega0_T <= 0:
            raise ValueError("omega0_T must be positive")
        if self.tau_ch <= 0:
            raise ValueError("tau_ch must be positive")
        if self.h_delta <= 0:
            raise ValueError("h_delta must be positive")
        if self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.gamma2 < 0:
            raise ValueError("gamma2 must be non-negative")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.mode not in (STOKES_ALWAYS_ON, PUMP_ALWAYS_ON):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.detuning_sign not in (1, -1):
            raise ValueError("detuning_sign must be +1 or -1")

    @property
    def stray_two_photon(self) -> float:
        """Stray two-photon detuning, stray_p minus stray_s."""
        return self.stray_p - self.stray_s


def dual_transform(p: ProtocolParams) -> ProtocolParams:
    """Swap which field is always on (pulse centre mirrors in time)."""
    mode = PUMP_ALWAYS_ON if p.mode == STOKES_ALWAYS_ON else STOKES_ALWAYS_ON
    return replace(p, mode=mode)


def flip_detunings(p: ProtocolParams) -> ProtocolParams:
    """Negate the ideal parts of both detuning ramps."""
    return replace(p, detuning_sign=-p.detuning_sign)


def _ramp_magnitude(t: float, tau: float, tau_ch: float, h_delta: float) -> float:
    return 0.5 * h_delta * (math.tanh((t - tau) / tau_ch)
                            + math.tanh((t + tau) / tau_ch))


def find_crossings(p: ProtocolParams) -> tuple[float, float]:
    """Times where the dressed eigenvalue pattern is crossed by the
    decoupled level, for the ideal (stray-free) schedule.

    Solves ``4*delta(t)*delta_p(t) = 1`` by bisection on each monotone
    ramp.  The two roots are symmetric, ``t_minus = -t_plus``, and do not
    depend on ``detuning_sign`` or on the mode (the condition is quadratic
    in the ramp value).  Stray detunings are deliberately excluded: the
    pulse is timed against the designed schedule, and strays displace the
    actual crossings away from it.

    Raises ``NoCrossingError`` when ``kappa_delta <= 1`` (no real root) or
    when the required ramp value exceeds the asymptote ``h_delta``.
    """
    kd = p.kappa_delta
    if kd <= 1.0:
        raise NoCrossingError(
            f"kappa_delta = {kd} <= 1: the dressed eigenvalues are never crossed")
    u_star = 1.0 / (2.0 * math.sqrt(kd * (kd - 1.0)))
    hi = p.tau + 20.0 * p.tau_ch
    if u_star >= _ramp_magnitude(hi, p.tau, p.tau_ch, p.h_delta):
        raise NoCrossingError(
            f"crossing needs ramp value {u_star:.4g} beyond the asymptote "
            f"h_delta = {p.h_delta}")
    t_plus = bisect(
        lambda t: _ramp_magnitude(t, p.tau, p.tau_ch, p.h_delta) - u_star,
        0.0, hi, xtol=CROSSING_XTOL)
    t_minus = -t_plus

    for t in (t_minus, t_plus):
        u = _ramp_magnitude(t, p.tau, p.tau_ch, p.h_delta)
        residual = abs(4.0 * (kd - 1.0) * kd * u * u - 1.0)
        if residual > CROSSING_RESIDUAL_TOL:
            raise RuntimeError(f"crossing residual {residual:.2e} out of tolerance")
    return t_minus, t_plus


@dataclass(frozen=True)
class Schedule:
    """Evaluated protocol: detunings, field envelopes, Hamiltonians.

    All evaluators accept scalar or array times (units of T) and return
    frequencies in units of the always-on Rabi amplitude.
    """

    params: ProtocolParams
    pump_center: float
    t_span: float
    crossings: tuple[float, float] | None

    def _ramp(self, t):
        p = self.params
        return (0.5 * p.h_delta * p.detuning_sign
                * (np.tanh((t - p.tau) / p.tau_ch) + np.tanh((t + p.tau) / p.tau_ch)))

    def delta_s(self, t):
        p = self.params
        ideal = self._ramp(t) if p.mode == STOKES_ALWAYS_ON else p.kappa_delta * self._ramp(t)
        return ideal + p.stray_s

    def delta_p(self, t):
        p = self.params
        ideal = p.kappa_delta * self._ramp(t) if p.mode == STOKES_ALWAYS_ON else self._ramp(t)
        return ideal + p.stray_p

    def delta(self, t):
        """Two-photon detuning, delta_p minus delta_s (exact identity)."""
        return self.delta_p(t) - self.delta_s(t)

    def _pulse(self, t):
        return self.params.kappa * np.exp(-((t - self.pump_center) ** 2))

    def omega_p(self, t):
        if self.params.mode == STOKES_ALWAYS_ON:
            return self._pulse(t)
        return np.ones_like(np.asarray(t, dtype=float))

    def omega_s(self, t):
        if self.params.mode == STOKES_ALWAYS_ON:
            return np.ones_like(np.asarray(t, dtype=float))
        return self._pulse(t)

    def hamiltonian_full(self, t) -> np.ndarray:
        """Rotating-frame Hamiltonian at time(s) t.

        Basis order (0, 1, 2); diagonal (0, delta, delta_p); couplings
        omega_p/2 on 0-2 and omega_s/2 on 1-2.  A non-zero decay rate
        contributes ``-1j*gamma2/omega0_T`` to the (2, 2) entry, so the
        squared norm of a propagated state obeys
        ``d|psi|^2/dt = -2*gamma2*P2``.
        """
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        n = t_arr.shape[0]
        h = np.zeros((n, 3, 3), dtype=complex)
        h[:, 1, 1] = self.delta(t_arr)
        h[:, 2, 2] = self.delta_p(t_arr)
        wp = 0.5 * self.omega_p(t_arr)
        ws = 0.5 * self.omega_s(t_arr)
        h[:, 0, 2] = h[:, 2, 0] = wp
        h[:, 1, 2] = h[:, 2, 1] = ws
        if self.params.gamma2 > 0:
            h[:, 2, 2] -= 1j * self.params.gamma2 / self.params.omega0_T
        return h[0] if scalar else h

    def hamiltonian_stokes(self, t) -> np.ndarray:
        """Hamiltonian with the pump coupling removed (Hermitian part only)."""
        t_arr = np.asarray(t, dtype=float)
        scalar = t_arr.ndim == 0
        t_arr = np.atleast_1d(t_arr)
        n = t_arr.shape[0]
        h = np.zeros((n, 3, 3), dtype=complex)
        h[:, 1, 1] = self.delta(t_arr)
        h[:, 2, 2] = self.delta_p(t_arr)
        ws = 0.5 * self.omega_s(t_arr)
        h[:, 1, 2] = h[:, 2, 1] = ws
        return h[0] if scalar else h

    def output_grid(self, n: int = 2000) -> np.ndarray:
        return np.linspace(-self.t_span, self.t_span, n)


def build_schedule(p: ProtocolParams) -> Schedule:
    """Resolve pulse timing and integration window for a parameter set.

    The pulse is centred on the later crossing time (mirrored for the
    always-on-pump mode).  When no crossing exists (``kappa_delta <= 1``
    or the ramp cannot reach the required value) the pulse falls back to
    the centre of the window, t = 0, where the ramp plateau keeps the
    protocol two-photon resonant.  The window half-width guarantees the
    ramps are saturated and the pulse tail is negligible at both ends.
    """
    try:
        crossings = find_crossings(p)
        pump_center = crossings[1] if p.mode == STOKES_ALWAYS_ON else -crossings[1]
    except NoCrossingError:
        crossings = None
        pump_center = 0.0
    t_span = p.tau + max(6.0 * p.tau_ch, abs(pump_center) + 6.0)
    return Schedule(params=p, pump_center=pump_center, t_span=t_span,
                    crossings=crossings)


def crossings_with_strays(p: ProtocolParams, n_scan: int = 4001) -> list[float]:
    """All times where the strayed schedule satisfies the crossing
    condition, found by scanning for sign changes and refining.

    Unlike ``find_crossings`` this is a diagnostic on the schedule as
    perturbed; depending on the strays there may be zero to four roots.
    """
    sched = build_schedule(p)

    def f(t):
        return 4.0 * sched.delta(t) * sched.delta_p(t) - 1.0

    ts = np.linspace(-sched.t_span, sched.t_span, n_scan)
    vals = f(ts)
    roots = []
    for i in range(len(ts) - 1):
        a, b = vals[i], vals[i + 1]
        if a == 0.0:
            roots.append(float(ts[i]))
        elif a * b < 0:
            roots.append(bisect(f, float(ts[i]), float(ts[i + 1]), xtol=CROSSING_XTOL))
    return roots
