"""Closed-form structures and leakage estimates.

The always-on field dresses the (1, 2) subspace into two branches whose
eigenvalues have a simple closed form; the decoupled level sits at zero.
Adiabatic elimination of the far-off-resonant amplitude produces an
effective two-level problem and an estimate of the transient population
of the lossy state 2, either in the bare basis (simple, with a closed
form at the crossing) or in the dressed basis (more accurate where the
single-photon detuning is small).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg3 import follow_branches
from .model import NoCrossingError, ProtocolParams, Schedule, build_schedule

#: dummy eigenvalue used to embed 2x2 effective problems into the 3x3 tracker
_DUMMY_LEVEL = 1e6

VARIANT_SELF_CONSISTENT = "self-consistent"
VARIANT_AS_WRITTEN = "as-written"


def _as_schedule(obj) -> Schedule:
    if isinstance(obj, Schedule):
        return obj
    return build_schedule(obj)


def dark_state(omega_p: float, omega_s: float) -> np.ndarray:
    """Zero-eigenvalue superposition of states 0 and 1.

    ``(omega_s, -omega_p, 0) / sqrt(omega_s^2 + omega_p^2)``; it is
    annihilated by the full Hamiltonian exactly at two-photon resonance.
    """
    norm = math.hypot(omega_p, omega_s)
    if norm == 0.0:
        raise ValueError("dark state undefined with both fields off")
    return np.array([omega_s, -omega_p, 0.0], dtype=complex) / norm


def stokes_eigenvalues(t, p):
    """Eigenvalues of the pump-free Hamiltonian: ``(s0, s_plus, s_minus)``.

    ``s0 = 0`` (the decoupled level) and
    ``s_pm = delta + (delta_s pm sqrt(delta_s^2 + omega_s^2)) / 2``,
    so ``s_plus >= s_minus`` always.  Vectorised over ``t``.
    """
    sched = _as_schedule(p)
    t = np.asarray(t, dtype=float)
    ds = sched.delta_s(t)
    d = sched.delta(t)
    ws = sched.omega_s(t)
    root = np.sqrt(ds * ds + ws * ws)
    s_plus = d + 0.5 * (ds + root)
    s_minus = d + 0.5 * (ds - root)
    return np.zeros_like(s_plus), s_plus, s_minus


@dataclass
class StokesFrame:
    """Dressed (1, 2)-subspace frame at given times.

    ``a1_pm``, ``a2_pm`` are the real components of the dressed states on
    the bare basis (orientation fixed by ``a1 >= 0``); ``omega_pm`` are
    the magnitudes of the pulsed-field couplings between state 0 and each
    dressed state.
    """

    s0: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    a1_plus: np.ndarray
    a2_plus: np.ndarray
    a1_minus: np.ndarray
    a2_minus: np.ndarray
    omega_plus: np.ndarray
    omega_minus: np.ndarray


def stokes_frame(t, p) -> StokesFrame:
    """Dressed-frame eigenvectors and effective couplings, vectorised."""
    sched = _as_schedule(p)
    t = np.asarray(t, dtype=float)
    s0, s_plus, s_minus = stokes_eigenvalues(t, sched)
    d = sched.delta(t)
    ws = np.broadcast_to(np.asarray(sched.omega_s(t), dtype=float), s_plus.shape)
    wp = np.broadcast_to(np.asarray(sched.omega_p(t), dtype=float), s_plus.shape)

    def components(s):
        a1 = 0.5 * ws
        a2 = s - d
        nrm = np.hypot(a1, a2)
        # the branch with s == delta at ws == 0 is the bare state 1
        deg = nrm == 0.0
        safe = np.where(deg, 1.0, nrm)
        a1 = np.where(deg, 1.0, a1 / safe)
        a2 = np.where(deg, 0.0, a2 / safe)
        return a1, a2

    a1p, a2p = components(s_plus)
    a1m, a2m = components(s_minus)
    return StokesFrame(
        s0=s0, s_plus=s_plus, s_minus=s_minus,
        a1_plus=a1p, a2_plus=a2p, a1_minus=a1m, a2_minus=a2m,
        omega_plus=wp * np.abs(a2p), omega_minus=wp * np.abs(a2m),
    )


@dataclass
class SpectrumResult:
    """Continuity-labelled instantaneous spectra along the protocol."""

    times: np.ndarray
    stokes_values: np.ndarray  # (n, 3): s0, s_plus, s_minus
    full_values: np.ndarray    # (n, 3): branches labelled from the start
    full_vectors: np.ndarray   # (n, 3, 3), branch i in [:, :, i]
    ground_index: int          # branch connected to state 0 at the start


def spectrum_full(t_grid, p: ProtocolParams) -> SpectrumResult:
    """Eigenvalues of the full Hamiltonian, labelled by continuity.

    Labels start in ascending order at the first grid point and follow
    eigenvector overlaps afterwards, so each column is a smooth branch.
    Requires ``gamma2 == 0``.
    """
    if p.gamma2 != 0:
        raise ValueError("spectra are defined for the Hermitian case gamma2 = 0")
    sched = build_schedule(p)
    t_grid = np.asarray(t_grid, dtype=float)
    hams = sched.hamiltonian_full(t_grid)
    values, vectors, k0, _ = follow_branches(hams, np.array([1.0, 0.0, 0.0]))
    s0, sp, sm = stokes_eigenvalues(t_grid, sched)
    return SpectrumResult(times=t_grid,
                          stokes_values=np.column_stack([s0, sp, sm]),
                          full_values=values, full_vectors=vectors,
                          ground_index=int(k0))


@dataclass
class LeakageEstimate:
    """Adiabatic-elimination estimate of the transient leakage.

    ``amplitudes`` holds the two retained real amplitudes per time,
    ``p2`` the estimated population of state 2, and ``masked`` flags
    grid points where the elimination denominator vanished (the
    estimate is undefined there and reported as NaN rather than
    poisoning the series).
    """

    times: np.ndarray
    amplitudes: np.ndarray
    p2: np.ndarray
    masked: np.ndarray
    basis: str
    variant: str | None = None


def _follow_effective(h2: np.ndarray, masked: np.ndarray) -> np.ndarray:
    """Track the branch of a 2x2 effective problem connected to state 0.

    Embeds each 2x2 block into a 3x3 matrix with a far-detached dummy
    level so the shared continuity tracker can be reused.  Masked rows
    are skipped for continuity and returned as NaN.
    """
    n = h2.shape[0]
    out = np.full((n, 2), np.nan)
    keep = ~masked
    m = int(keep.sum())
    if m == 0:
        return out
    h3 = np.zeros((m, 3, 3))
    h3[:, :2, :2] = h2[keep]
    h3[:, 2, 2] = _DUMMY_LEVEL
    values, vectors, k0, _ = follow_branches(h3, np.array([1.0, 0.0, 0.0]))
    out[keep] = vectors[:, :2, k0].real
    return out


def ae_bare(p: ProtocolParams, t_grid) -> LeakageEstimate:
    """Bare-basis elimination of the amplitude of state 2.

    Setting the time derivative of that amplitude to zero gives
    ``c2 = -(omega_p c0 + omega_s c1) / (2 delta_p)`` and an effective
    two-level Hamiltonian for ``(c0, c1)``; the estimate follows its
    eigenvector connected to state 0 and reports ``p2 = c2^2``.  Grid
    points with ``delta_p == 0`` are masked.
    """
    sched = _as_schedule(p)
    t = np.asarray(t_grid, dtype=float)
    dp = np.asarray(sched.delta_p(t), dtype=float)
    d = np.asarray(sched.delta(t), dtype=float)
    wp = np.broadcast_to(np.asarray(sched.omega_p(t), dtype=float), dp.shape)
    ws = np.broadcast_to(np.asarray(sched.omega_s(t), dtype=float), dp.shape)

    masked = dp == 0.0
    safe_dp = np.where(masked, 1.0, dp)
    h2 = np.zeros((len(t), 2, 2))
    h2[:, 0, 0] = -wp * wp / (4.0 * safe_dp)
    h2[:, 0, 1] = h2[:, 1, 0] = -ws * wp / (4.0 * safe_dp)
    h2[:, 1, 1] = d - ws * ws / (4.0 * safe_dp)

    amps = _follow_effective(h2, masked)
    c2 = -(wp * amps[:, 0] + ws * amps[:, 1]) / (2.0 * safe_dp)
    p2 = np.where(masked, np.nan, c2 * c2)
    return LeakageEstimate(times=t, amplitudes=amps, p2=p2, masked=masked,
                           basis="bare")


def ae_stokes(p: ProtocolParams, t_grid,
              variant: str = VARIANT_SELF_CONSISTENT) -> LeakageEstimate:
    """Dressed-basis elimination of the branch far from the crossing.

    Of the two dressed branches, the one that stays away from zero near
    the pulse centre is eliminated; the retained pair is the decoupled
    level and the branch that produces the transfer.  Grid points where
    the eliminated eigenvalue vanishes are masked.

    ``variant`` selects the leakage formula: ``"self-consistent"``
    substitutes the eliminated amplitude consistently (default), while
    ``"as-written"`` uses the tracked-branch coupling with positive
    orientation throughout.  The two agree wherever the couplings to the
    two branches coincide (small two-photon detuning).
    """
    if variant not in (VARIANT_SELF_CONSISTENT, VARIANT_AS_WRITTEN):
        raise ValueError(f"unknown variant {variant!r}")
    sched = _as_schedule(p)
    t = np.asarray(t_grid, dtype=float)
    frame = stokes_frame(t, sched)

    tc = sched.pump_center
    f_c = stokes_frame(np.asarray([tc]), sched)
    eliminate_plus = abs(float(f_c.s_plus[0])) >= abs(float(f_c.s_minus[0]))
    if eliminate_plus:
        s_el, a2_el = frame.s_plus, frame.a2_plus
        s_tr, a2_tr = frame.s_minus, frame.a2_minus
    else:
        s_el, a2_el = frame.s_minus, frame.a2_minus
        s_tr, a2_tr = frame.s_plus, frame.a2_plus

    wp = np.broadcast_to(np.asarray(sched.omega_p(t), dtype=float), s_el.shape)
    g_el = 0.5 * wp * a2_el
    g_tr = 0.5 * wp * a2_tr

    masked = s_el == 0.0
    safe_el = np.where(masked, 1.0, s_el)
    h2 = np.zeros((len(t), 2, 2))
    h2[:, 0, 0] = -g_el * g_el / safe_el
    h2[:, 1, 1] = s_tr
    if variant == VARIANT_SELF_CONSISTENT:
        h2[:, 0, 1] = h2[:, 1, 0] = g_tr
    else:
        h2[:, 0, 1] = h2[:, 1, 0] = -np.abs(g_tr)

    amps = _follow_effective(h2, masked)
    if variant == VARIANT_SELF_CONSISTENT:
        c_el = -(g_el / safe_el) * amps[:, 0]
        c2 = c_el * a2_el + amps[:, 1] * a2_tr
    else:
        c2 = (np.abs(g_tr) / safe_el) * amps[:, 0] * np.abs(a2_el) \
            + amps[:, 1] * np.abs(a2_tr)
    p2 = np.where(masked, np.nan, c2 * c2)
    return LeakageEstimate(times=t, amplitudes=amps, p2=p2, masked=masked,
                           basis="stokes", variant=variant)


def p2_figure_of_merit(kappa: float, kappa_delta: float) -> float:
    """Leakage estimate at the crossing, in closed form.

    ``((kappa_delta - 1)/kappa_delta) * f(kappa)`` with
    ``f(k) = (k - sqrt(k^2+4))^2 / (4 + (k + sqrt(k^2+4))^2)``, a
    monotonically decreasing function of the peak amplitude ratio.
    """
    if kappa_delta <= 1.0:
        raise NoCrossingError(
            f"kappa_delta = {kappa_delta} <= 1: no crossing, figure of merit undefined")
    root = math.sqrt(kappa * kappa + 4.0)
    f = (kappa - root) ** 2 / (4.0 + (kappa + root) ** 2)
    return (kappa_delta - 1.0) / kappa_delta * f
