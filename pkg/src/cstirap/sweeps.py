"""Parameter sweeps, quasistatic noise averaging, linewidth extraction.

Every grid point and every Monte Carlo sample is an independent
propagation; work items carry their own index, so serial and parallel
executions produce bit-identical results.  Parallelism uses processes
(one propagation is a single-threaded scalar loop) with the worker count
taken from the ``CSTIRAP_WORKERS`` environment variable by default.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .model import ProtocolParams
from .propagate import PropagationError, efficiency, evolve_schrodinger

SWEEPABLE = ("kappa", "kappa_delta", "stray_s", "stray_p",
             "stray_two_photon", "omega0_T", "gamma2")

#: sweeps trade integrator tolerance for throughput; map values only need
#: to be accurate well below the plotted contour spacing
SWEEP_RTOL = 1e-6
SWEEP_ATOL = 1e-9
SWEEP_OUTPUT_POINTS = 800


def default_workers() -> int:
    return max(1, int(os.environ.get("CSTIRAP_WORKERS", "1")))


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.name!r}; choose one of {SWEEPABLE}")
        if self.count < 2:
            raise ValueError("axis count must be at least 2")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    base: ProtocolParams = field(default_factory=ProtocolParams)
    rtol: float = SWEEP_RTOL
    atol: float = SWEEP_ATOL
    n_output: int = SWEEP_OUTPUT_POINTS


@dataclass
class EfficiencyMap:
    """Gridded sweep results; masked entries hold NaN."""

    axis1_name: str
    axis1_values: np.ndarray
    axis2_name: str | None
    axis2_values: np.ndarray | None
    p1_final: np.ndarray
    max_p2: np.ndarray
    final_norm: np.ndarray
    masked: np.ndarray
    meta: dict


def apply_parameter(base: ProtocolParams, assignments: dict) -> ProtocolParams:
    """Set swept parameters on a base parameter set.

    ``stray_two_photon`` is a derived quantity; assigning it adjusts
    ``stray_s`` so that ``stray_p - stray_s`` takes the requested value,
    holding ``stray_p`` (either the base value or one assigned in the
    same call).
    """
    out = dict(assignments)
    if "stray_two_photon" in out:
        two_photon = out.pop("stray_two_photon")
        if "stray_s" in out and "stray_p" in out:
            raise ValueError("stray_two_photon conflicts with assigning both strays")
        if "stray_s" in out:
            out["stray_p"] = out["stray_s"] + two_photon
        else:
            stray_p = out.get("stray_p", base.stray_p)
            out["stray_s"] = stray_p - two_photon
    return replace(base, **out)


def _run_point(task):
    """One grid cell: returns (index, p1, max_p2, norm) or (index, nan...)."""
    index, params, rtol, atol, n_output = task
    try:
        traj = evolve_schrodinger(params, rtol=rtol, atol=atol, n_output=n_output)
    except PropagationError:
        return index, math.nan, math.nan, math.nan
    eff = efficiency(traj)
    return index, eff.p1_final, eff.max_p2, eff.final_norm


def _execute(tasks, shape, meta, workers):
    p1 = np.full(shape, np.nan)
    mp2 = np.full(shape, np.nan)
    nrm = np.full(shape, np.nan)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_point, tasks, chunksize=8)
    else:
        results = map(_run_point, tasks)
    for index, a, b, c in results:
        p1[index] = a
        mp2[index] = b
        nrm[index] = c
    masked = np.isnan(p1)
    return p1, mp2, nrm, masked


def sweep_1d(spec: SweepSpec, workers: int | None = None) -> EfficiencyMap:
    """Propagate once per point of a one-parameter scan."""
    if spec.axis2 is not None:
        raise ValueError("sweep_1d takes a spec without axis2")
    workers = default_workers() if workers is None else workers
    values = spec.axis1.values
    tasks = [(i, apply_parameter(spec.base, {spec.axis1.name: v}),
              spec.rtol, spec.atol, spec.n_output) for i, v in enumerate(values)]
    meta = {"rtol": spec.rtol, "atol": spec.atol, "n_output": spec.n_output,
            "base": spec.base}
    p1, mp2, nrm, masked = _execute(tasks, values.shape, meta, workers)
    return EfficiencyMap(axis1_name=spec.axis1.name, axis1_values=values,
                         axis2_name=None, axis2_values=None,
                         p1_final=p1, max_p2=mp2, final_norm=nrm,
                         masked=masked, meta=meta)


def sweep_2d(spec: SweepSpec, workers: int | None = None) -> EfficiencyMap:
    """Propagate once per cell of a two-parameter grid."""
    if spec.axis2 is None:
        raise ValueError("sweep_2d needs axis2")
    workers = default_workers() if workers is None else workers
    v1 = spec.axis1.values
    v2 = spec.axis2.values
    tasks = []
    for i, a in enumerate(v1):
        for j, b in enumerate(v2):
            params = apply_parameter(spec.base,
                                     {spec.axis1.name: a, spec.axis2.name: b})
            tasks.append(((i, j), params, spec.rtol, spec.atol, spec.n_output))
    meta = {"rtol": spec.rtol, "atol": spec.atol, "n_output": spec.n_output,
            "base": spec.base}
    p1, mp2, nrm, masked = _execute(tasks, (len(v1), len(v2)), meta, workers)
    return EfficiencyMap(axis1_name=spec.axis1.name, axis1_values=v1,
                         axis2_name=spec.axis2.name, axis2_values=v2,
                         p1_final=p1, max_p2=mp2, final_norm=nrm,
                         masked=masked, meta=meta)


@dataclass(frozen=True)
class NoiseSpec:
    """Bivariate Gaussian model of the stray detunings."""

    sigma_s: float = 0.05
    sigma_p: float = 0.05
    rho: float = 0.0
    n_samples: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.sigma_s < 0 or self.sigma_p < 0:
            raise ValueError("standard deviations must be non-negative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")
        if self.n_samples < 1:
            raise ValueError("need at least one sample")


def noise_draw(noise: NoiseSpec, index: int) -> tuple[float, float]:
    """Stray-detuning draw for one sample, from its own substream.

    The substream is derived from (seed, sample index), so the draw does
    not depend on how samples are scheduled across workers.
    """
    rng = np.random.default_rng(np.random.SeedSequence(entropy=noise.seed,
                                                       spawn_key=(index,)))
    z1, z2 = rng.standard_normal(2)
    stray_s = noise.sigma_s * z1
    stray_p = noise.sigma_p * (noise.rho * z1 + math.sqrt(1.0 - noise.rho ** 2) * z2)
    return float(stray_s), float(stray_p)


@dataclass
class NoiseAverage:
    mean_p1: float
    std_p1: float
    samples: np.ndarray
    noise: NoiseSpec


def quasistatic_average(p: ProtocolParams, noise: NoiseSpec,
                        workers: int | None = None, rtol: float = SWEEP_RTOL,
                        atol: float = SWEEP_ATOL,
                        n_output: int = SWEEP_OUTPUT_POINTS) -> NoiseAverage:
    """Monte Carlo average of the final efficiency over static strays.

    Slow parameter drift is replaced by random static offsets added to
    the working-point strays, one propagation per draw.  Deterministic
    for a given seed, independent of the worker count.
    """
    workers = default_workers() if workers is None else workers
    tasks = []
    for i in range(noise.n_samples):
        ds, dp = noise_draw(noise, i)
        params = replace(p, stray_s=p.stray_s + ds, stray_p=p.stray_p + dp)
        tasks.append((i, params, rtol, atol, n_output))
    samples = np.full(noise.n_samples, np.nan)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_point, tasks, chunksize=8)
    else:
        results = map(_run_point, tasks)
    for index, p1, _, _ in results:
        samples[index] = p1
    good = samples[~np.isnan(samples)]
    std = float(np.std(good, ddof=1)) if len(good) > 1 else 0.0
    return NoiseAverage(mean_p1=float(np.mean(good)), std_p1=std,
                        samples=samples, noise=noise)


@dataclass
class LinewidthResult:
    """Width of the high-efficiency region along a direction.

    ``bracketed_lo``/``bracketed_hi`` are False when the region was still
    above threshold at the map edge; the reach is then capped at the map
    extent rather than raising, since a too-small map is a measurement
    limitation, not an error in the data.
    """

    width: float
    reach_lo: float
    reach_hi: float
    bracketed_lo: bool
    bracketed_hi: bool
    threshold: float


def linewidth(emap: EfficiencyMap, direction=(1.0, 0.0),
              threshold: float | None = None) -> LinewidthResult:
    """Full width of the connected region around the origin where the
    efficiency stays at or above ``threshold``, along ``direction``.

    ``threshold`` defaults to half the value at the origin (a full width
    at half maximum).  The map must be two-dimensional and cover the
    origin.  NaN cells terminate the region.
    """
    if emap.axis2_values is None:
        raise ValueError("linewidth needs a 2-d efficiency map")
    ax1, ax2 = emap.axis1_values, emap.axis2_values
    if not (ax1[0] <= 0.0 <= ax1[-1] and ax2[0] <= 0.0 <= ax2[-1]):
        raise ValueError("map does not cover the origin")
    d = np.asarray(direction, dtype=float)
    nd = np.linalg.norm(d)
    if nd == 0:
        raise ValueError("direction must be a non-zero 2-vector")
    d = d / nd

    interp = RegularGridInterpolator((ax1, ax2), emap.p1_final,
                                     method="linear", bounds_error=True)
    origin_value = float(interp((0.0, 0.0)))
    if threshold is None:
        threshold = 0.5 * origin_value
    if not np.isfinite(origin_value) or origin_value < threshold:
        return LinewidthResult(0.0, 0.0, 0.0, True, True, threshold)

    spacing = []
    if d[0] != 0:
        spacing.append(np.min(np.diff(ax1)) / abs(d[0]))
    if d[1] != 0:
        spacing.append(np.min(np.diff(ax2)) / abs(d[1]))
    step = min(spacing) / 4.0

    def value_at(s, sign):
        x = sign * s * d
        return float(interp((x[0], x[1])))

    def s_limit(sign):
        limits = []
        for comp, lo, hi in ((sign * d[0], ax1[0], ax1[-1]),
                             (sign * d[1], ax2[0], ax2[-1])):
            if comp > 0:
                limits.append(hi / comp)
            elif comp < 0:
                limits.append(lo / comp)
        return min(limits)

    def march(sign):
        s_max = s_limit(sign)
        s = 0.0
        while True:
            s_next = min(s + step, s_max)
            v = value_at(s_next, sign)
            if not (np.isfinite(v) and v >= threshold):
                lo, hi = s, s_next
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    v = value_at(mid, sign)
                    if np.isfinite(v) and v >= threshold:
                        lo = mid
                    else:
                        hi = mid
                return 0.5 * (lo + hi), True
            s = s_next
            if s >= s_max:
                return s_max, False

    reach_hi, ok_hi = march(+1.0)
    reach_lo, ok_lo = march(-1.0)
    return LinewidthResult(width=reach_lo + reach_hi, reach_lo=reach_lo,
                           reach_hi=reach_hi, bracketed_lo=ok_lo,
                           bracketed_hi=ok_hi, threshold=threshold)
