"""Command-line front end.

Subcommands map one-to-one onto the library: ``simulate`` (population
histories plus leakage estimates), ``spectrum`` (dressed and full
instantaneous eigenvalues), ``sweep`` (1-d or 2-d efficiency maps),
``noise`` (quasistatic averaging), ``linewidth`` (width of the
high-efficiency region) and ``crossing`` (ramp crossing times).

Configuration is an INI file whose keys are named exactly after the
parameter fields; CLI flags override config keys.  CSV output uses a
header row, CRLF line endings and 17 significant digits, so identical
configs and seeds reproduce files byte for byte regardless of the worker
count (set with ``--workers`` or the ``CSTIRAP_WORKERS`` variable).
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys
from dataclasses import dataclass, fields, replace

from .analysis import (VARIANT_SELF_CONSISTENT, ae_bare, ae_stokes,
                       spectrum_full)
from .model import (NoCrossingError, ProtocolParams, build_schedule,
                    dual_transform, find_crossings, flip_detunings)
from .propagate import PropagationError, evolve_schrodinger
from .sweeps import (NoiseSpec, SweepAxis, SweepSpec, default_workers,
                     linewidth, quasistatic_average, sweep_1d, sweep_2d)


class ConfigError(ValueError):
    """Invalid or unknown configuration entry."""


@dataclass
class SweepConfig:
    axis1: SweepAxis
    axis2: SweepAxis | None
    rtol: float
    atol: float
    grid_points: int


@dataclass
class LinewidthConfig:
    direction: tuple[float, float] = (1.0, 0.0)
    threshold: float | None = None


@dataclass
class RunConfig:
    params: ProtocolParams
    rtol: float = 1e-9
    atol: float = 1e-12
    grid_points: int = 2000
    out: str | None = None
    sweep: SweepConfig | None = None
    noise: NoiseSpec | None = None
    lw: LinewidthConfig | None = None

    def resolved_sweep(self) -> SweepConfig:
        if self.sweep is not None:
            return self.sweep
        # default map: stray-detuning plane at the published resolution
        return SweepConfig(
            axis1=SweepAxis("stray_two_photon", -2.0, 2.0, 61),
            axis2=SweepAxis("stray_p", -2.0, 2.0, 61),
            rtol=1e-6, atol=1e-9, grid_points=800)

    def resolved_noise(self) -> NoiseSpec:
        return self.noise if self.noise is not None else NoiseSpec()

    def resolved_linewidth(self) -> LinewidthConfig:
        return self.lw if self.lw is not None else LinewidthConfig()


_PROTOCOL_FIELDS = {f.name: f.type for f in fields(ProtocolParams)}


def _get_float(section, key):
    try:
        return float(section[key])
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _parse_axis(section, prefix) -> SweepAxis | None:
    if prefix not in section:
        return None
    try:
        return SweepAxis(name=section[prefix].strip(),
                         start=float(section[f"{prefix}_min"]),
                         stop=float(section[f"{prefix}_max"]),
                         count=int(section[f"{prefix}_count"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"sweep {prefix}: {exc}") from None


_KNOWN_SECTIONS = {
    "protocol": set(_PROTOCOL_FIELDS),
    "integrator": {"rtol", "atol"},
    "output": {"grid_points", "path"},
    "sweep": {"axis1", "axis1_min", "axis1_max", "axis1_count",
              "axis2", "axis2_min", "axis2_max", "axis2_count",
              "rtol", "atol", "grid_points"},
    "noise": {"sigma_s", "sigma_p", "rho", "n_samples", "seed"},
    "linewidth": {"direction", "threshold"},
}


def parse_config(text: str) -> RunConfig:
    """Parse an INI config; every key is validated before anything runs."""
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keys are case-sensitive field names
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from None

    for section in cp.sections():
        if section not in _KNOWN_SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _KNOWN_SECTIONS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")

    kwargs = {}
    if cp.has_section("protocol"):
        sec = cp["protocol"]
        for key in sec:
            if key == "mode":
                kwargs[key] = sec[key].strip()
            elif key == "detuning_sign":
                kwargs[key] = int(sec[key])
            else:
                kwargs[key] = _get_float(sec, key)
    try:
        params = ProtocolParams(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"protocol: {exc}") from None

    cfg = RunConfig(params=params)
    if cp.has_section("integrator"):
        sec = cp["integrator"]
        if "rtol" in sec:
            cfg.rtol = _get_float(sec, "rtol")
        if "atol" in sec:
            cfg.atol = _get_float(sec, "atol")
    if cp.has_section("output"):
        sec = cp["output"]
        if "grid_points" in sec:
            cfg.grid_points = int(sec["grid_points"])
        if "path" in sec:
            cfg.out = sec["path"].strip()
    if cp.has_section("sweep"):
        sec = cp["sweep"]
        axis1 = _parse_axis(sec, "axis1")
        if axis1 is None:
            raise ConfigError("sweep section needs at least axis1")
        try:
            cfg.sweep = SweepConfig(
                axis1=axis1, axis2=_parse_axis(sec, "axis2"),
                rtol=float(sec.get("rtol", "1e-6")),
                atol=float(sec.get("atol", "1e-9")),
                grid_points=int(sec.get("grid_points", "800")))
        except ValueError as exc:
            raise ConfigError(f"sweep: {exc}") from None
    if cp.has_section("noise"):
        sec = cp["noise"]
        try:
            cfg.noise = NoiseSpec(
                sigma_s=float(sec.get("sigma_s", "0.05")),
                sigma_p=float(sec.get("sigma_p", "0.05")),
                rho=float(sec.get("rho", "0")),
                n_samples=int(sec.get("n_samples", "200")),
                seed=int(sec.get("seed", "0")))
        except ValueError as exc:
            raise ConfigError(f"noise: {exc}") from None
    if cp.has_section("linewidth"):
        sec = cp["linewidth"]
        lw = LinewidthConfig()
        if "direction" in sec:
            parts = sec["direction"].split(",")
            if len(parts) != 2:
                raise ConfigError("linewidth direction must be 'x,y'")
            lw.direction = (float(parts[0]), float(parts[1]))
        if "threshold" in sec:
            raw = sec["threshold"].strip()
            lw.threshold = None if raw == "half-origin" else float(raw)
        cfg.lw = lw
    return cfg


def load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig(params=ProtocolParams())
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None


def dump_config(cfg: RunConfig) -> str:
    """Unparse a config; the result re-parses to an identical RunConfig."""
    lines = ["[protocol]"]
    for f in fields(ProtocolParams):
        value = getattr(cfg.params, f.name)
        lines.append(f"{f.name} = {value!r}" if isinstance(value, float)
                     else f"{f.name} = {value}")
    lines += ["", "[integrator]", f"rtol = {cfg.rtol!r}", f"atol = {cfg.atol!r}"]
    lines += ["", "[output]", f"grid_points = {cfg.grid_points}"]
    if cfg.out is not None:
        lines.append(f"path = {cfg.out}")
    if cfg.sweep is not None:
        sw = cfg.sweep
        lines += ["", "[sweep]"]
        for prefix, axis in (("axis1", sw.axis1), ("axis2", sw.axis2)):
            if axis is None:
                continue
            lines += [f"{prefix} = {axis.name}",
                      f"{prefix}_min = {axis.start!r}",
                      f"{prefix}_max = {axis.stop!r}",
                      f"{prefix}_count = {axis.count}"]
        lines += [f"rtol = {sw.rtol!r}", f"atol = {sw.atol!r}",
                  f"grid_points = {sw.grid_points}"]
    if cfg.noise is not None:
        nz = cfg.noise
        lines += ["", "[noise]", f"sigma_s = {nz.sigma_s!r}",
                  f"sigma_p = {nz.sigma_p!r}", f"rho = {nz.rho!r}",
                  f"n_samples = {nz.n_samples}", f"seed = {nz.seed}"]
    if cfg.lw is not None:
        lines += ["", "[linewidth]",
                  f"direction = {cfg.lw.direction[0]!r},{cfg.lw.direction[1]!r}"]
        lines.append("threshold = half-origin" if cfg.lw.threshold is None
                     else f"threshold = {cfg.lw.threshold!r}")
    return "\n".join(lines) + "\n"


def _fmt(value) -> str:
    return f"{value:.17g}"


def _write_csv(path: str | None, header, rows) -> None:
    def emit(fh):
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else str(v)
                             for v in row])

    if path is None:
        emit(sys.stdout)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            emit(fh)


def cmd_simulate(cfg: RunConfig, out: str | None, workers: int) -> int:
    traj = evolve_schrodinger(cfg.params, rtol=cfg.rtol, atol=cfg.atol,
                              n_output=cfg.grid_points)
    bare = ae_bare(cfg.params, traj.times)
    stokes = ae_stokes(cfg.params, traj.times, variant=VARIANT_SELF_CONSISTENT)
    rows = [
        (float(t), float(p[0]), float(p[1]), float(p[2]), float(n),
         float(b), float(s))
        for t, p, n, b, s in zip(traj.times, traj.populations, traj.norm,
                                 bare.p2, stokes.p2)
    ]
    _write_csv(out, ["t_over_T", "P0", "P1", "P2", "norm",
                     "P2_ae_bare", "P2_ae_stokes"], rows)
    return 0


def cmd_spectrum(cfg: RunConfig, out: str | None, workers: int) -> int:
    if cfg.params.gamma2 != 0:
        raise ConfigError("spectrum requires gamma2 = 0")
    sched = build_schedule(cfg.params)
    grid = sched.output_grid(cfg.grid_points)
    res = spectrum_full(grid, cfg.params)
    ds = sched.delta_s(grid)
    dp = sched.delta_p(grid)
    d = sched.delta(grid)
    wp = sched.omega_p(grid)
    rows = [
        (float(t), float(sv[0]), float(sv[1]), float(sv[2]),
         float(fv[0]), float(fv[1]), float(fv[2]),
         float(a), float(b), float(c), float(w))
        for t, sv, fv, a, b, c, w in zip(grid, res.stokes_values,
                                         res.full_values, ds, dp, d, wp)
    ]
    _write_csv(out, ["t_over_T", "s0", "s_plus", "s_minus", "e1", "e2", "e3",
                     "delta_s", "delta_p", "delta", "omega_p"], rows)
    return 0


def _sweep_from_config(cfg: RunConfig) -> SweepSpec:
    sw = cfg.resolved_sweep()
    return SweepSpec(axis1=sw.axis1, axis2=sw.axis2, base=cfg.params,
                     rtol=sw.rtol, atol=sw.atol, n_output=sw.grid_points)


def cmd_sweep(cfg: RunConfig, out: str | None, workers: int) -> int:
    spec = _sweep_from_config(cfg)
    rows = []
    if spec.axis2 is None:
        emap = sweep_1d(spec, workers=workers)
        for i, a in enumerate(emap.axis1_values):
            rows.append((float(a), float("nan"), float(emap.p1_final[i]),
                         float(emap.max_p2[i]), float(emap.final_norm[i])))
    else:
        emap = sweep_2d(spec, workers=workers)
        for i, a in enumerate(emap.axis1_values):
            for j, b in enumerate(emap.axis2_values):
                rows.append((float(a), float(b), float(emap.p1_final[i, j]),
                             float(emap.max_p2[i, j]),
                             float(emap.final_norm[i, j])))
    _write_csv(out, ["axis1", "axis2", "P1", "maxP2", "norm"], rows)
    return 0


def cmd_noise(cfg: RunConfig, out: str | None, workers: int) -> int:
    noise = cfg.resolved_noise()
    avg = quasistatic_average(cfg.params, noise, workers=workers)
    _write_csv(out, ["mean_P1", "std_P1", "n_samples", "seed",
                     "sigma_s", "sigma_p", "rho"],
               [(avg.mean_p1, avg.std_p1, noise.n_samples, noise.seed,
                 noise.sigma_s, noise.sigma_p, noise.rho)])
    return 0


def cmd_linewidth(cfg: RunConfig, out: str | None, workers: int) -> int:
    sw = cfg.resolved_sweep()
    if sw.axis2 is None:
        raise ConfigError("linewidth needs a 2-d sweep (axis1 and axis2)")
    lw_cfg = cfg.resolved_linewidth()
    emap = sweep_2d(_sweep_from_config(cfg), workers=workers)
    result = linewidth(emap, direction=lw_cfg.direction,
                       threshold=lw_cfg.threshold)
    print(f"linewidth = {_fmt(result.width)} "
          f"(direction = {lw_cfg.direction[0]:g},{lw_cfg.direction[1]:g}, "
          f"threshold = {_fmt(result.threshold)}, "
          f"bracketed = {result.bracketed_lo and result.bracketed_hi})")
    if out is not None:
        _write_csv(out, ["direction_x", "direction_y", "threshold", "width",
                         "bracketed_lo", "bracketed_hi"],
                   [(lw_cfg.direction[0], lw_cfg.direction[1],
                     result.threshold, result.width,
                     result.bracketed_lo, result.bracketed_hi)])
    return 0


def cmd_crossing(cfg: RunConfig, out: str | None, workers: int) -> int:
    t_minus, t_plus = find_crossings(cfg.params)
    sched = build_schedule(cfg.params)
    ds_c = abs(float(sched.delta_s(t_plus) - cfg.params.stray_s))
    residual = abs(4.0 * (sched.delta(t_plus) - cfg.params.stray_two_photon)
                   * (sched.delta_p(t_plus) - cfg.params.stray_p) - 1.0)
    print(f"t_minus = {_fmt(t_minus)}")
    print(f"t_plus = {_fmt(t_plus)}")
    print(f"pump_center = {_fmt(sched.pump_center)}")
    print(f"delta_s_at_crossing = {_fmt(ds_c)}")
    print(f"residual = {_fmt(residual)}")
    if out is not None:
        _write_csv(out, ["t_minus", "t_plus", "pump_center",
                         "delta_s_at_crossing", "residual"],
                   [(t_minus, t_plus, sched.pump_center, ds_c, residual)])
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "linewidth": cmd_linewidth,
    "crossing": cmd_crossing,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstirap",
        description="Chirped population transfer in a three-level Lambda system")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="INI configuration file")
        sp.add_argument("--out", help="output CSV path (default: stdout)")
        sp.add_argument("--seed", type=int, help="override the noise seed")
        sp.add_argument("--workers", type=int,
                        help="process count (default: CSTIRAP_WORKERS or 1)")
        sp.add_argument("--dual", action="store_true",
                        help="swap which field is always on")
        sp.add_argument("--flip-detunings", action="store_true",
                        help="negate the ideal detuning ramps")
        sp.add_argument("--dump-config", action="store_true",
                        help="print the effective config and exit")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.dual:
            cfg.params = dual_transform(cfg.params)
        if args.flip_detunings:
            cfg.params = flip_detunings(cfg.params)
        if args.seed is not None:
            cfg.noise = replace(cfg.resolved_noise(), seed=args.seed)
        out = args.out if args.out is not None else cfg.out
        workers = args.workers if args.workers is not None else default_workers()
        if args.dump_config:
            sys.stdout.write(dump_config(cfg))
            return 0
        return _COMMANDS[args.command](cfg, out, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NoCrossingError, PropagationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
