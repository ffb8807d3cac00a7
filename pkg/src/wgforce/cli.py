"""Command-line interface.

    wgforce <subcommand> [--config PATH] [--preset 2|3|4] [--out DIR]
                         [--threads N] [--no-plots]

Subcommands: force-curve, kappa-sweep, delta-sweep, shift, preset.

Each sweep writes one CSV (and one PNG unless --no-plots) into the output
directory.  CSV headers start with '#' and echo the complete effective
configuration, so any result can be reproduced from its own file.  Floats
are printed with 17 significant digits for lossless round-trips.

Exit codes: 0 success, 2 configuration or filesystem error, 3 numerical
(quadrature or derivative-consistency) failure.
"""

from __future__ import annotations

import argparse
import os
import sys as _sys

from .config import ConfigError, SimConfig, parse_config, preset, sweep_grid
from .forces import DerivativeMismatch, NoSignChange, capture_range
from .quadrature import QuadratureFailure
from .steady_state import waveguide_shift
from .sweeps import power_law_fit, run_sweep

_COLUMNS = {
    "force-curve": ("v_m_per_s", "force_N", "force_over_Ffs", "quad_error_N"),
    "kappa-sweep": ("kappa_per_s", "delta_rad_per_s", "beta_kg_per_s",
                    "beta_normalized", "quad_error"),
    "delta-sweep": ("delta_rad_per_s", "kappa_per_s", "beta_kg_per_s",
                    "beta_normalized", "quad_error"),
    "shift": ("v_m_per_s", "delta_shift_rad_per_s", "gamma_broad_rad_per_s"),
}

_FILES = {
    "force-curve": "force_curve",
    "kappa-sweep": "kappa_sweep",
    "delta-sweep": "delta_sweep",
    "shift": "shift",
}


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, tuple):
        return "[" + ",".join(_fmt(v) for v in x) + "]"
    return str(x)


def _write_csv(path: str, command: str, config: SimConfig, columns, rows):
    """Write atomically: a temp file is renamed into place on success and
    removed on failure, so no partial output survives."""
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="\n") as fh:
            fh.write(f"# wgforce {command}\n")
            for key, value in config.echo_items():
                fh.write(f"# {key} = {_fmt(value)}\n")
            fh.write("# columns: " + ",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _shift_velocities(config: SimConfig, sys):
    """Velocity grid for the shift table: the sweep grid when it is a
    velocity grid, otherwise the default force-curve grid."""
    sweep = config.sweep
    if sweep.kind != "force_curve":
        sweep = SimConfig().sweep
    unit = sys.model.kappa / sys.pump.k_p
    return [u * unit for u in sweep_grid(sweep)]


def run(subcommand: str, config: SimConfig, out_dir: str, threads: int | None = None,
        plots: bool = True) -> int:
    """Execute one subcommand; returns the process exit code."""
    threads = threads or os.cpu_count() or 1
    try:
        if subcommand == "preset":
            print(config.to_json())
            return 0

        os.makedirs(out_dir, exist_ok=True)
        base = os.path.join(out_dir, _FILES[subcommand])
        csv_path = base + ".csv"

        if subcommand == "force-curve":
            rows = run_sweep("force_curve", config, processes=threads)
            _write_csv(csv_path, subcommand, config, _COLUMNS[subcommand],
                       [(r.x, r.value, r.normalized, r.quad_error) for r in rows])
            sys = config.build_system()
            unit = sys.model.kappa / sys.pump.k_p
            try:
                v_c = capture_range(sys)
                print(f"force-curve: capture_range_m_per_s={v_c:.6g} "
                      f"({v_c / unit:.4g} kappa/k_p)")
            except NoSignChange:
                print("force-curve: capture_range=none "
                      "(force does not change sign below the bracket cap)")
            if plots:
                from . import plotting

                plotting.plot_force_curve(rows, sys.model.kappa, sys.pump.k_p,
                                          base + ".png")

        elif subcommand == "kappa-sweep":
            rows = run_sweep("kappa", config, processes=threads)
            _write_csv(csv_path, subcommand, config, _COLUMNS[subcommand],
                       [(r.x, r.secondary, r.value, r.normalized, r.quad_error)
                        for r in rows])
            n = config.sweep.n_points
            parts = []
            for i, fam in enumerate(config.sweep.family):
                chunk = rows[i * n:(i + 1) * n]
                fit = power_law_fit([(r.x, r.value) for r in chunk])
                unit = "kappa" if config.sweep.delta_mode == "ratio" else "rad/s"
                parts.append(f"exponent={fit.exponent:.4f} (delta={fam:g} {unit}, "
                             f"r2={fit.r_squared:.6f})")
            print("kappa-sweep: " + "; ".join(parts))
            if plots:
                from . import plotting

                plotting.plot_kappa_sweep(rows, config.sweep.family,
                                          config.sweep.delta_mode, base + ".png")

        elif subcommand == "delta-sweep":
            rows = run_sweep("delta", config, processes=threads)
            _write_csv(csv_path, subcommand, config, _COLUMNS[subcommand],
                       [(r.x, r.secondary, r.value, r.normalized, r.quad_error)
                        for r in rows])
            n = config.sweep.n_points
            parts = []
            for i, fam in enumerate(config.sweep.family):
                chunk = rows[i * n:(i + 1) * n]
                best = max(chunk, key=lambda r: r.value)
                parts.append(f"argmax_delta_rad_per_s={best.x:.6g} (kappa={fam:g})")
            print("delta-sweep: " + "; ".join(parts))
            if plots:
                from . import plotting

                plotting.plot_delta_sweep(rows, config.sweep.family, base + ".png")

        elif subcommand == "shift":
            sys = config.build_system()
            vs = _shift_velocities(config, sys)
            shifts = [waveguide_shift(v, +1, sys) for v in vs]
            _write_csv(csv_path, subcommand, config, _COLUMNS[subcommand],
                       [(v, s.delta_shift, s.gamma_broad) for v, s in zip(vs, shifts)])
            peak = max(shifts, key=lambda s: s.gamma_broad)
            print(f"shift: rows={len(vs)} max_gamma_broad_rad_per_s="
                  f"{peak.gamma_broad:.6g}")
            if plots:
                from . import plotting

                plotting.plot_shift(vs, shifts, sys.model.kappa, sys.pump.k_p,
                                    base + ".png")

        else:
            raise ConfigError("subcommand", f"unknown subcommand {subcommand!r}")

    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except OSError as exc:
        print(f"filesystem error: {exc}", file=_sys.stderr)
        return 2
    except (QuadratureFailure, DerivativeMismatch) as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 3
    return 0


def _load_config(args) -> SimConfig:
    if args.config is not None and args.preset is not None:
        raise ConfigError("cli", "--config and --preset are mutually exclusive")
    if args.preset is not None:
        return preset(args.preset)
    if args.config is not None:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError("cli.config", f"cannot read {args.config}: {exc}") from exc
        return parse_config(text)
    return parse_config("{}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="wgforce",
        description="Velocity-dependent optical forces on a polarizable particle "
                    "coupled to a lossy waveguide.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in [
        ("force-curve", "total force versus velocity"),
        ("kappa-sweep", "friction coefficient versus waveguide loss rate"),
        ("delta-sweep", "friction coefficient versus threshold detuning"),
        ("shift", "waveguide-induced light shift and broadening versus velocity"),
        ("preset", "print a built-in figure configuration as JSON"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="path to a JSON config file")
        p.add_argument("--preset", type=int, choices=(2, 3, 4),
                       help="use a built-in figure configuration")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker processes (default: machine parallelism)")
        p.add_argument("--no-plots", action="store_true",
                       help="write CSV only, skip figure rendering")
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    return run(args.subcommand, config, args.out, threads=args.threads,
               plots=not args.no_plots)


if __name__ == "__main__":
    raise SystemExit(main())
