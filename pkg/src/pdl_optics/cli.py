"""Command-line front end.

Usage examples::

    pdl-optics bounds --x0 2 --angle 1.5707963
    pdl-optics propagate --config run.toml --output traj.csv
    pdl-optics sweep --format json --jobs 4 --output landscape.json
    pdl-optics sensitivity --x0 1 --parameter x0 --bound MT
    pdl-optics verify --quick

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical runtime error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import math
import os
import sys
from importlib import metadata

import numpy as np

from . import analytic, metrology, sweep, verify
from .config import ConfigError, RunConfig, dumps, load, override
from .core import SPEED_OF_LIGHT, displacement, gaussian_state, z_to_lab
from .errors import GridError, ModelError, PDLError, PropagationError
from .numeric import ObservableRecord, split_step

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

# (flag, dotted config key, type)
OVERRIDES = [
    ("--gamma", "beam.gamma", float),
    ("--x0", "beam.x0", float),
    ("--p0", "beam.p0", float),
    ("--r", "beam.r", float),
    ("--theta", "beam.theta", float),
    ("--n", "grid.n", int),
    ("--x-max", "grid.x_max", float),
    ("--dz", "solver.dz", float),
    ("--steps", "solver.steps", int),
    ("--stride", "solver.stride", int),
    ("--potential", "solver.potential", str),
    ("--eta", "solver.eta", float),
    ("--kernel-width", "solver.kernel_width", float),
    ("--angle", "bounds.angle", float),
    ("--angle-from", "sweep.angle_from", str),
    ("--sweep-theta", "sweep.theta", float),
    ("--parameter", "sensitivity.parameter", str),
    ("--bound", "sensitivity.bound", str),
    ("--against", "sensitivity.against", str),
    ("--delta", "sensitivity.delta", float),
    ("--snapshots", "output.snapshots", str),
]


def _version() -> str:
    try:
        return metadata.version("pdl-optics")
    except metadata.PackageNotFoundError:
        return "unknown"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML configuration file")
    common.add_argument("--output", help="output path ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json", "gnuplot", "text"))
    common.add_argument("--jobs", type=int, help="worker threads (env PDL_OPTICS_JOBS)")
    common.add_argument("--seed", type=int, help="seed for randomized checks")
    common.add_argument("--print-config", action="store_true", help="print the resolved configuration and exit")
    for flag, dest, typ in OVERRIDES:
        common.add_argument(flag, dest=dest, type=typ, default=None)

    parser = _Parser(prog="pdl-optics", description="Propagation-distance limits for inverted-parabola optics.")
    parser.add_argument(
        "--version", action="version", version=f"pdl-optics {_version()} (c = {SPEED_OF_LIGHT!r} m/s)"
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("bounds", parents=[common], help="distance bounds for one launch state")
    sub.add_parser("propagate", parents=[common], help="split-step propagation, observables as CSV")
    sub.add_parser("sweep", parents=[common], help="bound landscape over (z, |a|^2)")
    sub.add_parser("sensitivity", parents=[common], help="derivatives of the distance bounds")
    p = sub.add_parser("verify", parents=[common], help="analytic vs numeric cross-checks")
    p.add_argument("--quick", action="store_true", default=None, help="fast subset")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load(args.config) if args.config else RunConfig()
    dotted = {dest: getattr(args, dest) for _, dest, _ in OVERRIDES}
    dotted["output.path"] = args.output
    dotted["output.format"] = args.format
    dotted["verify.seed"] = args.seed
    dotted["verify.quick"] = getattr(args, "quick", None)
    jobs = args.jobs
    if jobs is None and cfg.output.jobs is None and os.environ.get("PDL_OPTICS_JOBS"):
        try:
            jobs = int(os.environ["PDL_OPTICS_JOBS"])
        except ValueError as exc:
            raise ConfigError(f"PDL_OPTICS_JOBS must be an integer: {exc}") from exc
    dotted["output.jobs"] = jobs
    return override(cfg, dotted)


@contextlib.contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _write(cfg: RunConfig, text: str):
    with _open_output(cfg.output.path) as fh:
        fh.write(text)


def _lab_distance(z, units):
    return "inf" if z == math.inf else z_to_lab(z, units)


def cmd_bounds(cfg: RunConfig) -> int:
    spec = cfg.spec()
    angle = cfg.bounds.angle
    report = analytic.pdl(spec, angle).to_dict()
    alpha, r, theta = displacement(spec)
    report["alpha_re"], report["alpha_im"] = alpha.real, alpha.imag
    report["alpha_r"], report["alpha_theta"] = r, theta
    units = cfg.units()
    lab = cfg.lab
    notes = []
    if units is not None:
        report["k0_per_m"] = units.k0
        if units.gamma_lab is not None:
            for key in ("z_mt", "z_ml", "z_pdl"):
                z = report[key]
                report[f"{key}_m"] = _lab_distance(math.inf if z == "inf" else z, units)
    if lab.delta_h_over_k0_per_cm is not None or lab.mean_h_over_k0_per_cm is not None:
        if lab.delta_h_over_k0_per_cm is None or lab.mean_h_over_k0_per_cm is None:
            raise ConfigError("lab moment overrides need both delta_h_over_k0_per_cm and mean_h_over_k0_per_cm")
        dh = lab.delta_h_over_k0_per_cm * 100.0
        mh = lab.mean_h_over_k0_per_cm * 100.0
        z_mt = angle / dh
        z_ml = angle / abs(mh) if mh else math.inf
        z_pdl = max(z_mt, z_ml)
        report["lab_moments"] = {
            "delta_h_per_m": dh,
            "mean_h_per_m": mh,
            "z_mt_m": z_mt,
            "z_ml_m": "inf" if z_ml == math.inf else z_ml,
            "z_pdl_m": "inf" if z_pdl == math.inf else z_pdl,
        }
        if lab.reference_z_pdl_mm is not None:
            ref = lab.reference_z_pdl_mm * 1e-3
            report["lab_moments"]["reference_z_pdl_m"] = ref
            if not math.isclose(z_pdl, ref, rel_tol=0.05):
                notes.append(
                    f"computed z_PDL = {z_pdl * 1e3:.3f} mm (z_MT = {z_mt * 1e3:.3f} mm, "
                    f"z_ML = {z_ml * 1e3:.3f} mm) does not reproduce the reference value "
                    f"{lab.reference_z_pdl_mm:g} mm for these moments"
                )
    if notes:
        report["notes"] = notes
        for note in notes:
            print(f"note: {note}", file=sys.stderr)
    _write(cfg, json.dumps(report, indent=2) + "\n")
    return EXIT_OK


def cmd_propagate(cfg: RunConfig) -> int:
    grid = cfg.grid_obj()
    spec = cfg.spec()
    model = cfg.model()
    s = cfg.solver
    try:
        launch = gaussian_state(spec, grid)
    except GridError as exc:
        raise ConfigError(str(exc)) from exc
    with _open_output(cfg.output.path) as fh:
        fh.write(ObservableRecord.CSV_HEADER + "\n")

        def emit(rec):
            fh.write(rec.csv_row() + "\n")
            fh.flush()

        try:
            traj = split_step(launch, model, s.dz, s.steps, s.stride, keep_snapshots=bool(cfg.output.snapshots),
                              on_record=emit)
        except PropagationError as exc:
            fh.write(f"# error: {exc}\n")
            fh.flush()
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
    if cfg.output.snapshots:
        np.savez(
            cfg.output.snapshots,
            x=grid.x,
            z=np.array([st.z for st in traj.snapshots]),
            field=np.array([st.samples for st in traj.snapshots]).reshape(-1, grid.n),
        )
    return EXIT_OK


def cmd_sweep(cfg: RunConfig) -> int:
    sw = cfg.sweep
    angle_from = sw.angle_from
    if angle_from != "fidelity":
        if not angle_from.startswith("fixed:"):
            raise ConfigError("sweep.angle_from must be 'fidelity' or 'fixed:<radians>'")
        try:
            angle_from = float(angle_from.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad fixed angle in {sw.angle_from!r}") from exc
    try:
        table = sweep.sweep_bounds(
            sweep.Axis("z", sw.z_min, sw.z_max, sw.z_count, sw.z_scale),
            sweep.Axis("a_squared", sw.a2_min, sw.a2_max, sw.a2_count, sw.a2_scale),
            theta=sw.theta,
            gamma=cfg.beam.gamma,
            angle_from=angle_from,
            jobs=cfg.output.jobs or 1,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    fmt = cfg.output.format or "csv"
    if fmt == "text":
        raise ConfigError("sweep supports csv, json or gnuplot output")
    _write(cfg, sweep.export(table, fmt, sw.quantity).decode())
    return EXIT_OK


def cmd_sensitivity(cfg: RunConfig) -> int:
    spec = cfg.spec()
    sc = cfg.sensitivity
    try:
        if sc.against is not None:
            units = cfg.units()
            if units is None:
                raise ConfigError("lab sensitivity needs a [lab] block")
            rep = metrology.lab_sensitivity(spec, units, sc.against, sc.bound, cfg.bounds.angle)
        else:
            rep = metrology.sensitivity(spec, sc.parameter, sc.bound, cfg.bounds.angle)
    except (ValueError, PDLError) as exc:
        raise ConfigError(str(exc)) from exc
    out = rep.to_dict()
    if sc.delta is not None:
        out["delta"] = sc.delta
        out["shift"] = rep.shift(sc.delta)
        if rep.lab_unit is not None:
            out["shift_m"] = rep.analytic * sc.delta
    if (cfg.output.format or "json") == "csv":
        keys = list(out)
        _write(cfg, ",".join(keys) + "\n" + ",".join(str(out[k]) for k in keys) + "\n")
    else:
        _write(cfg, json.dumps(out, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    results = verify.run_suite(cfg.solver.dz, cfg.verify.seed, cfg.verify.quick, cfg.output.jobs or 1)
    if (cfg.output.format or "text") == "json":
        _write(cfg, json.dumps([r.__dict__ for r in results], indent=2) + "\n")
    else:
        lines = [r.line() for r in results]
        lines.append(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
        _write(cfg, "\n".join(lines) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {
    "bounds": cmd_bounds,
    "propagate": cmd_propagate,
    "sweep": cmd_sweep,
    "sensitivity": cmd_sensitivity,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.print_config:
            sys.stdout.write(dumps(cfg))
            return EXIT_OK
        return COMMANDS[args.command](cfg)
    except (ConfigError, ModelError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PDLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
