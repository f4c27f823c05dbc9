"""Command-line front end.

Every subcommand reads a JSON config (or a file produced by an earlier
subcommand), writes its outputs atomically and prints a one-line summary.
Exit status: 0 on success, 1 when a bound is violated or a schedule cannot
be built, 2 on usage or config errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from . import CONFIG_SCHEMA_VERSION, __version__
from .beta import DEFAULT_DELTAS, estimate_beta
from .circle_sets import IntervalUnion
from .counterexamples import BlaschkeProduct, build_sets, verify_lemma1
from .curves import ApproachCurve
from .errors import QuadratureError, ScheduleError
from .experiments import DEFAULT_SEED, sweep
from .kernels import Kernel
from .schedule import VARIANTS, Schedule, build_schedule, validate_schedule
from .transform import phi_complex, phi_indicator


class ConfigError(ValueError):
    pass


# -- io helpers ---------------------------------------------------------------


def atomic_write(path, text):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _flatten(row):
    out = {}
    for key, v in row.items():
        if isinstance(v, complex):
            out[key + "_re"] = v.real
            out[key + "_im"] = v.imag
        else:
            out[key] = v
    return out


def rows_to_csv(rows):
    """CSV text with floats written by repr, so equal data gives equal bytes."""
    rows = [_flatten(r) for r in rows]
    buf = io.StringIO()
    if not rows:
        return ""
    fields = list(rows[0])
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for r in rows:
        w.writerow([_cell(r.get(f, "")) for f in fields])
    return buf.getvalue()


def _json_default(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if hasattr(v, "item"):
        return v.item()
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


# -- config validation ----------------------------------------------------------


def parse_kernel(spec):
    if isinstance(spec, str):
        spec = {"family": spec}
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("kernel must be a family name or an object with a 'family' key")
    try:
        return Kernel.from_dict(spec)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_curve(spec):
    if not isinstance(spec, dict) or "family" not in spec:
        raise ConfigError("curve must be an object with a 'family' key")
    try:
        return ApproachCurve.from_dict(spec)
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc


def _int(config, key, default=None, minimum=None):
    v = config.get(key, default)
    if v is None:
        raise ConfigError(f"config needs '{key}'")
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"'{key}' must be an integer")
    if minimum is not None and v < minimum:
        raise ConfigError(f"'{key}' must be >= {minimum}, got {v}")
    return v


def _float(config, key, default=None):
    v = config.get(key, default)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"'{key}' must be a number")
    return float(v)


def load_experiment_config(path, variant=None):
    """Read and check an experiment config; returns a normalized dict."""
    raw = _read_json(path)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    schema = raw.get("schema_version", CONFIG_SCHEMA_VERSION)
    if schema != CONFIG_SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {schema!r}; this build reads {CONFIG_SCHEMA_VERSION}")
    cfg = dict(raw)
    cfg["kernel"] = parse_kernel(raw.get("kernel")).to_dict()
    cfg["curve"] = parse_curve(raw.get("curve")).to_dict()
    cfg["variant"] = variant or raw.get("variant", "theorem1")
    if cfg["variant"] not in VARIANTS:
        raise ConfigError(f"variant must be one of {VARIANTS}")
    cfg["K"] = _int(raw, "K", minimum=1)
    cfg["N"] = _int(raw, "N", 0, minimum=0)
    cfg["seed"] = _int(raw, "seed", DEFAULT_SEED)
    cfg["beta_target"] = _float(raw, "beta_target", 0.98)
    if not 0.5 < cfg["beta_target"] <= 1.0:
        raise ConfigError("beta_target must lie in (1/2, 1]")
    if raw.get("tail_exponent") is not None and raw["tail_exponent"] not in (0.25, 1, 1.0):
        raise ConfigError("tail_exponent must be 0.25 or 1")
    if "k_level" in raw:
        cfg["k_level"] = _int(raw, "k_level", minimum=1)
        if cfg["k_level"] > cfg["K"]:
            raise ConfigError("k_level must not exceed K")
    cfg["tol"] = _float(raw, "tol", 1e-8)
    if cfg["tol"] < 1e-10:
        raise ConfigError("tol must be >= 1e-10")
    return cfg


# -- subcommands ------------------------------------------------------------------


def cmd_schedule(args):
    cfg = load_experiment_config(args.config)
    kernel = Kernel.from_dict(cfg["kernel"])
    curve = ApproachCurve.from_dict(cfg["curve"])
    try:
        sched = build_schedule(kernel, curve, cfg["K"], cfg["variant"], cfg["beta_target"],
                               cfg.get("tail_exponent"))
    except ScheduleError as exc:
        print(f"schedule: failed: {exc}")
        return 1
    out = sched.to_json()
    passed = sched.passed
    if args.validate:
        report = validate_schedule(sched, kernel, curve)
        out["validation"] = report.to_json()
        passed = passed and report.passed
    atomic_write(args.out, dumps(out))
    print(f"schedule: K={sched.K} variant={sched.variant} certificate={'pass' if passed else 'FAIL'} -> {args.out}")
    return 0 if passed else 1


def _load_schedule(path):
    data = _read_json(path)
    try:
        return Schedule.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path} is not a schedule: {exc}") from exc


def cmd_construct(args):
    sched = _load_schedule(args.schedule)
    if sched.variant == "theorem1":
        obj = {"variant": "theorem1", **build_sets(sched).to_json()}
        what = f"{len(obj['sets'])} sets"
    else:
        obj = {"variant": "theorem2", "blaschke": sched.blaschke().to_json()}
        what = f"Blaschke product with {sched.K} factors"
    atomic_write(args.out, dumps(obj))
    print(f"construct: {what} -> {args.out}")
    return 0


def cmd_beta(args):
    raw = _read_json(args.config)
    kernel = parse_kernel(raw.get("kernel"))
    curve = parse_curve(raw.get("curve"))
    deltas = raw.get("deltas", list(DEFAULT_DELTAS))
    try:
        est = estimate_beta(kernel, curve, deltas, raw.get("r_grid"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rows = [{"delta": d, "r": r, "inner_mass": m} for d, r, m in est.table]
    atomic_write(args.csv, rows_to_csv(rows))
    if args.out:
        atomic_write(args.out, dumps(est.to_json()))
    print(f"beta: estimate {est.value!r} over {len(est.delta_grid)} deltas -> {args.csv}")
    return 0


def cmd_phi(args):
    raw = _read_json(args.config)
    kernel = parse_kernel(raw.get("kernel"))
    if "x" not in raw:
        raise ConfigError("phi config needs 'x'")
    x = _float(raw, "x")
    if "r_grid" in raw:
        rs = [float(r) for r in raw["r_grid"]]
    elif "r" in raw:
        rs = [_float(raw, "r")]
    else:
        raise ConfigError("phi config needs 'r' or 'r_grid'")
    if any(not 0.0 < r < 1.0 for r in rs):
        raise ConfigError("radii must lie in (0, 1)")
    tol = _float(raw, "tol", 1e-8)
    rows = []
    try:
        if "set" in raw:
            E = IntervalUnion([tuple(a) for a in raw["set"]])
            rows = [{"r": r, "x": x, "phi": phi_indicator(kernel, r, x, E)} for r in rs]
        elif "blaschke" in raw:
            B = BlaschkeProduct.from_json(raw["blaschke"])
            rows = [{"r": r, "x": x, "phi": phi_complex(kernel, r, x, B, tol=tol)} for r in rs]
        else:
            raise ConfigError("phi config needs 'set' (list of arcs) or 'blaschke' (factor list)")
    except QuadratureError as exc:
        print(f"phi: {exc}")
        return 1
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    if args.csv:
        atomic_write(args.csv, rows_to_csv(rows))
        print(f"phi: {len(rows)} values -> {args.csv}")
    else:
        for row in rows:
            print(f"phi: r={row['r']!r} x={row['x']!r} value={row['phi']!r}")
    return 0


def cmd_oscillate(args):
    cfg = load_experiment_config(args.config, variant=args.variant)
    if args.schedule:
        sched = _load_schedule(args.schedule)
        if sched.variant != cfg["variant"]:
            raise ConfigError(f"schedule variant {sched.variant} does not match {cfg['variant']}")
        cfg["schedule"] = sched.to_json()
    try:
        rows, summary = sweep(cfg)
    except ScheduleError as exc:
        print(f"oscillate: schedule failed: {exc}")
        return 1
    summary["config"] = {k: v for k, v in cfg.items() if k != "schedule"}
    atomic_write(args.csv, rows_to_csv(rows))
    if args.out:
        atomic_write(args.out, dumps(summary))
    bad = summary["violations"]
    print(f"oscillate: variant={summary['variant']} N={summary['N']} seed={summary['seed']} "
          f"min_gap={summary['min_gap']!r} violations={bad} -> {args.csv}")
    return 1 if bad else 0


def cmd_verify_lemma1(args):
    if args.n < 1:
        raise ConfigError("n must be >= 1")
    try:
        report = verify_lemma1(args.n, args.delta, args.grid_density)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    text = dumps(report)
    if args.out:
        atomic_write(args.out, text)
    print(f"verify-lemma1: n={args.n} delta={args.delta!r} plus={report['max_plus_dev']!r} "
          f"minus={report['max_minus_dev']!r} {'pass' if report['passed'] else 'FAIL'}")
    return 0 if report["passed"] else 1


# -- entry point --------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="tangential", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"tangential {__version__} (config schema {CONFIG_SCHEMA_VERSION})")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("schedule", help="build and certify a schedule")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--validate", action="store_true", help="re-check every mass by quadrature")
    s.set_defaults(func=cmd_schedule)

    s = sub.add_parser("construct", help="build the sets or Blaschke product of a schedule")
    s.add_argument("--schedule", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("beta", help="tabulate the concentration index estimate")
    s.add_argument("--config", required=True)
    s.add_argument("--csv", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_beta)

    s = sub.add_parser("phi", help="evaluate the operator on a set or Blaschke product")
    s.add_argument("--config", required=True)
    s.add_argument("--csv")
    s.set_defaults(func=cmd_phi)

    s = sub.add_parser("oscillate", help="sweep the oscillation inequalities over random points")
    s.add_argument("--variant", choices=VARIANTS, required=True)
    s.add_argument("--config", required=True)
    s.add_argument("--schedule")
    s.add_argument("--csv", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_oscillate)

    s = sub.add_parser("verify-lemma1", help="grid check of the Blaschke factor bounds")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--grid-density", type=int, default=64)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify_lemma1)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


run = main
