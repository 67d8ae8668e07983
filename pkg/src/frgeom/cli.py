"""Command-line front end: ``frgeom {shoot,connect,report,profile}``.

Every command reads a JSON run configuration (``--config``) or builds a
default one from ``--preset``; flags override individual entries.  Output
files land in ``--out`` (CSV with 17 significant digits, JSON summaries,
plain-text reports, and SVG figures with ``--svg``).

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .completeness import classify, format_report
from .config import RunConfig, load
from .curvature import revolution_profile, sectional_table
from .errors import BoundaryHitError, ConfigError, EmptyProfileError, GeometryError
from .geodesics import GeodesicInitial, connect, shoot
from .manifold import SpherePoint, orthonormal_direction
from .transforms import PolarPoint

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

# default s-window for tables when the profile domain is unbounded
_S_WINDOW = (-3.0, 3.0)


def _fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else _fmt(c) for c in row])
    return path


def write_json(path: Path, data) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, sort_keys=True, indent=2, default=_json_default)
        fh.write("\n")
    return path


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _finite_or_str(x):
    x = float(x)
    return x if math.isfinite(x) else ("inf" if x > 0 else "-inf")


def path_csv(path_obj, dest: Path, include_fields=False) -> Path:
    cols = path_obj.columns(include_fields)
    return write_csv(dest, list(cols), zip(*cols.values()))


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.output["dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def default_s_range(profile, margin=0.05):
    lo, hi = profile.s_bounds
    lo_w = lo if math.isfinite(lo) else _S_WINDOW[0]
    hi_w = hi if math.isfinite(hi) else _S_WINDOW[1]
    if not math.isfinite(lo) and math.isfinite(hi):
        lo_w = min(_S_WINDOW[0], hi - 6.0)
    if math.isfinite(lo) and not math.isfinite(hi):
        hi_w = max(_S_WINDOW[1], lo + 6.0)
    pad = margin * (hi_w - lo_w)
    return (lo_w + pad if math.isfinite(lo) else lo_w, hi_w - pad if math.isfinite(hi) else hi_w)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_shoot(config: RunConfig) -> list[Path]:
    """One CSV per initial radial speed plus ``planar.csv`` and ``summary.json``."""
    p = config.params
    spec = config.spec()
    profile = config.profile()
    phi0 = config.sphere_point("phi0")
    direction = config.field("direction")
    out = _out_dir(config)
    files, planar_rows, curves, summary, hits = [], [], [], [], []
    for i, c in enumerate(p["r_t0"]):
        init = GeodesicInitial.in_plane(PolarPoint(p["r0"], phi0), c, p["psi_norm"], direction)
        entry = {"index": i, "r_t0": c, "boundary_hit": False}
        try:
            path = shoot(init, spec, p["t_end"], p["n_steps"], profile, p["adaptive"])
        except BoundaryHitError as exc:
            path = exc.path
            hits.append(exc)
            entry.update(boundary_hit=True, t_exit=exc.t_exit, boundary=exc.boundary)
        entry["drift"] = path.drift
        entry["samples"] = len(path)
        summary.append(entry)
        files.append(path_csv(path, out / f"geodesic_{i:02d}.csv", config.output["fields"]))
        x, y = path.planar()
        planar_rows.extend((str(i), c, t, xx, yy) for t, xx, yy in zip(path.times, x, y))
        curves.append((f"r_t(0) = {c:g}", x, y))
    files.append(write_csv(out / "planar.csv", ["geodesic", "r_t0", "t", "x", "y"], planar_rows))
    files.append(write_json(out / "summary.json", {"geodesics": summary,
                                                   "coefficients": config.coefficients}))
    if config.output["svg"]:
        from .plotting import planar_figure

        planar_figure(curves, out / "planar.svg", title=spec.name)
        files.append(out / "planar.svg")
    if hits and not p["allow_boundary_hits"]:
        first = hits[0]
        raise BoundaryHitError(f"{len(hits)} geodesic(s) left the domain; {first}",
                               first.path, first.t_exit, first.boundary)
    return files


def _target_direction(config: RunConfig, phi0: SpherePoint) -> SpherePoint:
    p = config.params
    if p["phi1"] is not None:
        return config.sphere_point("phi1")
    th = p["theta1"]
    u = orthonormal_direction(phi0)
    return SpherePoint.normalize(phi0.field * math.cos(th) + u * math.sin(th))


def cmd_connect(config: RunConfig) -> list[Path]:
    """``path.csv`` and ``summary.json`` for the minimal geodesic between two points."""
    p = config.params
    spec = config.spec()
    profile = config.profile()
    phi0 = config.sphere_point("phi0")
    phi1 = _target_direction(config, phi0)
    out = _out_dir(config)
    p0, p1 = PolarPoint(p["r0"], phi0), PolarPoint(p["r1"], phi1)
    try:
        res = connect(p0, p1, spec, p["tol"], p["n_starts"], profile=profile,
                      n_samples=p["n_samples"])
    except GeometryError as exc:
        write_json(out / "summary.json", {"status": "failed", "error": str(exc),
                                          "best": getattr(exc, "best", None)})
        raise
    drift = res.path.drift if len(res.path) > 1 else {"A0": 0.0, "energy": 0.0,
                                                      "first_integral": 0.0}
    summary = {
        "status": "ok",
        "distance": res.distance,
        "iterations": res.iterations,
        "n_steps": res.n_steps,
        "mismatch": res.mismatch,
        "drift": drift,
        "s0": float(profile.W(p["r0"])),
        "s1": float(profile.W(p["r1"])),
        "theta1": float(res.path.theta[-1]),
    }
    return [path_csv(res.path, out / "path.csv", config.output["fields"]),
            write_json(out / "summary.json", summary)]


def cmd_report(config: RunConfig) -> list[Path]:
    """Completeness report, completion conditions and a curvature table."""
    p = config.params
    profile = config.profile()
    spec = config.spec()
    out = _out_dir(config)
    if spec is not None:
        text = format_report(classify(spec, p["quad_tol"]), spec)
    else:
        lo, hi = profile.s_bounds
        text = (f"[profile]\nname: {profile.name}\ns_domain: {_fmt(lo)} {_fmt(hi)}\n")
    s_range = p["s_range"] or default_s_range(profile)
    s = np.linspace(s_range[0], s_range[1], p["n_samples"])
    table = sectional_table(profile, s)
    valid = table[:, 6].astype(bool)
    lines = ["", "[curvature]",
             f"s_range: {_fmt(s_range[0])} {_fmt(s_range[1])}",
             f"valid_samples: {int(valid.sum())}/{valid.size}",
             "columns: s sec_sphere sec_mixed valid"]
    lines += [f"{_fmt(r[0])} {_fmt(r[4])} {_fmt(r[5])} {str(bool(r[6])).lower()}" for r in table]
    report = out / "report.txt"
    report.write_text(text + "\n".join(lines) + "\n", encoding="utf-8")
    rows = [list(r[:6]) + ["true" if r[6] else "false"] for r in table]
    files = [report, write_csv(out / "curvature.csv",
                               ["s", "a", "da", "dda", "sec_sphere", "sec_mixed", "valid"], rows)]
    if config.output["svg"]:
        from .plotting import curvature_figure

        curvature_figure(table, out / "curvature.svg", title=profile.name)
        files.append(out / "curvature.svg")
    return files


def cmd_profile(config: RunConfig) -> list[Path]:
    """Revolution profile ``(s, c1, c2, valid)``; the CSV is written even when empty."""
    p = config.params
    profile = config.profile()
    out = _out_dir(config)
    s_range = p["s_range"] or default_s_range(profile)
    empty = None
    try:
        curve = revolution_profile(profile, s_range, p["n"])
    except EmptyProfileError as exc:
        curve, empty = exc.profile, exc
    rows = [(s, c1, c2, "true" if v else "false") for s, c1, c2, v in curve.rows()]
    files = [write_csv(out / "profile.csv", ["s", "c1", "c2", "valid"], rows)]
    if empty is not None:
        raise empty
    if config.output["svg"]:
        from .plotting import profile_figure

        profile_figure(curve, out / "profile.svg", title=profile.name)
        files.append(out / "profile.svg")
    return files


COMMANDS = {"shoot": cmd_shoot, "connect": cmd_connect, "report": cmd_report,
            "profile": cmd_profile}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frgeom", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "shoot": "integrate a fan of geodesics from one point",
        "connect": "minimal geodesic and distance between two points",
        "report": "completeness, completions and curvature table",
        "profile": "hypersurface-of-revolution profile export",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH", help="JSON run configuration")
        p.add_argument("--preset", metavar="NAME", help="coefficient preset or direct profile")
        p.add_argument("--out", metavar="DIR", help="output directory")
        p.add_argument("--steps", metavar="N", type=int, help="step or sample count")
        p.add_argument("--tol", metavar="X", type=float, help="solver or quadrature tolerance")
        p.add_argument("--svg", action="store_true", help="also render SVG figures")
    return parser


def resolve_config(args) -> RunConfig:
    if args.config:
        config = load(args.config)
        if config.command != args.command:
            raise ConfigError(f"config is for {config.command!r}, not {args.command!r}")
    elif args.preset:
        config = RunConfig.from_dict({"command": args.command, "coefficients": {"preset": "reciprocal"}})
    else:
        raise ConfigError("give --config or --preset")
    return config.with_overrides(args.preset, args.out, args.steps, args.tol, args.svg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"frgeom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"frgeom: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        files = COMMANDS[args.command](config)
    except ConfigError as exc:
        print(f"frgeom: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GeometryError as exc:
        print(f"frgeom: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"frgeom: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
