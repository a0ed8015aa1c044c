"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 analysis failed for every trace.
"""

from __future__ import annotations

import argparse
import csv
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .core import (AScan, ConvergenceError, DetectionError, InconsistentTOFError,
                   InvalidInputError)
from .detect import DEFAULT_GAP_MIN, optimal_threshold, threshold_sweep
from .forward import CANONICAL_GEOMETRY, PRESETS, synthesize_pair_scans, synthesize_sr_scans
from .io import (NS, SurveyManifest, dump_json, fmt, geometry_from_dict, geometry_to_dict,
                 load_json, profile_from_dict, profile_to_dict, read_scan_csv,
                 synth_config_from_dict, synth_config_to_dict, write_scan_csv)
from .pipeline import sr_from_scans, xcmp_from_scans
from .sensitivity import Baseline, PerturbationSpec, run_all

WORKERS_ENV = "XCMP_GPR_WORKERS"

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2

XCMP_COLUMNS = ["trace", "dt1_ns", "dt2_ns", "t1_ns", "t2_ns", "x1_m", "x2_m", "epsilon",
                "thickness_m", "theta1_deg", "theta2_deg", "residual", "status"]
SR_COLUMNS = ["trace", "a0", "a_inc", "reflection_ratio", "epsilon", "dt_ns", "thickness_m",
              "status"]


def versions() -> dict:
    return {"xcmp_gpr": __version__, "numpy": np.__version__, "scipy": scipy.__version__,
            "python": platform.python_version()}


def write_rows(path: Path, columns, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([row.get(c, "") for c in columns])


def write_summary(out: Path, command: str, config: dict, **extra):
    dump_json({"command": command, "config": config, "versions": versions(), **extra},
              out.with_name(out.stem + ".summary.json"))


def _status(exc: Exception) -> str:
    if isinstance(exc, DetectionError):
        return "detection_failed"
    if isinstance(exc, ConvergenceError):
        return "no_convergence"
    if isinstance(exc, InconsistentTOFError):
        return "inconsistent_tof"
    return "invalid_input"


def _xcmp_trace(job):
    i, inner, outer, c_in, c_out, window, geometry, threshold, gap_min = job
    mk = lambda a: None if a is None else AScan(a, window, trace_index=i)  # noqa: E731
    try:
        a = xcmp_from_scans(mk(inner), mk(outer), geometry, mk(c_in), mk(c_out),
                            threshold, gap_min)
    except (DetectionError, ConvergenceError, InconsistentTOFError, InvalidInputError) as exc:
        return {"trace": i, "status": _status(exc)}
    r = a.result
    return {"trace": i, "dt1_ns": fmt(a.inner.delta_t / NS), "dt2_ns": fmt(a.outer.delta_t / NS),
            "t1_ns": fmt(r.t1 / NS), "t2_ns": fmt(r.t2 / NS), "x1_m": fmt(r.x1),
            "x2_m": fmt(r.x2), "epsilon": fmt(r.epsilon_bulk), "thickness_m": fmt(r.thickness),
            "theta1_deg": fmt(np.degrees(r.theta_i1)), "theta2_deg": fmt(np.degrees(r.theta_i2)),
            "residual": fmt(r.residual_norm), "status": "ok"}


def _sr_trace(job):
    i, pavement, metal, window, threshold, gap_min = job
    try:
        a = sr_from_scans(AScan(pavement, window, trace_index=i), AScan(metal, window),
                          threshold, gap_min)
    except (DetectionError, InvalidInputError) as exc:
        return {"trace": i, "status": _status(exc)}
    r = a.result
    return {"trace": i, "a0": fmt(a.a0), "a_inc": fmt(a.a_inc),
            "reflection_ratio": fmt(r.reflection_ratio), "epsilon": fmt(r.epsilon),
            "dt_ns": fmt(a.tof.delta_t / NS), "thickness_m": fmt(r.thickness), "status": "ok"}


def run_jobs(fn, jobs, workers: int):
    """Apply ``fn`` to every job, preserving job order."""
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _columns_per_trace(data: np.ndarray, n_traces: int, what: str):
    if data.shape[1] == 1:
        return [data[:, 0]] * n_traces
    if data.shape[1] != n_traces:
        raise InvalidInputError(f"{what} has {data.shape[1]} traces, expected 1 or {n_traces}")
    return [data[:, i] for i in range(n_traces)]


def _load_manifest(args) -> tuple[SurveyManifest, Path]:
    workdir = Path(args.workdir)
    return SurveyManifest.from_dict(load_json(workdir / args.manifest)), workdir


def _apply_overrides(manifest: SurveyManifest, args):
    if args.threshold is not None:
        manifest.threshold = args.threshold
    if args.gap_min is not None:
        manifest.gap_min = args.gap_min


def cmd_synth(args) -> int:
    workdir = Path(args.workdir)
    if args.preset:
        profile = PRESETS.get(args.preset)
        if profile is None:
            raise InvalidInputError(f"unknown preset {args.preset!r}; choose from {sorted(PRESETS)}")
    elif args.profile:
        profile = profile_from_dict(load_json(workdir / args.profile))
    else:
        raise InvalidInputError("give --profile or --preset")
    geometry = (geometry_from_dict(load_json(workdir / args.geometry)) if args.geometry
                else CANONICAL_GEOMETRY)
    config = synth_config_from_dict(load_json(workdir / args.synth) if args.synth else {})

    scans = synthesize_pair_scans(profile, geometry, config)
    sr = synthesize_sr_scans(profile, config, height=geometry.d0)

    out = workdir / args.out_dir
    out.mkdir(parents=True, exist_ok=True)
    files = {"inner": scans.inner, "outer": scans.outer,
             "coupling_inner": scans.coupling_inner, "coupling_outer": scans.coupling_outer,
             "sr_pavement": sr.pavement, "sr_metal": sr.metal_plate}
    for name, scan in files.items():
        write_scan_csv(out / f"{name}.csv", scan.amplitudes, config.time_window)
    dump_json(geometry_to_dict(geometry), out / "geometry.json")

    def pair_truth(name):
        pt = scans.truth.pair(name)
        dt = config.dt
        return {"delta_t_ns": pt.delta_t / NS, "surface_time_ns": pt.surface_time / NS,
                "bottom_time_ns": pt.bottom_time / NS, "refraction_offset_m": pt.refraction_offset,
                "support_intervals": [list(s) for s in pt.supports],
                "support_intervals_ns": [[a * dt / NS, b * dt / NS] for a, b in pt.supports]}

    truth = {
        "profile": profile.name,
        "sublayers": profile.epsilons,
        "sublayer_thicknesses_m": profile.thicknesses,
        "base_epsilon": profile.base_epsilon,
        "epsilon_bulk": scans.truth.epsilon_bulk,
        "thickness_m": scans.truth.thickness,
        "pairs": {"inner": pair_truth("inner"), "outer": pair_truth("outer")},
        "surface_reflection": {"surface_time_ns": sr.surface_time / NS,
                               "bottom_time_ns": sr.bottom_time / NS,
                               "delta_t_ns": (sr.bottom_time - sr.surface_time) / NS,
                               "surface_coefficient": sr.surface_coefficient},
    }
    dump_json(truth, out / "truth.json")
    rel = Path(args.out_dir)
    manifest = SurveyManifest(
        geometry=str(rel / "geometry.json"),
        scans={k: str(rel / f"{k}.csv") for k in files},
        time_window_ns=config.time_window / NS, n_samples=config.n_samples)
    dump_json(manifest.to_dict(), out / "manifest.json")
    dump_json({"command": "synth", "config": {"profile": profile_to_dict(profile),
                                              "geometry": geometry_to_dict(geometry),
                                              "synth": synth_config_to_dict(config)},
               "versions": versions()}, out / "run_summary.json")
    return EXIT_OK


def cmd_analyze_xcmp(args) -> int:
    manifest, workdir = _load_manifest(args)
    _apply_overrides(manifest, args)
    geometry = manifest.load_geometry(workdir)
    inner = manifest.load_scan("inner", workdir)
    outer = manifest.load_scan("outer", workdir)
    if inner.data.shape != outer.data.shape or inner.time_window != outer.time_window:
        raise InvalidInputError("inner and outer scans differ in shape or time window")
    n = inner.n_traces
    couplings = {}
    for pair in ("inner", "outer"):
        key = f"coupling_{pair}"
        if key in manifest.scans:
            c = manifest.load_scan(key, workdir)
            if c.n_samples != inner.n_samples:
                raise InvalidInputError(f"{key} has {c.n_samples} samples, scans have {inner.n_samples}")
            couplings[pair] = _columns_per_trace(c.data, n, key)
        else:
            couplings[pair] = [None] * n
    jobs = [(i, inner.data[:, i], outer.data[:, i], couplings["inner"][i], couplings["outer"][i],
             inner.time_window, geometry, manifest.threshold, manifest.gap_min) for i in range(n)]
    rows = run_jobs(_xcmp_trace, jobs, args.workers)
    out = workdir / args.out
    write_rows(out, XCMP_COLUMNS, rows)
    n_ok = sum(r["status"] == "ok" for r in rows)
    write_summary(out, "analyze-xcmp", manifest.to_dict(), n_traces=n, n_ok=n_ok)
    return EXIT_OK if n_ok else EXIT_FAILED


def cmd_analyze_sr(args) -> int:
    manifest, workdir = _load_manifest(args)
    _apply_overrides(manifest, args)
    for key in ("sr_pavement", "sr_metal"):
        if key not in manifest.scans:
            raise InvalidInputError(f"manifest lacks the {key!r} scan")
    pavement = manifest.load_scan("sr_pavement", workdir)
    metal = manifest.load_scan("sr_metal", workdir)
    if metal.n_samples != pavement.n_samples:
        raise InvalidInputError("metal-plate and pavement scans differ in length")
    n = pavement.n_traces
    metals = _columns_per_trace(metal.data, n, "sr_metal")
    jobs = [(i, pavement.data[:, i], metals[i], pavement.time_window, manifest.threshold,
             manifest.gap_min) for i in range(n)]
    rows = run_jobs(_sr_trace, jobs, args.workers)
    out = workdir / args.out
    write_rows(out, SR_COLUMNS, rows)
    n_ok = sum(r["status"] == "ok" for r in rows)
    write_summary(out, "analyze-sr", manifest.to_dict(), n_traces=n, n_ok=n_ok)
    return EXIT_OK if n_ok else EXIT_FAILED


def cmd_sweep_threshold(args) -> int:
    if not args.min < args.max:
        raise InvalidInputError("--min must be smaller than --max")
    if args.steps < 1:
        raise InvalidInputError("--steps must be at least 1")
    workdir = Path(args.workdir)
    truth = load_json(workdir / args.truth)
    try:
        intervals = [tuple(s) for s in truth["pairs"][args.pair]["support_intervals"]]
    except KeyError:
        raise InvalidInputError(f"truth file has no support intervals for pair {args.pair!r}") from None
    scan = read_scan_csv(workdir / args.scan)
    if not 0 <= args.trace < scan.n_traces:
        raise InvalidInputError(f"trace {args.trace} out of range")
    amps = scan.data[:, args.trace]
    if args.coupling:
        coupling = read_scan_csv(workdir / args.coupling)
        if coupling.n_samples != scan.n_samples:
            raise InvalidInputError("coupling scan length differs")
        amps = amps - _columns_per_trace(coupling.data, scan.n_traces, "coupling")[args.trace]
    thresholds = np.linspace(args.min, args.max, args.steps)
    rows = threshold_sweep(AScan(amps, scan.time_window, args.trace), intervals, thresholds,
                           args.gap_min)
    out = workdir / args.out
    write_rows(out, ["threshold", "eda", "precision", "recall", "n_clusters", "detected"],
               [{"threshold": fmt(r.threshold), "eda": fmt(r.eda), "precision": fmt(r.precision),
                 "recall": fmt(r.recall), "n_clusters": r.n_clusters, "detected": int(r.detected)}
                for r in rows])
    write_summary(out, "sweep-threshold",
                  {"scan": args.scan, "truth": args.truth, "pair": args.pair, "trace": args.trace,
                   "min": args.min, "max": args.max, "steps": args.steps, "gap_min": args.gap_min},
                  optimal_threshold=optimal_threshold(rows), max_eda=max(r.eda for r in rows))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    workdir = Path(args.workdir)
    cfg = load_json(workdir / args.config)
    geo = cfg.get("geometry")
    if isinstance(geo, str):
        geometry = geometry_from_dict(load_json(workdir / geo))
    elif isinstance(geo, dict):
        geometry = geometry_from_dict(geo)
    else:
        geometry = CANONICAL_GEOMETRY
    window = float(cfg.get("time_window_ns", 10.0)) * NS
    n_samples = int(cfg.get("n_samples", 2121))
    if "dt1_ns" in cfg and "dt2_ns" in cfg:
        baseline = Baseline(geometry, float(cfg["dt1_ns"]) * NS, float(cfg["dt2_ns"]) * NS,
                            window, n_samples)
    else:
        baseline = Baseline.from_layer(float(cfg.get("epsilon", 5.6)),
                                       float(cfg.get("thickness_m", 0.10)),
                                       geometry, window, n_samples)
    try:
        specs = [PerturbationSpec(p["target"], tuple(p["offsets"]))
                 for p in cfg.get("perturbations", [])]
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"perturbation entry malformed: {exc}") from None
    if not specs:
        raise InvalidInputError("no perturbations given")
    records = run_all(baseline, specs)
    out = workdir / args.out
    write_rows(out, ["target", "offset", "epsilon", "thickness_m", "epsilon_error_pct",
                     "thickness_error_pct", "status"],
               [{"target": r.target, "offset": fmt(r.offset), "epsilon": fmt(r.epsilon),
                 "thickness_m": fmt(r.thickness), "epsilon_error_pct": fmt(r.epsilon_error_pct),
                 "thickness_error_pct": fmt(r.thickness_error_pct),
                 "status": "ok" if r.ok else "failed"} for r in records])
    write_summary(out, "sensitivity",
                  {"geometry": geometry_to_dict(geometry), "dt1_ns": baseline.dt1 / NS,
                   "dt2_ns": baseline.dt2 / NS, "time_window_ns": window / NS,
                   "n_samples": n_samples,
                   "perturbations": [{"target": s.target, "offsets": list(s.offsets)} for s in specs]})
    return EXIT_OK if any(r.ok for r in records) else EXIT_FAILED


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="xcmp-gpr", description=__doc__.splitlines()[0])
    parser.add_argument("--workdir", default=".", help="base directory for every path")
    parser.add_argument("--workers", type=int, default=_default_workers(),
                        help=f"trace worker processes (default ${WORKERS_ENV} or 1)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write synthetic scans, truth and a manifest")
    p.add_argument("--profile", help="profile JSON")
    p.add_argument("--preset", help=f"built-in profile: {', '.join(sorted(PRESETS))}")
    p.add_argument("--geometry", help="geometry JSON (default d0=0.8, x01=0.4, x02=1.2 m)")
    p.add_argument("--synth", help="synthesis JSON")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    for name, func, default_out in (("analyze-xcmp", cmd_analyze_xcmp, "results.csv"),
                                    ("analyze-sr", cmd_analyze_sr, "sr_results.csv")):
        p = sub.add_parser(name)
        p.add_argument("manifest")
        p.add_argument("--out", default=default_out)
        p.add_argument("--threshold", type=float)
        p.add_argument("--gap-min", type=int)
        p.set_defaults(func=func)

    p = sub.add_parser("sweep-threshold", help="EDA versus detector threshold")
    p.add_argument("--scan", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--coupling", help="air-shot scan to subtract first")
    p.add_argument("--pair", choices=("inner", "outer"), default="inner")
    p.add_argument("--trace", type=int, default=0)
    p.add_argument("--min", type=float, default=0.001)
    p.add_argument("--max", type=float, default=0.05)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--gap-min", type=int, default=DEFAULT_GAP_MIN)
    p.add_argument("--out", default="eda.csv")
    p.set_defaults(func=cmd_sweep_threshold)

    p = sub.add_parser("sensitivity", help="perturbation study of the XCMP inversion")
    p.add_argument("config")
    p.add_argument("--out", default="sens.csv")
    p.set_defaults(func=cmd_sensitivity)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
