"""Command-line front end: sweeps to figure-ready CSV/JSON plus verification.

Numbers are always written with %.12g formatting and a '.' decimal
separator, so repeated runs of the same preset are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys as _sysmod
from dataclasses import dataclass, fields as dc_fields
from typing import List, Optional, Tuple

import numpy as np

from . import analytic
from .analytic import SingularPoint
from .spin_ops import Direction, FieldConfig, SpinSystem
from .verify import run_full_suite

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_CONFIG = 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    n: int = 4
    two_s: int = 1
    j: float = 1.0
    gamma: float = 1.0
    h_over_j: Optional[float] = None
    theta_prime: float = 0.0
    phi_prime: float = 0.0
    ratio: Optional[Tuple[int, int]] = None
    theta: Optional[float] = None
    phi: float = 0.0
    samples: int = 200
    preset: Optional[str] = None
    out: Optional[str] = None
    format: str = "csv"

    def system(self, dim_guard: int = 10**9) -> SpinSystem:
        # closed-form sweeps never build dense matrices, so the guard is
        # relaxed here; dense commands construct their own SpinSystem
        return SpinSystem(self.n, self.two_s, self.j, self.gamma, dim_guard=dim_guard)

    def field(self) -> Optional[FieldConfig]:
        if self.h_over_j is None:
            return None
        return FieldConfig(
            self.h_over_j, Direction(self.theta_prime, self.phi_prime), self.ratio
        )


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}")
        known = {f.name for f in dc_fields(RunConfig)}
        for key, value in data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            if key == "ratio" and value is not None:
                value = tuple(value)
            setattr(cfg, key, value)
    # CLI flags override file values
    overrides = {
        "n": args.n,
        "two_s": args.two_s,
        "j": args.j,
        "gamma": args.gamma,
        "h_over_j": args.h_over_j,
        "theta_prime": args.theta_prime,
        "phi_prime": args.phi_prime,
        "theta": args.theta,
        "phi": args.phi,
        "samples": args.samples,
        "preset": getattr(args, "preset", None),
        "out": args.out,
        "format": args.format,
    }
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    if args.ratio is not None:
        try:
            p, q = args.ratio.split("/")
            cfg.ratio = (int(p), int(q))
        except ValueError:
            raise ConfigError(f"--ratio must look like P/Q, got {args.ratio!r}")
        if cfg.h_over_j is None:
            cfg.h_over_j = cfg.ratio[0] / cfg.ratio[1]
    if cfg.samples < 2:
        raise ConfigError("samples must be >= 2")
    return cfg


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _emit(rows: List[dict], header: List[str], cfg: RunConfig):
    stream = open(cfg.out, "w", newline="") if cfg.out else _sysmod.stdout
    try:
        if cfg.format == "json":
            json.dump(rows, stream, indent=2, sort_keys=True)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(
                    [row[k] if isinstance(row[k], str) else _fmt(row[k]) for k in header]
                )
    finally:
        if cfg.out:
            stream.close()


# preset curves: label -> (SpinSystem kwargs, h/J values along z or None)
_FIGURE_CURVES = [
    ("N2_s1/2", dict(n_sites=2, two_s=1)),
    ("N3_s1", dict(n_sites=3, two_s=2)),
    ("N6_s3/2", dict(n_sites=6, two_s=3)),
    ("N9_s2", dict(n_sites=9, two_s=4)),
]

_METHANE = dict(n_sites=4, two_s=1, coupling_j=-6.2)


def _preset_curves(cfg: RunConfig, command: str):
    """Yield (label, SpinSystem, FieldConfig or None) for the active preset."""
    guard = 10**9
    preset = cfg.preset
    if preset is None:
        yield ("", cfg.system(), cfg.field())
        return
    if preset in ("fig1", "fig2", "fig3"):
        for label, kwargs in _FIGURE_CURVES:
            yield (label, SpinSystem(coupling_j=1.0, dim_guard=guard, **kwargs), None)
    elif preset in ("methane", "fig5a", "fig5b"):
        yield ("", SpinSystem(dim_guard=guard, **_METHANE), None)
    elif preset == "fig6":
        for ratio in (0.0, 3.0, 10.0):
            fld = FieldConfig(ratio, Direction(0.0, 0.0)) if ratio else None
            yield (
                f"hJ{ratio:g}",
                SpinSystem(n_sites=6, two_s=3, coupling_j=1.0, dim_guard=guard),
                fld,
            )
    else:
        raise ConfigError(f"unknown preset {preset!r}")


def _theta_sweep(sys: SpinSystem, samples: int, include_poles: bool) -> np.ndarray:
    thetas = np.linspace(0.0, math.pi, samples)
    if include_poles:
        return thetas
    return thetas[1:-1]


def _field_g_chichi(sys: SpinSystem, fld: FieldConfig, phi: float):
    def profile(theta: float) -> float:
        return analytic.metric_closed_form_field(sys, theta, phi, fld).g_chi_chi

    return profile


def cmd_curvature(cfg: RunConfig) -> int:
    rows = []
    multi = False
    for label, sys, fld in _preset_curves(cfg, "curvature"):
        multi = multi or bool(label)
        smooth_poles = sys.n_sites == 2 and sys.two_s == 1 and fld is None
        thetas = _theta_sweep(sys, cfg.samples, smooth_poles)
        if not smooth_poles:
            print(
                f"note: singular endpoints theta=0, pi omitted for {label or 'system'}",
                file=_sysmod.stderr,
            )
        if fld is None:
            values = [analytic.scalar_curvature(sys, t) for t in thetas]
        else:
            g_thth = sys.gamma**2 * sys.n_sites * sys.s / 2.0
            profile = _field_g_chichi(sys, fld, cfg.phi)
            values = [
                analytic.curvature_numeric_from_profile(g_thth, profile, t) for t in thetas
            ]
        for t, r in zip(thetas, values):
            rows.append({"theta": float(t), "R": float(r), "curve": label})
    header = ["theta", "R"] + (["curve"] if multi else [])
    _emit(rows, header, cfg)
    return EXIT_OK


def cmd_speed(cfg: RunConfig) -> int:
    rows = []
    multi = False
    for label, sys, fld in _preset_curves(cfg, "speed"):
        multi = multi or bool(label)
        thetas = _theta_sweep(sys, cfg.samples, True)
        for t in thetas:
            if fld is None:
                v = analytic.speed_closed_form(sys, float(t))
            else:
                g = analytic.metric_closed_form_field(sys, float(t), cfg.phi, fld)
                v = abs(sys.coupling_j) * math.sqrt(max(g.g_chi_chi, 0.0))
            rows.append({"theta": float(t), "v": v, "curve": label})
    header = ["theta", "v"] + (["curve"] if multi else [])
    _emit(rows, header, cfg)
    return EXIT_OK


def cmd_curvature_vs_speed(cfg: RunConfig) -> int:
    rows = []
    multi = False
    for label, sys, _ in _preset_curves(cfg, "curvature_vs_speed"):
        multi = multi or bool(label)
        ext = analytic.speed_extrema(sys)
        n_half = max(cfg.samples // 2, 2)
        for v in np.linspace(0.0, ext.v_max, n_half):
            rows.append(
                {
                    "v": float(v),
                    "R": analytic.curvature_from_speed(sys, float(v), "upper"),
                    "branch": "upper",
                    "curve": label,
                }
            )
        for v in np.linspace(ext.v_half_pi, ext.v_max, n_half):
            rows.append(
                {
                    "v": float(v),
                    "R": analytic.curvature_from_speed(sys, float(v), "lower"),
                    "branch": "lower",
                    "curve": label,
                }
            )
    header = ["v", "R", "branch"] + (["curve"] if multi else [])
    _emit(rows, header, cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, only: Optional[str], tolerance: Optional[float]) -> int:
    report = run_full_suite(only=only, tolerance=tolerance)
    print(report.format_table())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    return EXIT_OK if report.overall else EXIT_VERIFY_FAILED


def cmd_field_optimize(cfg: RunConfig, scan_direction: bool) -> int:
    if cfg.theta is None:
        raise ConfigError("field-optimize requires --theta")
    sys = cfg.system()
    direction = Direction(cfg.theta_prime, cfg.phi_prime)
    try:
        opt = analytic.min_speed_field(sys, cfg.theta, cfg.phi, direction)
        record = {
            "h_over_j_min": opt.ratio,
            "v_min": opt.v_min,
            "reduction_applied": opt.reduction_applied,
        }
    except analytic.DegenerateDirection as exc:
        record = {"error": str(exc)}
    if scan_direction:
        if cfg.h_over_j is None:
            raise ConfigError("--scan-direction requires --h-over-j")
        best_min, best_max = None, None
        for tp in np.linspace(0.0, math.pi, 61):
            for pp in np.linspace(0.0, 2.0 * math.pi, 61, endpoint=False):
                fld = FieldConfig(cfg.h_over_j, Direction(float(tp), float(pp)))
                g = analytic.metric_closed_form_field(sys, cfg.theta, cfg.phi, fld)
                v = abs(sys.coupling_j) * math.sqrt(max(g.g_chi_chi, 0.0))
                if best_min is None or v < best_min[0]:
                    best_min = (v, float(tp), float(pp))
                if best_max is None or v > best_max[0]:
                    best_max = (v, float(tp), float(pp))
        record["scan"] = {
            "h_over_j": cfg.h_over_j,
            "min": {"v": best_min[0], "theta_prime": best_min[1], "phi_prime": best_min[2]},
            "max": {"v": best_max[0], "theta_prime": best_max[1], "phi_prime": best_max[2]},
        }
    text = json.dumps(record, indent=2, sort_keys=True)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spin-manifold",
        description="State-manifold geometry of the long-range zz-Ising spin-s system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="flat JSON file with run parameters")
        p.add_argument("--n", type=int, help="number of spins N")
        p.add_argument("--two-s", dest="two_s", type=int, help="2s (1 for spin-1/2)")
        p.add_argument("--j", type=float, help="coupling J in Hz")
        p.add_argument("--gamma", type=float, help="metric scale factor")
        p.add_argument("--h-over-j", dest="h_over_j", type=float, help="field ratio h/J")
        p.add_argument("--theta-prime", dest="theta_prime", type=float, help="field polar angle")
        p.add_argument("--phi-prime", dest="phi_prime", type=float, help="field azimuth")
        p.add_argument("--ratio", help="declare h/J rational as P/Q")
        p.add_argument("--theta", type=float, help="initial-state polar angle")
        p.add_argument("--phi", type=float, help="initial-state azimuth")
        p.add_argument("--samples", type=int, help="sweep sample count")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")

    for name, helptext in [
        ("curvature", "scalar curvature vs theta"),
        ("speed", "evolution speed vs theta"),
        ("curvature-vs-speed", "curvature against speed, both branches"),
    ]:
        p = sub.add_parser(name, help=helptext)
        add_common(p)
        p.add_argument(
            "--preset",
            choices=("fig1", "fig2", "fig3", "fig5a", "fig5b", "fig6", "methane"),
            help="named figure recipe",
        )

    p = sub.add_parser("verify", help="run the oracle verification suite")
    add_common(p)
    p.add_argument("--only", help="restrict to checks with this name prefix")
    p.add_argument("--tolerance", type=float, help="override all check tolerances")

    p = sub.add_parser("field-optimize", help="minimal-speed field conditions")
    add_common(p)
    p.add_argument("--scan-direction", action="store_true", help="grid-scan (theta', phi')")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "curvature":
            return cmd_curvature(cfg)
        if args.command == "speed":
            return cmd_speed(cfg)
        if args.command == "curvature-vs-speed":
            return cmd_curvature_vs_speed(cfg)
        if args.command == "verify":
            return cmd_verify(cfg, args.only, args.tolerance)
        if args.command == "field-optimize":
            return cmd_field_optimize(cfg, args.scan_direction)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=_sysmod.stderr)
        return EXIT_BAD_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
