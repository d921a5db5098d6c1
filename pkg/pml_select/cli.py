#!/usr/bin/env python3
"""
pml_select - choose PML absorption profiles by minimizing discrete reflectivity

Commands:
  - evaluate          -> average reflectivity of one profile (optionally a theta sweep CSV)
  - optimize          -> Nelder-Mead search over one profile family at fixed p
  - baseline          -> best S of the power family sigma = S tau^p over a range of p
  - sweep             -> |R| versus theta/(pi/2) for several profiles (CSV)
  - scan2d            -> average reflectivity over an (a2, ap) grid of the rminus family (CSV)
  - reproduce-tables  -> optimize p = 2..12 per family and compare with the published optima

Examples:
  python -m pml_select evaluate power:p=3,S=100.4
  python -m pml_select evaluate "rminus:p=8,a2=23.3,ap=121.3" --out sweep.csv
  python -m pml_select optimize rminus --p 5
  python -m pml_select sweep --range 0.0005 0.005 --points 200 --out small_angles.csv
  python -m pml_select scan2d --p 8 --out scan.csv --workers 4
  python -m pml_select reproduce-tables --which both --out results/

Exit codes: 0 success, 2 usage or parse error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

import pandas as pd
from jsonschema import Draft7Validator

from pml_select.config import RunConfig, load_run_config
from pml_select.errors import EXIT_OK, PmlSelectError, UsageError
from pml_select.objective import (
    DEFAULT_SCAN_MARKER,
    ObjectiveSpec,
    ProfileOptimum,
    ScanRange,
    average_reflectivity,
    baseline_search,
    map_ordered,
    optimize_profile,
    scan2d,
    scan_summary,
    sweep_table,
)
from pml_select.logging_setup import configure_logging
from pml_select.numerics import QuadratureRule
from pml_select.profiles import Family, ProfileClass, format_profile, parse_profile
from pml_select.published import (
    BASELINE_AVG_R,
    PUBLISHED,
    comparison_profiles,
    published_row,
)
from pml_select.reflectivity import GridSpec, Sampling

logger = logging.getLogger("pml_select.cli")

TABLE_ORDERS = range(2, 13)
TABLE_SELECTION = {
    "1": (Family.RATIONAL_PLUS,),
    "2": (Family.RATIONAL_MINUS,),
    "both": (Family.RATIONAL_PLUS, Family.RATIONAL_MINUS),
    "rplus": (Family.RATIONAL_PLUS,),
    "rminus": (Family.RATIONAL_MINUS,),
}

OPTIMIZE_REPORT_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": [
        "family", "p", "coefficients", "avg_reflectivity",
        "iterations", "evals", "termination", "config",
    ],
    "properties": {
        "family": {"enum": [f.value for f in Family]},
        "p": {"type": "integer", "minimum": 2},
        "coefficients": {"type": "array", "items": {"type": "number", "minimum": 0}},
        "avg_reflectivity": {"type": "number", "minimum": 0},
        "iterations": {"type": "integer", "minimum": 0},
        "evals": {"type": "integer", "minimum": 1},
        "termination": {"enum": ["Converged", "MaxEvals"]},
        "config": {"type": "object"},
    },
}


# ---------- Reports and file helpers ----------

@dataclass(frozen=True)
class OptimizeReport:
    family: str
    p: int
    coefficients: list[float]
    avg_reflectivity: float
    iterations: int
    evals: int
    termination: str
    config: dict[str, Any]

    @classmethod
    def from_optimum(cls, optimum: ProfileOptimum, config: RunConfig) -> OptimizeReport:
        return cls(
            family=optimum.family.value,
            p=optimum.p,
            coefficients=list(optimum.coefficients.values),
            avg_reflectivity=optimum.avg_reflectivity,
            iterations=optimum.result.iterations,
            evals=optimum.result.evals,
            termination=optimum.result.termination.value,
            config=config.to_dict(),
        )

    def to_dict(self) -> dict[str, Any]:
        payload = dict(self.__dict__)
        Draft7Validator(OPTIMIZE_REPORT_SCHEMA).validate(payload)
        return payload


def emit_json(payload: Any) -> None:
    # floats go out as repr(), which round-trips exactly
    print(json.dumps(payload, indent=2))


def write_json(payload: Any, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")


def write_csv(frame: pd.DataFrame, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    logger.info("✓ Wrote %s (%d rows)", path, len(frame))


def _objective_spec(profile: ProfileClass, grid: GridSpec, quad: QuadratureRule) -> ObjectiveSpec:
    return ObjectiveSpec(grid=grid, quad=quad, family=profile.family, p=profile.p)


# ---------- Commands ----------

def cmd_evaluate(args: argparse.Namespace, config: RunConfig) -> int:
    profile = parse_profile(args.profile)
    grid = config.grid()
    spec = _objective_spec(profile, grid, config.quadrature())
    avg = average_reflectivity(profile, spec)
    report = {
        "profile": format_profile(profile),
        "family": profile.family.value,
        "p": profile.p,
        "coefficients": [abs(c) for c in profile.coefficients()],
        "avg_reflectivity": avg,
        "config": config.to_dict(),
    }
    if args.out:
        lo, hi = args.range
        table = sweep_table([(args.profile, profile)], grid, args.points, lo, hi)
        write_csv(table, Path(args.out))
        report["sweep"] = str(args.out)
    emit_json(report)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace, config: RunConfig) -> int:
    family = Family(args.family)
    p = 3 if family is Family.LEGACY else args.p
    if p is None:
        raise_usage(f"optimize {family.value} needs --p")
    optimum = optimize_profile(
        family, p, config.grid(), config.quadrature(), config.simplex_config()
    )
    report = OptimizeReport.from_optimum(optimum, config).to_dict()
    if args.out:
        write_json(report, Path(args.out))
    emit_json(report)
    return EXIT_OK


def cmd_baseline(args: argparse.Namespace, config: RunConfig) -> int:
    orders = range(args.p_min, args.p_max + 1)
    best, runs = baseline_search(
        config.grid(), config.quadrature(), orders, config.simplex_config()
    )
    report = {
        "family": Family.POWER.value,
        "runs": [OptimizeReport.from_optimum(r, config).to_dict() for r in runs],
        "best_p": best.p,
        "best_S": best.coefficients.values[0],
        "best_avg_reflectivity": best.avg_reflectivity,
        "published_avg_reflectivity": BASELINE_AVG_R,
    }
    if args.out:
        write_json(report, Path(args.out))
    emit_json(report)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    if args.profiles:
        named = [(text, parse_profile(text)) for text in args.profiles]
    else:
        named = [(format_profile(p), p) for p in comparison_profiles()]
    lo, hi = args.range
    table = sweep_table(named, config.grid(), args.points, lo, hi)
    write_csv(table, Path(args.out))
    emit_json({
        "out": str(args.out),
        "points": args.points,
        "range": [lo, hi],
        "mean_abs_R": {name: float(table[name].mean()) for name, _ in named},
    })
    return EXIT_OK


def cmd_scan2d(args: argparse.Namespace, config: RunConfig) -> int:
    a2_range = ScanRange(*(args.a2_range or config.scan_a2))
    ap_range = ScanRange(*(args.ap_range or config.scan_ap))
    marker = None if args.no_marker else tuple(args.marker)
    spec = ObjectiveSpec(
        grid=config.grid(), quad=config.quadrature(), family=Family.RATIONAL_MINUS, p=args.p
    )
    frame = scan2d(args.p, a2_range, ap_range, spec, marker=marker, workers=config.workers)
    write_csv(frame, Path(args.out))
    summary = scan_summary(frame, marker)
    summary["out"] = str(args.out)
    emit_json(summary)
    return EXIT_OK


def _table_row(job) -> dict[str, Any]:
    family, p, grid, quad, simplex = job
    row: dict[str, Any] = {"p": p}
    published = published_row(family, p)
    try:
        optimum = optimize_profile(family, p, grid, quad, simplex)
        names = _coefficient_names(family, p)
        row.update(dict(zip(names, optimum.coefficients.values)))
        row["iterations"] = optimum.result.iterations
        row["evals"] = optimum.result.evals
        row["termination"] = optimum.result.termination.value
        row["avg_R"] = optimum.avg_reflectivity
        row["paper_avg_R"] = published.avg_R
        row["ratio"] = optimum.avg_reflectivity / published.avg_R
        row["published_coeffs_avg_R"] = average_reflectivity(
            published.profile, ObjectiveSpec(grid=grid, quad=quad, family=family, p=p)
        )
        row["error"] = ""
    except PmlSelectError as e:
        logger.warning("⚠️  %s p=%d failed: %s", family.value, p, e)
        row["paper_avg_R"] = published.avg_R
        row["error"] = str(e)
    return row


def _coefficient_names(family: Family, p: int) -> list[str]:
    if family is Family.RATIONAL_MINUS:
        return ["a2"] if p == 2 else ["a2", "ap"]
    return [f"a{k}" for k in range(2, p + 1)]


def _table_columns(family: Family, orders) -> list[str]:
    if family is Family.RATIONAL_MINUS:
        coefficient_columns = ["a2", "ap"]
    else:
        coefficient_columns = [f"a{k}" for k in range(2, max(orders) + 1)]
    return ["p", *coefficient_columns, "iterations", "evals", "termination",
            "avg_R", "paper_avg_R", "ratio", "published_coeffs_avg_R", "error"]


def cmd_reproduce_tables(args: argparse.Namespace, config: RunConfig) -> int:
    out_dir = Path(args.out)
    orders = list(range(args.p_min, args.p_max + 1))
    if not orders or orders[0] < 2 or orders[-1] > max(TABLE_ORDERS):
        raise_usage(f"orders must lie within 2..{max(TABLE_ORDERS)}")
    grid, quad, simplex = config.grid(), config.quadrature(), config.simplex_config()

    summary: dict[str, Any] = {"baseline_avg_R": BASELINE_AVG_R, "files": []}
    for family in TABLE_SELECTION[args.which]:
        print(f"\n{'=' * 60}\nREPRODUCING {family.value} OPTIMA, p = {orders[0]}..{orders[-1]}\n{'=' * 60}",
              file=sys.stderr)
        jobs = [(family, p, grid, quad, simplex) for p in orders]
        rows = map_ordered(_table_row, jobs, config.workers)
        frame = pd.DataFrame(rows).reindex(columns=_table_columns(family, orders))
        path = out_dir / f"{family.value}_optima.csv"
        write_csv(frame, path)
        summary["files"].append(str(path))

        ok = frame[frame["error"] == ""]
        failed = int(len(frame) - len(ok))
        family_summary: dict[str, Any] = {"runs": int(len(frame)), "failed": failed}
        if len(ok):
            best = ok.loc[ok["avg_R"].idxmin()]
            family_summary.update({
                "best_p": int(best["p"]),
                "best_avg_R": float(best["avg_R"]),
                "best_published_avg_R": float(
                    min(row.avg_R for row in PUBLISHED[family].values() if row.p in orders)
                ),
                "headline_ratio": float(best["avg_R"]) / BASELINE_AVG_R,
            })
        summary[family.value] = family_summary

    summary["config"] = config.to_dict()
    write_json(summary, out_dir / "summary.json")
    emit_json(summary)
    return EXIT_OK


# ---------- CLI plumbing ----------

def raise_usage(message: str) -> None:
    raise UsageError(message)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    grp = common.add_argument_group("run configuration (flags override --config and PMLSEL_* env)")
    grp.add_argument("--config", help="YAML or JSON config file with RunConfig fields")
    grp.add_argument("--lambda0", type=float, help="Free-space wavelength in um (default: 1.0)")
    grp.add_argument("--n0", type=float, help="Refractive index (default: 1.0)")
    grp.add_argument("--h", type=float, help="Grid size in um (default: 0.05)")
    grp.add_argument("--m", type=int, help="PML thickness in grid cells (default: 5)")
    grp.add_argument("--sampling", choices=[s.value for s in Sampling],
                     help="How s is sampled between nodes (default: midpoint)")
    grp.add_argument("--quad-nodes", type=int, help="Gauss-Legendre nodes on (0, pi/2) (default: 100)")
    grp.add_argument("--max-evals", type=int, help="Nelder-Mead evaluation cap (default: 2000)")
    grp.add_argument("--workers", type=int, help="Processes for scan2d/reproduce-tables (default: 1)")
    return common


def _range(values: Sequence[str]) -> list[float]:
    return [float(v) for v in values]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pml_select",
        description="Select PML absorption profiles by minimizing average discrete reflectivity",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__.split("Examples:", 1)[1] if __doc__ else None,
    )
    p.add_argument("--verbose", "-v", action="store_true", help="Debug logging (per-iteration records)")
    p.add_argument("--log-format", choices=["plain", "json"], default="plain",
                   help="Log record format on stderr (default: plain)")
    common = _common_options()
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("evaluate", parents=[common], help="Average reflectivity of one profile")
    sp.add_argument("profile", help="Profile, e.g. power:p=3,S=100.4 or rminus:p=5,a2=23.6,ap=35.9")
    sp.add_argument("--out", help="Also write a theta sweep CSV here")
    sp.add_argument("--range", nargs=2, type=float, default=[0.001, 1.0], metavar=("MIN", "MAX"),
                    help="Sweep range in theta/(pi/2) (default: 0.001 1.0)")
    sp.add_argument("--points", type=int, default=500, help="Sweep points (default: 500)")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("optimize", parents=[common], help="Nelder-Mead search from (0, ..., 0, 50)")
    sp.add_argument("family", choices=[Family.POWER.value, Family.RATIONAL_PLUS.value,
                                       Family.RATIONAL_MINUS.value, Family.LEGACY.value])
    sp.add_argument("--p", type=int, help="Profile order p >= 2 (not used by legacy)")
    sp.add_argument("--out", help="Also write the JSON report here")
    sp.set_defaults(func=cmd_optimize)

    sp = sub.add_parser("baseline", parents=[common], help="Best S for sigma = S tau^p per p")
    sp.add_argument("--p-min", type=int, default=2)
    sp.add_argument("--p-max", type=int, default=5)
    sp.add_argument("--out", help="Also write the JSON report here")
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("sweep", parents=[common], help="|R| versus theta/(pi/2) (CSV)")
    sp.add_argument("profiles", nargs="*",
                    help="Profiles to sweep (default: baseline, rplus p=10, rminus p=5 and p=8 optima)")
    sp.add_argument("--range", nargs=2, type=float, default=[0.001, 1.0], metavar=("MIN", "MAX"))
    sp.add_argument("--points", type=int, default=500)
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("scan2d", parents=[common], help="Average reflectivity over (a2, ap) (CSV)")
    sp.add_argument("--p", type=int, default=8, help="rminus order (default: 8)")
    sp.add_argument("--a2-range", nargs=3, type=float, metavar=("LO", "HI", "STEPS"))
    sp.add_argument("--ap-range", nargs=3, type=float, metavar=("LO", "HI", "STEPS"))
    sp.add_argument("--marker", nargs=2, type=float, default=list(DEFAULT_SCAN_MARKER),
                    metavar=("A2", "AP"), help="Point inserted into the axes (default: 23.3 121.3)")
    sp.add_argument("--no-marker", action="store_true", help="Scan the uniform axes only")
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.set_defaults(func=cmd_scan2d)

    sp = sub.add_parser("reproduce-tables", parents=[common],
                        help="Optimize p = 2..12 per family and compare with published optima")
    sp.add_argument("--which", choices=sorted(TABLE_SELECTION), default="both",
                    help="1/rplus, 2/rminus or both (default: both)")
    sp.add_argument("--p-min", type=int, default=min(TABLE_ORDERS))
    sp.add_argument("--p-max", type=int, default=max(TABLE_ORDERS))
    sp.add_argument("--out", default="results", help="Output directory (default: results)")
    sp.set_defaults(func=cmd_reproduce_tables)

    return p


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    keys = ("lambda0", "n0", "h", "m", "sampling", "quad_nodes", "max_evals", "workers")
    return {k: getattr(args, k, None) for k in keys}


def _normalize_ranges(args: argparse.Namespace) -> None:
    for name in ("a2_range", "ap_range"):
        value = getattr(args, name, None)
        if value is not None:
            lo, hi, steps = value
            if steps != int(steps):
                raise_usage(f"--{name.replace('_', '-')} STEPS must be an integer")
            setattr(args, name, (lo, hi, int(steps)))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(verbose=args.verbose, log_format=args.log_format)
    try:
        _normalize_ranges(args)
        config = load_run_config(args.config, _overrides(args))
        return args.func(args, config)
    except PmlSelectError as e:
        print(f"❌ Error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
