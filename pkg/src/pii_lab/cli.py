"""Command line front end.

Usage:
    pii-lab --alpha 0.5 --k 2                        connection experiment, text summary
    pii-lab --alpha 0 --k 3 --report json --out r.json
    pii-lab --alpha 0 --k 3 --report csv --out traj.csv   (also writes traj_poles.csv)
    pii-lab --verify-parametrix                      default parametrix suite
    pii-lab --grid -1:1:21,0:3:31 --report csv --out grid.csv
    pii-lab --config run.cfg --tol 1e-9              file values, overridden by flags

Exit status: 0 when every criterion passes, 1 when a numeric criterion fails
or the solver gives up, 2 for usage and configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from .errors import NotSingularRegime, PiiLabError
from .harness import (
    REPORT_FORMATS,
    RunConfig,
    emit,
    format_text,
    grid_scan,
    run_connection_experiment,
    run_parametrix_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# Config-file key -> (argparse dest, converter)
_CONFIG_KEYS = {
    "alpha": ("alpha", float),
    "k": ("k", float),
    "x_start": ("x_start", float),
    "x_end": ("x_end", float),
    "tol": ("tol", float),
    "poles": ("poles", int),
    "pole_budget": ("poles", int),
    "series_n": ("series_n", int),
    "report": ("report", str),
    "report_format": ("report", str),
    "out": ("out", str),
    "init": ("init", str),
    "grid": ("grid", str),
    "verify_parametrix": ("verify_parametrix", lambda v: v.strip().lower() in ("1", "true", "yes", "on")),
}


class UsageError(Exception):
    pass


def read_config(path: str) -> Dict[str, Any]:
    """Parse a flat ``key = value`` file. ``#`` starts a comment."""
    out: Dict[str, Any] = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_").lower()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        dest, conv = _CONFIG_KEYS[key]
        try:
            out[dest] = conv(value)
        except ValueError as exc:
            raise UsageError(f"{path}:{n}: bad value for {key}: {value!r}") from exc
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pii-lab", description="Singular inhomogeneous Painleve II solutions: "
                                "connection-formula experiments and model parametrix checks.")
    p.add_argument("--alpha", type=float, help="equation parameter alpha")
    p.add_argument("--k", type=float, help="amplitude of the Ai(x) tail at +infinity")
    p.add_argument("--x-start", dest="x_start", type=float, help="start of integration (default 10)")
    p.add_argument("--x-end", dest="x_end", type=float, help="end of integration (default -30)")
    p.add_argument("--tol", type=float, help="relative tolerance of the integrator (default 1e-10)")
    p.add_argument("--poles", type=int, help="pole budget (default 40)")
    p.add_argument("--series-n", dest="series_n", type=int, help="fixed truncation of the asymptotic series")
    p.add_argument("--init", choices=("resummed", "truncated"), help="initial data flavour (default resummed)")
    p.add_argument("--report", choices=REPORT_FORMATS, help="output format (default text on stdout, json in files)")
    p.add_argument("--out", help="output file")
    p.add_argument("--verify-parametrix", dest="verify_parametrix", action="store_true", default=None,
                   help="run the model parametrix verification suite")
    p.add_argument("--grid", help="scan a grid, given as A0:A1:NA,K0:K1:NK")
    p.add_argument("--grid-solve", dest="grid_solve", action="store_true",
                   help="also integrate each singular grid cell to its first pole")
    p.add_argument("--config", help="flat key = value file; flags override its values")
    return p


def parse_grid(text: str):
    try:
        a, k = text.split(",")
        a0, a1, na = a.split(":")
        k0, k1, nk = k.split(":")
        return (float(a0), float(a1)), (float(k0), float(k1)), (int(na), int(nk))
    except ValueError as exc:
        raise UsageError(f"bad --grid value {text!r}; expected A0:A1:NA,K0:K1:NK") from exc


def _merge(args: argparse.Namespace) -> Dict[str, Any]:
    settings: Dict[str, Any] = read_config(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            settings[key] = value
    return settings


def _output(report: Any, settings: Dict[str, Any]) -> None:
    fmt = settings.get("report")
    out = settings.get("out")
    if out:
        for path in emit(report, out, fmt or "json"):
            print(f"wrote {path}", file=sys.stderr)
    if fmt == "json" and not out:
        if isinstance(report, list) and report and hasattr(report[0], "contour_id"):
            payload = [{"contour_id": r.contour_id, "max_residual": r.max_residual,
                        "tolerance_used": r.tolerance_used, "passed": r.passed} for r in report]
        elif hasattr(report, "to_dict"):
            payload = report.to_dict()
        else:
            payload = report
        print(json.dumps(payload, indent=1))
    else:
        sys.stdout.write(format_text(report))


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        settings = _merge(args)
        if settings.get("verify_parametrix"):
            reports = run_parametrix_suite()
            _output(reports, settings)
            return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
        if settings.get("grid"):
            a_rng, k_rng, steps = parse_grid(settings["grid"])
            rows = grid_scan(a_rng, k_rng, steps, solve=bool(settings.get("grid_solve")))
            _output(rows, settings)
            return EXIT_FAIL if any(r["error"] for r in rows) else EXIT_OK
        if settings.get("alpha") is None or settings.get("k") is None:
            raise UsageError("--alpha and --k are required for a connection experiment")
        cfg_kwargs = {"alpha": settings["alpha"], "k": settings["k"]}
        for src, dst in (("x_start", "x_start"), ("x_end", "x_end"), ("tol", "tol"), ("poles", "pole_budget"),
                         ("series_n", "series_N"), ("init", "init")):
            if src in settings:
                cfg_kwargs[dst] = settings[src]
        cfg_kwargs["report_format"] = settings.get("report") or "json"
        cfg = RunConfig(**cfg_kwargs)
    except (UsageError, ValueError) as exc:
        print(f"pii-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        report = run_connection_experiment(cfg)
    except NotSingularRegime as exc:
        print(f"pii-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PiiLabError as exc:
        print(f"pii-lab: solver failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        partial = getattr(exc, "report", None)
        if partial is not None:
            _output(partial, settings)
        return EXIT_FAIL
    try:
        _output(report, settings)
    except OSError as exc:
        print(f"pii-lab: {exc}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())
