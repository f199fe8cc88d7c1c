"""End-to-end experiments, verification suites, grid scans and report output.

The connection experiment integrates one singular solution from positive x
through its poles on the negative axis, pairs the observed poles with the
zeros of ``sin Phi(x)`` predicted by the connection formulas, and grades the
run against four numeric criteria (residue quantization, phase accuracy,
phase trend and envelope amplitude).
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import rh_parametrix as rh
from .asymptotics import SolutionClass, SolutionParams, classify, make_params, predict_poles
from .errors import NotSingularRegime, PiiLabError
from .pii_solver import Trajectory, extract_observables, integrate

REPORT_FORMATS = ("json", "csv", "text")
COMPARE_BELOW = -5.0
FAR_FIELD = -20.0
PHASE_TOL = 0.15
ENVELOPE_BAND = (0.9, 1.1)
RESIDUE_TOL = 1e-6
DEFAULT_ALPHAS = (0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.5)
DEFAULT_S3 = (complex(-0.7, 2.0), complex(1.0, -1.5))
DEFAULT_RADII = (0.3, 1.0, 3.0, 10.0)
MAX_GRID_CELLS = 2000


@dataclass(frozen=True)
class RunConfig:
    """Settings of one connection experiment.

    ``series_N`` fixes the truncation of the asymptotic series in the initial
    data (None picks the optimal one); ``init`` selects resummed or plainly
    truncated initial data.
    """

    alpha: float
    k: float
    x_start: float = 10.0
    x_end: float = -30.0
    tol: float = 1e-10
    series_N: Optional[int] = None
    pole_budget: int = 40
    report_format: str = "json"
    init: str = "resummed"

    def __post_init__(self) -> None:
        if not self.x_start > self.x_end:
            raise ValueError("x_start must exceed x_end")
        if self.x_start < 8.0:
            raise ValueError("x_start must be at least 8 for the asymptotic initial data")
        if not 1e-13 <= self.tol <= 1e-6:
            raise ValueError("tol must lie in [1e-13, 1e-6]")
        if self.report_format not in REPORT_FORMATS:
            raise ValueError(f"report_format must be one of {REPORT_FORMATS}")
        if self.init not in ("resummed", "truncated"):
            raise ValueError("init must be 'resummed' or 'truncated'")
        if self.series_N is not None and self.series_N < 0:
            raise ValueError("series_N must be non-negative")
        if self.pole_budget < 1:
            raise ValueError("pole_budget must be positive")


def _params_echo(p: SolutionParams) -> Dict[str, Any]:
    return {
        "alpha": p.alpha,
        "k": p.k,
        "s1": _encode(p.s1),
        "s3": _encode(p.s3),
        "nu": _encode(p.nu),
        "d_squared": p.d_squared,
        "phi": p.phi,
    }


@dataclass
class ConnectionReport:
    """Outcome of :func:`run_connection_experiment`.

    ``observed_poles``, ``residue_signs``, ``residue_strengths``,
    ``fit_residuals`` and ``pairwise_phase_errors`` are parallel lists over
    every pole crossed (the phase error is None for a pole at x >= 0).
    ``pairs`` holds ``(predicted, observed)`` locations for the poles with
    ``x <= -5``; ``unpaired_predicted`` and
    ``unpaired_observed`` list what the nearest-neighbour pairing left over.
    ``verdict`` maps criterion names to pass/fail and ``metrics`` holds the
    numbers behind them. The trajectory itself is kept in memory only.
    """

    params: Dict[str, Any]
    config: Dict[str, Any]
    predicted_poles: List[float]
    observed_poles: List[float]
    pairwise_phase_errors: List[Optional[float]]
    residue_signs: List[int]
    residue_strengths: List[float]
    fit_residuals: List[float]
    pairs: List[Tuple[float, float]]
    unpaired_predicted: List[float]
    unpaired_observed: List[float]
    envelope_ratios: List[Tuple[float, float]]
    verdict: Dict[str, bool]
    metrics: Dict[str, Any]
    stop_reason: str = "x_end"
    error: Optional[str] = None
    trajectory: Optional[Trajectory] = field(default=None, repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.error is None and all(self.verdict.values())

    def to_dict(self) -> Dict[str, Any]:
        d = {k: v for k, v in asdict(self).items() if k != "trajectory"}
        d["pairs"] = [list(p) for p in self.pairs]
        d["envelope_ratios"] = [list(e) for e in self.envelope_ratios]
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ConnectionReport":
        d = dict(d)
        d["pairs"] = [tuple(p) for p in d["pairs"]]
        d["envelope_ratios"] = [tuple(e) for e in d["envelope_ratios"]]
        return cls(**d)


def _encode(z: complex) -> Dict[str, float]:
    return {"re": float(z.real), "im": float(z.imag)}


def phase_error(params: SolutionParams, x: float) -> float:
    """``Phi(x)`` reduced mod pi into (-pi/2, pi/2]."""
    r = math.remainder(params.phase(x), math.pi)
    return math.pi / 2 if r <= -math.pi / 2 else r


def _local_spacing(params: SolutionParams, x: float) -> float:
    return math.pi / abs(params.phase_derivative(x))


def pair_poles(params: SolutionParams, predicted: Sequence[float], observed: Sequence[float],
               x_lo: float, x_hi: float = COMPARE_BELOW) -> Tuple[List[Tuple[float, float]], List[float], List[float]]:
    """Nearest-neighbour pairing inside ``[x_lo, x_hi]``.

    Each observed pole in the window takes the closest unused prediction if
    it lies within half the local predicted spacing. Predictions that stay
    unused count as unpaired only when their whole acceptance interval lies
    inside the window, so a partner just outside the window is not held
    against the run.
    """
    obs = [x for x in observed if x_lo <= x <= x_hi]
    used = [False] * len(predicted)
    pairs: List[Tuple[float, float]] = []
    lonely_obs: List[float] = []
    for xo in obs:
        best, best_d = -1, math.inf
        for i, xp in enumerate(predicted):
            d = abs(xp - xo)
            if not used[i] and d < best_d:
                best, best_d = i, d
        if best >= 0 and best_d < 0.5 * _local_spacing(params, predicted[best]):
            used[best] = True
            pairs.append((predicted[best], xo))
        else:
            lonely_obs.append(xo)
    lonely_pred = []
    for i, xp in enumerate(predicted):
        half = 0.5 * _local_spacing(params, xp)
        if not used[i] and x_lo + half <= xp <= x_hi - half:
            lonely_pred.append(xp)
    return pairs, lonely_pred, lonely_obs


def _phase_trend_slope(xs: Sequence[float], errs: Sequence[float]) -> float:
    if len(xs) < 3:
        return float("nan")
    t = (-np.asarray(xs)) ** -1.5
    return float(np.polyfit(t, np.abs(errs), 1)[0])


def _grade(params: SolutionParams, cfg: RunConfig, traj: Trajectory, error: Optional[str]) -> ConnectionReport:
    x_lo = cfg.x_end
    observed = [p.x_p for p in traj.poles]
    x_hi_pred = -0.5
    predicted = predict_poles(params, min(x_lo - 2.0, -1.0), x_hi_pred) if x_lo < x_hi_pred else []
    pairs, lonely_pred, lonely_obs = pair_poles(params, predicted, observed, x_lo)
    # Phi is defined for x < 0 only; a pole on the positive axis has no phase error.
    errors = [phase_error(params, x) if x < 0 else None for x in observed]
    _, env = extract_observables(traj, x_max=COMPARE_BELOW)

    paired_obs = [o for _, o in pairs]
    far = [(x, phase_error(params, x)) for x in paired_obs if x < FAR_FIELD]
    far_env = [r for x, r in env if x < FAR_FIELD]
    strengths = [p.strength for p in traj.poles]
    signs = [p.epsilon for p in traj.poles]
    strength_dev = max((abs(s - e) for s, e in zip(strengths, signs)), default=0.0)
    trend = _phase_trend_slope(paired_obs, [phase_error(params, x) for x in paired_obs])
    order_ok = all(pairs[i][0] > pairs[i + 1][0] for i in range(len(pairs) - 1))

    metrics = {
        "max_residue_deviation": strength_dev,
        "max_far_phase_error": max((abs(e) for _, e in far), default=None),
        "far_pole_count": len(far),
        "phase_trend_slope": trend,
        "envelope_min": min(far_env, default=None),
        "envelope_max": max(far_env, default=None),
        "envelope_count": len(far_env),
    }
    verdict = {
        "residue_quantization": bool(traj.poles) and strength_dev <= RESIDUE_TOL,
        "phase": bool(far) and all(abs(e) < PHASE_TOL for _, e in far),
        "phase_trend": bool(np.isfinite(trend) and trend > 0.0),
        "envelope": bool(far_env) and all(ENVELOPE_BAND[0] <= r <= ENVELOPE_BAND[1] for r in far_env),
        "pairing": not lonely_pred and not lonely_obs and order_ok,
    }
    return ConnectionReport(
        params=_params_echo(params),
        config=asdict(cfg),
        predicted_poles=[float(x) for x in predicted if x >= x_lo],
        observed_poles=observed,
        pairwise_phase_errors=errors,
        residue_signs=signs,
        residue_strengths=strengths,
        fit_residuals=[p.fit_residual for p in traj.poles],
        pairs=pairs,
        unpaired_predicted=lonely_pred,
        unpaired_observed=lonely_obs,
        envelope_ratios=env,
        verdict=verdict,
        metrics=metrics,
        stop_reason=traj.stop_reason,
        error=error,
        trajectory=traj,
    )


def classify_signed(alpha: float, k: float) -> SolutionClass:
    """:func:`classify` extended to alpha < 0 through ``u(x; -alpha) = -u(x; alpha)``."""
    return classify(alpha, k) if alpha >= 0 else classify(-alpha, -k)


def run_connection_experiment(cfg: RunConfig) -> ConnectionReport:
    """Integrate, extract poles, pair with predictions and grade the run.

    Raises
    ------
    NotSingularRegime
        When (alpha, k) is not a singular solution; ``.classification``
        holds the family it belongs to.
    PiiLabError
        Solver failures propagate with ``.report`` set to the report built
        from the partial trajectory.
    """
    cls = classify_signed(cfg.alpha, cfg.k)
    if cls is not SolutionClass.Singular:
        exc = NotSingularRegime(f"(alpha, k) = ({cfg.alpha}, {cfg.k}) is in class {cls.value}, not singular")
        exc.classification = cls
        raise exc
    params = make_params(cfg.alpha, cfg.k)
    try:
        traj = integrate(params, cfg.x_start, cfg.x_end, tol=cfg.tol, pole_budget=cfg.pole_budget,
                         N=cfg.series_N, init=cfg.init)
    except PiiLabError as exc:
        partial = getattr(exc, "partial", None)
        if partial is not None:
            exc.report = _grade(params, cfg, partial, f"{type(exc).__name__}: {exc}")
        raise
    return _grade(params, cfg, traj, None)


# ---------------------------------------------------------------------------
# Parametrix suite
# ---------------------------------------------------------------------------


def stokes_nu(alpha: float, s3: complex) -> Optional[complex]:
    """``nu = -ln(1 - s1 s3) / (2 pi i)`` on the branch ``ln(-w) = ln w + i pi``,
    that is ``-1/2 - ln(s1 s3 - 1) / (2 pi i)``; None when ``s1 s3 = 1``.

    For real solutions ``s1 s3 - 1 = k^2 - cos^2(pi alpha)`` and this is the
    familiar ``-1/2 + i d^2 / 2``.
    """
    s1 = rh.derived_s1(alpha, s3)
    w = s1 * complex(s3) - 1.0
    if abs(w) < 1e-12:
        return None
    return -0.5 - np.log(complex(w)) / (2j * math.pi)


def run_parametrix_suite(alpha_list: Sequence[float] = DEFAULT_ALPHAS,
                         s3_list: Sequence[complex] = DEFAULT_S3,
                         radii: Sequence[float] = DEFAULT_RADII) -> List[rh.ResidualReport]:
    """Jump, determinant, normalization and origin checks for M; crossing,
    large-zeta and determinant checks for Z at the nu implied by each pair.
    """
    reports: List[rh.ResidualReport] = []
    for alpha in alpha_list:
        for s3 in s3_list:
            reports.append(rh.verify_M_jumps(alpha, s3, radii))
            reports.append(rh.verify_M_det(alpha, s3))
            reports.append(rh.verify_M_infinity(alpha, s3))
        if s3_list:
            origin = rh.verify_M_origin(alpha, s3_list[0])
            reports.append(origin)
        for s3 in s3_list:
            nu = stokes_nu(alpha, s3)
            if nu is None:
                continue
            reports.append(rh.verify_Z_crossings(nu))
            reports.append(rh.verify_Z_large(nu))
            reports.append(rh.verify_Z_det(nu))
    return reports


# ---------------------------------------------------------------------------
# Grid scan
# ---------------------------------------------------------------------------


def _thread_count() -> int:
    raw = os.environ.get("PII_LAB_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        n = os.cpu_count() or 1
    return max(1, n)


def _scan_cell(alpha: float, k: float, solve: bool, tol: float) -> Dict[str, Any]:
    row: Dict[str, Any] = {"alpha": alpha, "k": k, "classification": None, "d_squared": None,
                           "first_pole": None, "error": None}
    try:
        cls = classify_signed(alpha, k)
        row["classification"] = cls.value
        if cls is SolutionClass.Singular:
            params = make_params(alpha, k)
            row["d_squared"] = params.d_squared
            if solve:
                traj = integrate(params, 10.0, -30.0, tol=tol, pole_budget=1)
                row["first_pole"] = traj.poles[0].x_p if traj.poles else None
    except Exception as exc:  # noqa: BLE001 - the scan records and continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def scan_cells(cells: Sequence[Tuple[float, float]], solve: bool = False, tol: float = 1e-10,
               threads: Optional[int] = None) -> List[Dict[str, Any]]:
    """Classify (and optionally solve) an explicit list of (alpha, k) cells."""
    if len(cells) > MAX_GRID_CELLS:
        raise ValueError(f"at most {MAX_GRID_CELLS} cells per scan")
    for a, k in cells:
        if abs(a) > 3 or abs(k) > 5:
            raise ValueError("grid cells must satisfy |alpha| <= 3 and |k| <= 5")
    n = threads if threads is not None else _thread_count()
    if n <= 1 or len(cells) < 2:
        return [_scan_cell(float(a), float(k), solve, tol) for a, k in cells]
    with ThreadPoolExecutor(max_workers=n) as pool:
        # map preserves input order, so the merge is deterministic.
        return list(pool.map(lambda c: _scan_cell(float(c[0]), float(c[1]), solve, tol), cells))


def grid_scan(alpha_range: Tuple[float, float], k_range: Tuple[float, float],
              steps: Union[int, Tuple[int, int]], solve: bool = False, tol: float = 1e-10,
              threads: Optional[int] = None) -> List[Dict[str, Any]]:
    """Scan a rectangular (alpha, k) grid with endpoints included.

    ``steps`` is the number of points per axis, or a pair for the two axes.
    Cells are ordered alpha-major. Per-cell errors land in the ``error``
    column and the scan continues.
    """
    na, nk = (steps, steps) if isinstance(steps, int) else steps
    if na < 1 or nk < 1:
        raise ValueError("steps must be positive")
    alphas = np.linspace(alpha_range[0], alpha_range[1], na)
    ks = np.linspace(k_range[0], k_range[1], nk)
    cells = [(float(a), float(k)) for a in alphas for k in ks]
    return scan_cells(cells, solve=solve, tol=tol, threads=threads)


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

TRAJECTORY_HEADER = ("x", "u", "u_prime", "segment_id")
POLE_HEADER = ("x_p", "epsilon", "h", "fit_residual")
GRID_HEADER = ("alpha", "k", "classification", "d_squared", "first_pole", "error")
SUITE_HEADER = ("contour_id", "max_residual", "tolerance_used", "passed")


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(v) for v in row])


def write_trajectory_csv(traj: Trajectory, path: Union[str, Path]) -> None:
    """One row per stored sample."""
    rows = zip(traj.x.tolist(), traj.u.tolist(), traj.u_prime.tolist(), traj.segment_id.tolist())
    _write_csv(Path(path), TRAJECTORY_HEADER, list(rows))


def write_poles_csv(traj: Trajectory, path: Union[str, Path]) -> None:
    rows = [(p.x_p, p.epsilon, p.h, p.fit_residual) for p in traj.poles]
    _write_csv(Path(path), POLE_HEADER, rows)


def _suite_dict(r: rh.ResidualReport) -> Dict[str, Any]:
    return {
        "contour_id": r.contour_id,
        "samples": [[_encode(z), res] for z, res in r.samples],
        "max_residual": r.max_residual,
        "tolerance_used": r.tolerance_used,
        "passed": r.passed,
    }


def format_text(report: Any) -> str:
    """Human-readable summary of any report kind."""
    out = io.StringIO()
    if isinstance(report, ConnectionReport):
        p = report.params
        out.write(f"alpha={p['alpha']:g} k={p['k']:g} d^2={p['d_squared']:.6f} phi={p['phi']:.6f}\n")
        out.write(f"poles crossed: {len(report.observed_poles)} (stop: {report.stop_reason})\n")
        for name, ok in report.verdict.items():
            out.write(f"  {name:22s} {'PASS' if ok else 'FAIL'}\n")
        for name, val in report.metrics.items():
            out.write(f"  {name:22s} {val}\n")
        if report.error:
            out.write(f"error: {report.error}\n")
    elif isinstance(report, list) and report and isinstance(report[0], rh.ResidualReport):
        for r in report:
            out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.contour_id:40s} {r.max_residual:.3e} (tol {r.tolerance_used:.1e})\n")
    elif isinstance(report, list):
        for row in report:
            out.write(" ".join(f"{k}={_cell(row[k])}" for k in GRID_HEADER) + "\n")
    return out.getvalue()


def emit(report: Any, path: Union[str, Path], format: str = "json") -> List[Path]:
    """Write a report and return the paths written.

    ``report`` is a :class:`ConnectionReport`, a list of
    :class:`~pii_lab.rh_parametrix.ResidualReport`, or grid-scan rows.
    For a connection report the ``csv`` format writes the trajectory to
    ``path`` and the pole table next to it as ``<stem>_poles.csv``. Floats
    are written with ``repr``, the shortest text that round-trips.
    """
    if format not in REPORT_FORMATS:
        raise ValueError(f"format must be one of {REPORT_FORMATS}")
    path = Path(path)
    if format == "text":
        path.write_text(format_text(report))
        return [path]
    if isinstance(report, ConnectionReport):
        if format == "json":
            path.write_text(json.dumps(report.to_dict(), indent=1))
            return [path]
        if report.trajectory is None:
            raise ValueError("report carries no trajectory to write as CSV")
        poles_path = path.with_name(path.stem + "_poles.csv")
        write_trajectory_csv(report.trajectory, path)
        write_poles_csv(report.trajectory, poles_path)
        return [path, poles_path]
    if isinstance(report, list) and all(isinstance(r, rh.ResidualReport) for r in report):
        if format == "json":
            path.write_text(json.dumps([_suite_dict(r) for r in report], indent=1))
        else:
            _write_csv(path, SUITE_HEADER, [(r.contour_id, r.max_residual, r.tolerance_used, r.passed) for r in report])
        return [path]
    if format == "json":
        path.write_text(json.dumps(list(report), indent=1))
    else:
        _write_csv(path, GRID_HEADER, [[row[k] for k in GRID_HEADER] for row in report])
    return [path]


def load_report(path: Union[str, Path]) -> ConnectionReport:
    """Inverse of ``emit(report, path, "json")`` for connection reports."""
    return ConnectionReport.from_dict(json.loads(Path(path).read_text()))
