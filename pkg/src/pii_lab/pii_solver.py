"""Real-axis integration of ``u'' = 2u^3 + x u - alpha`` through movable poles.

Integration starts from asymptotic data at large positive x and runs toward
negative x with an adaptive 8th order Runge-Kutta method (DOP853). Whenever
|u| exceeds a blow-up threshold the integrator keeps stepping toward the pole
until |u| reaches a hard stop, fits the two free constants (x_p, h) of the
Laurent expansion

    u = eps/z - (eps x_p / 6) z + ((alpha - eps)/4) z^2 + h z^3 + ...,   z = x - x_p,

to those approach samples, and restarts on the far side of the pole from the
same series.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, least_squares

from .asymptotics import SolutionParams, eval_B, resummed_initial_data
from .errors import AmbiguousResidue, PiiLabError, PoleFitFailure, StepSizeUnderflow
from .specfun import airy_ai

__all__ = [
    "PoleRecord",
    "Trajectory",
    "initial_conditions",
    "integrate",
    "cross_pole",
    "extract_observables",
    "laurent_coefficients",
]

BLOWUP = 1e2
HARD_STOP = 1e6
FIT_FLOOR = 10.0
LAURENT_ORDER = 20
MAX_WINDOW = 0.1


@dataclass(frozen=True)
class PoleRecord:
    """One movable pole crossed by the integrator.

    Attributes
    ----------
    x_p : float
        Pole location.
    epsilon : int
        Residue sign, +1 or -1.
    h : float
        Free Laurent coefficient of z^3.
    window : float
        Half width of the excluded interval around x_p; integration resumed
        at ``x_p - window``.
    fit_residual : float
        Largest relative residual of the (x_p, h) fit over the window.
    strength : float
        Fitted coefficient of 1/z when it is left free (diagnostic).
    n_samples : int
        Number of approach samples used in the fit.
    """

    x_p: float
    epsilon: int
    h: float
    window: float
    fit_residual: float
    strength: float = float("nan")
    n_samples: int = 0


@dataclass
class Trajectory:
    """Sampled solution path, strictly decreasing in x.

    ``x``, ``u``, ``u_prime`` and ``segment_id`` are parallel arrays; segment
    ``j`` lies between pole ``j - 1`` and pole ``j``. ``midphase`` holds
    ``(x, u)`` at the points where Phi(x) = n pi + pi/2, interpolated from
    the integrator's dense output.
    """

    params: SolutionParams
    x: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    segment_id: np.ndarray
    poles: List[PoleRecord]
    tol: float
    midphase: List[Tuple[float, float]] = field(default_factory=list)
    stop_reason: str = "x_end"

    @property
    def samples(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.x.tolist(), self.u.tolist(), self.u_prime.tolist()))


def _rhs(alpha: float):
    def f(x: float, y: np.ndarray) -> List[float]:
        u = y[0]
        return [y[1], 2.0 * u * u * u + x * u - alpha]

    return f


def initial_conditions(params: SolutionParams, x0: float, N: Optional[int] = None,
                       method: str = "resummed") -> Tuple[float, float]:
    """Asymptotic data (u, u') at a large positive x0.

    Parameters
    ----------
    params : SolutionParams
    x0 : float
        Starting abscissa, x0 >= 8.
    N : int, optional
        Truncation index for ``method="truncated"``; optimal by default.
    method : {"resummed", "truncated"}
        ``"truncated"`` returns ``B(x0) + k Ai(x0)`` with B at optimal
        truncation. ``"resummed"`` (default) replaces B by its median sum and
        Ai by the decaying mode of the linearised equation, which removes
        an O(alpha Ai) ambiguity in the meaning of k.
    """
    if x0 < 8.0:
        raise ValueError("initial_conditions requires x0 >= 8")
    if method == "truncated" or params.alpha == 0.0:
        b = eval_B(params.alpha, x0, N)
        ai, aip = airy_ai(x0)
        return b.u + params.k * ai, b.u_prime + params.k * aip
    if method != "resummed":
        raise ValueError(f"unknown method {method!r}")
    return resummed_initial_data(params, x0)


# ---------------------------------------------------------------------------
# Laurent series at a pole
# ---------------------------------------------------------------------------


def laurent_coefficients(x_p: float, epsilon: int, h: float, alpha: float,
                         order: int = LAURENT_ORDER) -> np.ndarray:
    """Coefficients c_{-1}, c_0, ..., c_order of the Laurent series at x_p.

    Matching powers of z in the equation gives
    ``(n - 3)(n + 2) c_n = 2 [u^3]'_{n-2} + x_p c_{n-2} + c_{n-3} - alpha delta_{n,2}``
    where the primed cube coefficient omits the terms containing c_n. The
    resonance at n = 3 leaves c_3 = h free.
    """
    b = np.zeros(order + 2)  # b[m] = c_{m-1}
    b[0] = float(epsilon)
    for n in range(0, order + 1):
        m = n + 1
        if n == 3:
            b[m] = h
            continue
        b[m] = 0.0
        cube = np.convolve(np.convolve(b[: m + 1], b[: m + 1]), b[: m + 1])
        rhs = 2.0 * (cube[n + 1] if n + 1 < len(cube) else 0.0)
        if n >= 1:
            rhs += x_p * b[n - 1]
        if n >= 2:
            rhs += b[n - 2]
        if n == 2:
            rhs -= alpha
        b[m] = rhs / ((n - 3) * (n + 2))
    return b


def _laurent_eval(b: np.ndarray, z: np.ndarray, strength: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    c_m1 = b[0] if strength is None else strength
    powers = np.arange(0, len(b) - 1)
    zz = z[:, None]
    reg = np.sum(b[1:] * zz ** powers, axis=1)
    dreg = np.sum((b[2:] * powers[1:]) * zz ** (powers[1:] - 1), axis=1)
    return c_m1 / z + reg, -c_m1 / z ** 2 + dreg


def _restart_window(b: np.ndarray, tol: float) -> float:
    # Largest w with the last retained terms below tol relative to 1/w.
    tail = np.abs(b[-3:])
    w = MAX_WINDOW
    for j, c in enumerate(tail):
        power = len(b) - 3 + j  # exponent of z for b index, plus one for 1/w scaling
        if c > 0:
            w = min(w, (tol / c) ** (1.0 / power))
    return w


def cross_pole(approach: Tuple[np.ndarray, np.ndarray, np.ndarray], params: SolutionParams,
               tol: float = 1e-10, order: int = LAURENT_ORDER,
               max_residual: float = 1e-6) -> Tuple[PoleRecord, Tuple[float, float, float]]:
    """Fit the Laurent model to approach samples and step over the pole.

    Parameters
    ----------
    approach : tuple of arrays
        ``(x, u, u_prime)`` on one side of the pole, decreasing in x.
    params : SolutionParams
    tol : float
        Integrator tolerance; sets the restart distance.
    order : int
        Highest power of z kept in the Laurent series.
    max_residual : float
        Threshold on the relative fit residual.

    Returns
    -------
    record : PoleRecord
    restart : tuple
        ``(x, u, u_prime)`` at ``x_p - window``.

    Raises
    ------
    PoleFitFailure
        Fewer than 8 samples, or residual above ``max_residual``.
    AmbiguousResidue
        Samples change sign, or the opposite residue fits better.
    """
    xs, us, ups = (np.asarray(a, dtype=float) for a in approach)
    if len(xs) < 8:
        raise PoleFitFailure(f"need at least 8 approach samples, got {len(xs)}")
    signs = np.sign(us)
    if not (np.all(signs > 0) or np.all(signs < 0)):
        raise AmbiguousResidue("approach samples straddle a sign change of u")
    eps = int(signs[0])
    alpha = params.alpha
    going_left = xs[-1] < xs[0]
    side = 1.0 if going_left else -1.0
    x_p0 = xs[-1] - side / abs(us[-1])

    def residuals(theta: np.ndarray, e: int, free: bool) -> np.ndarray:
        x_p, h = theta[0], theta[1]
        b = laurent_coefficients(x_p, e, h, alpha, order)
        z = xs - x_p
        mu, mup = _laurent_eval(b, z, theta[2] if free else None)
        return np.concatenate([(mu - us) / np.abs(us), (mup - ups) / np.abs(ups)])

    def fit(e: int, free: bool) -> least_squares:
        theta0 = [x_p0, 0.0] + ([float(e)] if free else [])
        return least_squares(residuals, theta0, args=(e, free), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)

    best = fit(eps, False)
    res = float(np.max(np.abs(best.fun)))
    other = fit(-eps, False)
    if float(np.max(np.abs(other.fun))) < res:
        raise AmbiguousResidue("opposite residue sign fits the approach data better")
    free = fit(eps, True)
    x_p, h = float(best.x[0]), float(best.x[1])
    b = laurent_coefficients(x_p, eps, h, alpha, order)
    w = _restart_window(b, tol)
    record = PoleRecord(x_p=x_p, epsilon=eps, h=h, window=w, fit_residual=res,
                        strength=float(free.x[2]), n_samples=len(xs))
    if res > max_residual or not np.isfinite(res):
        raise PoleFitFailure(f"Laurent fit residual {res:.3g} at x_p = {x_p:.12g}")
    z_new = np.array([-side * w])
    u_new, up_new = _laurent_eval(b, z_new)
    return record, (x_p - side * w, float(u_new[0]), float(up_new[0]))


# ---------------------------------------------------------------------------
# Integration driver
# ---------------------------------------------------------------------------


def _midphase_points(params: SolutionParams, x_hi: float, x_lo: float) -> List[float]:
    """Points in [x_lo, x_hi] (x < 0) where Phi = n pi + pi/2."""
    if x_hi >= 0:
        x_hi = -1e-3
    if x_lo >= x_hi or not (math.isfinite(params.d_squared) and math.isfinite(params.phi)):
        return []
    f = lambda x: params.phase(x)
    lo_ph, hi_ph = sorted((f(x_hi), f(x_lo)))
    out = []
    for n in range(math.ceil(lo_ph / math.pi - 0.5), math.floor(hi_ph / math.pi - 0.5) + 1):
        target = n * math.pi + 0.5 * math.pi
        g = lambda x: f(x) - target
        if g(x_hi) * g(x_lo) <= 0:
            out.append(brentq(g, x_lo, x_hi, xtol=1e-14))
    return sorted(out, reverse=True)


def integrate(params: SolutionParams, x0: float, x_end: float, tol: float = 1e-10,
              pole_budget: int = 40, N: Optional[int] = None, init: str = "resummed",
              initial: Optional[Tuple[float, float]] = None) -> Trajectory:
    """Integrate from x0 down to x_end, crossing every pole on the way.

    Parameters
    ----------
    params : SolutionParams
    x0, x_end : float
        Start and end, x0 > x_end.
    tol : float
        Relative tolerance of the Runge-Kutta error control, in [1e-13, 1e-6].
    pole_budget : int
        Stop after this many poles.
    N : int, optional
        Series truncation for truncated initial data.
    init : {"resummed", "truncated"}
        Initial data flavour, see :func:`initial_conditions`.
    initial : tuple, optional
        Explicit (u, u') at x0, overriding ``init``.

    Returns
    -------
    Trajectory

    Raises
    ------
    StepSizeUnderflow
        If the Runge-Kutta step collapses away from a pole.
    PoleFitFailure, AmbiguousResidue
        From :func:`cross_pole`.

    Any of these carries the trajectory up to the failure as ``.partial``.
    """
    if not x0 > x_end:
        raise ValueError("x0 must exceed x_end")
    if not 1e-13 <= tol <= 1e-6:
        raise ValueError("tol must lie in [1e-13, 1e-6]")
    if initial is None:
        u0, up0 = initial_conditions(params, x0, N, method=init)
    else:
        u0, up0 = initial
    rhs = _rhs(params.alpha)
    atol = 1e-300

    def blowup(x: float, y: np.ndarray) -> float:
        return abs(y[0]) - BLOWUP

    blowup.terminal = True
    blowup.direction = 1

    def hard_stop(x: float, y: np.ndarray) -> float:
        return abs(y[0]) - HARD_STOP

    hard_stop.terminal = True
    hard_stop.direction = 1

    xs: List[np.ndarray] = []
    us: List[np.ndarray] = []
    ups: List[np.ndarray] = []
    seg: List[np.ndarray] = []
    poles: List[PoleRecord] = []
    mids: List[Tuple[float, float]] = []
    x, y = float(x0), np.array([u0, up0], dtype=float)
    segment = 0
    stop_reason = "x_end"

    def run(xa: float, ya: np.ndarray, event) -> object:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            sol = solve_ivp(rhs, (xa, x_end), ya, method="DOP853", rtol=tol, atol=atol,
                            events=event, dense_output=True)
        if sol.status == -1:
            raise StepSizeUnderflow(f"integration failed near x = {sol.t[-1]:.12g}: {sol.message}", float(sol.t[-1]))
        return sol

    def assemble(reason: str) -> Trajectory:
        return Trajectory(
            params=params,
            x=np.concatenate(xs) if xs else np.array([float(x0)]),
            u=np.concatenate(us) if us else np.array([u0]),
            u_prime=np.concatenate(ups) if ups else np.array([up0]),
            segment_id=np.concatenate(seg).astype(int) if seg else np.zeros(1, dtype=int),
            poles=poles,
            tol=tol,
            midphase=mids,
            stop_reason=reason,
        )

    try:
        while True:
            sol = run(x, y, blowup)
            seg_x, seg_u, seg_up = sol.t, sol.y[0], sol.y[1]
            for xm in _midphase_points(params, float(seg_x[0]), float(seg_x[-1])):
                mids.append((xm, float(sol.sol(xm)[0])))
            if sol.status == 0:
                xs.append(seg_x); us.append(seg_u); ups.append(seg_up)
                seg.append(np.full(len(seg_x), segment))
                break
            # Entered fitting mode: keep stepping to the hard stop.
            xe = float(sol.t_events[0][0])
            ye = sol.y_events[0][0]
            near = run(xe, ye, hard_stop)
            if near.status == 0:
                # Reached x_end before the pole.
                xs.append(np.concatenate([seg_x, near.t[1:]])); us.append(np.concatenate([seg_u, near.y[0][1:]]))
                ups.append(np.concatenate([seg_up, near.y[1][1:]]))
                seg.append(np.full(len(xs[-1]), segment))
                break
            ax = np.concatenate([seg_x, near.t[1:]])
            au = np.concatenate([seg_u, near.y[0][1:]])
            aup = np.concatenate([seg_up, near.y[1][1:]])
            mask = np.abs(au) >= FIT_FLOOR
            # Only the contiguous run of samples right before the pole.
            start = len(mask)
            while start > 0 and mask[start - 1]:
                start -= 1
            fit_idx = np.arange(start, len(ax))
            if len(fit_idx) > 80:
                pick = np.unique(np.round(np.geomspace(1, len(fit_idx), 80)).astype(int) - 1)
                fit_idx = fit_idx[pick]
            record, restart = cross_pole((ax[fit_idx], au[fit_idx], aup[fit_idx]), params, tol)
            poles.append(record)
            keep = ax > record.x_p + record.window
            xs.append(ax[keep]); us.append(au[keep]); ups.append(aup[keep])
            seg.append(np.full(int(keep.sum()), segment))
            segment += 1
            x = restart[0]
            y = np.array([restart[1], restart[2]])
            if len(poles) >= pole_budget:
                stop_reason = "pole_budget"
                break
            if x <= x_end:
                break
    except PiiLabError as exc:
        # Hand the caller everything integrated so far.
        exc.partial = assemble("error")
        raise

    return assemble(stop_reason)


def extract_observables(traj: Trajectory, x_max: float = -5.0) -> Tuple[List[float], List[Tuple[float, float]]]:
    """Pole locations and envelope ratios ``u sin(Phi) / sqrt(-x)`` at midphase points.

    Only midphase points with x <= x_max contribute to the envelope list.
    """
    poles = [p.x_p for p in traj.poles]
    if not poles:
        return [], []
    env = []
    for xm, um in traj.midphase:
        if xm <= x_max:
            env.append((xm, um * math.sin(traj.params.phase(xm)) / math.sqrt(-xm)))
    return poles, env
