"""Closed-form asymptotics of singular inhomogeneous Painleve II solutions.

The equation is ``u'' = 2 u^3 + x u - alpha``. For real (alpha, k) the
solution ``u(x; alpha, k)`` behaves like ``B(x; alpha) + k Ai(x)`` as
x -> +infinity, where ``B = (alpha/x) sum a_n x^(-3n)`` is a divergent series.
When ``k^2 > cos(pi alpha)^2`` it has infinitely many poles on the negative
axis, located asymptotically at the zeros of ``sin Phi(x)`` with

    Phi(x) = (2/3)(-x)^(3/2) + (3/4) d^2 ln(-x) + phi.

This module holds the series, the connection constants (d^2, phi and the
Stokes multipliers), the Table-style classification of solution families
and a pole predictor. It also provides the Borel-type median resummation of
B that fixes what "k" means at finite x (see :func:`median_sum`).
"""

from __future__ import annotations

import enum
from fractions import Fraction
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import brentq

from .errors import NearPole, NotSingularRegime, TruncationDiverging
from .specfun import airy_ai, loggamma

__all__ = [
    "SolutionParams",
    "AsymCoeffs",
    "SolutionClass",
    "SeriesValue",
    "make_params",
    "series_coefficients",
    "eval_B",
    "eval_positive_asymptote",
    "eval_negative_asymptote",
    "phase",
    "predict_poles",
    "classify",
    "median_sum",
    "decaying_mode",
    "resummed_initial_data",
]

MAX_PUBLIC_N = 30
_LATE_ORDER_RANGE = (20, 60)
_LATE_ORDER_TERMS = 4


def _reduce_angle(theta: float) -> float:
    r = math.remainder(theta, 2.0 * math.pi)
    return math.pi if r <= -math.pi else r


@dataclass(frozen=True)
class SolutionParams:
    """Parameters of one singular solution and its connection constants.

    Attributes
    ----------
    alpha, k : float
        Equation parameter and amplitude of the Ai(x) tail at +infinity.
    s1, s3 : complex
        Stokes multipliers, ``s1 = -sin(pi alpha) - k i`` and ``s3 = conj(s1)``.
    nu : complex
        ``-1/2 + i d_squared / 2``.
    d_squared : float
        ``ln(k^2 - cos(pi alpha)^2) / pi``. Only d^2 is stored because d itself
        is imaginary when the logarithm is negative.
    phi : float
        Phase constant in (-pi, pi].
    """

    alpha: float
    k: float
    s1: complex
    s3: complex
    nu: complex
    d_squared: float
    phi: float

    def phase(self, x: float | np.ndarray) -> float | np.ndarray:
        """Phi(x) for x < 0."""
        y = -np.asarray(x, dtype=float)
        out = (2.0 / 3.0) * y ** 1.5 + 0.75 * self.d_squared * np.log(y) + self.phi
        return float(out) if np.ndim(out) == 0 else out

    def phase_derivative(self, x: float | np.ndarray) -> float | np.ndarray:
        """dPhi/dx (negative where Phi increases toward -infinity)."""
        y = -np.asarray(x, dtype=float)
        out = -(np.sqrt(y) + 0.75 * self.d_squared / y)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class AsymCoeffs:
    """Coefficients a_0..a_N of the formal series B(x; alpha)."""

    alpha: float
    coeffs: Tuple[float, ...]

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1


class SolutionClass(str, enum.Enum):
    """Families of real solutions with ``u ~ B(x) + k Ai(x)`` at +infinity."""

    AS = "AS"
    qAS = "qAS"
    pHM = "pHM"
    sHM = "sHM"
    qHM = "qHM"
    Singular = "Singular"
    DoesNotExist = "DoesNotExist"


@dataclass(frozen=True)
class SeriesValue:
    """Partial sum of B and its derivative, with the first omitted term as error.

    Iterating yields ``(u, u_prime)`` so the value unpacks like a pair.
    """

    u: float
    u_prime: float
    error: float
    N: int

    def __iter__(self) -> Iterator[float]:
        yield self.u
        yield self.u_prime


# ---------------------------------------------------------------------------
# Connection constants and classification
# ---------------------------------------------------------------------------


def make_params(alpha: float, k: float) -> SolutionParams:
    """Build :class:`SolutionParams` for a singular solution.

    Raises
    ------
    NotSingularRegime
        If ``k^2 <= cos(pi alpha)^2``.
    """
    alpha = float(alpha)
    k = float(k)
    c2 = math.cos(math.pi * alpha) ** 2
    gap = k * k - c2
    if not gap > 0.0:
        raise NotSingularRegime(f"k^2 = {k * k:.6g} must exceed cos^2(pi alpha) = {c2:.6g}")
    s1 = complex(-math.sin(math.pi * alpha), -k)
    d2 = math.log(gap) / math.pi
    arg_gamma = loggamma(complex(0.5, 0.5 * d2)).imag
    phi = 1.5 * math.log(2.0) * d2 - arg_gamma - math.atan2(s1.imag, s1.real)
    return SolutionParams(
        alpha=alpha,
        k=k,
        s1=s1,
        s3=s1.conjugate(),
        nu=complex(-0.5, 0.5 * d2),
        d_squared=d2,
        phi=_reduce_angle(phi),
    )


def classify(alpha: float, k: float, tol: float = 1e-12) -> SolutionClass:
    """Classify the real solution with parameters (alpha >= 0, k).

    Rows are alpha = 0, alpha in (0, 1/2), alpha in (n - 1/2, n + 1/2) for
    n >= 1, and alpha = n + 1/2 (half integers); columns compare |k| with
    |cos(pi alpha)|. Classification is presentation only.
    """
    alpha = float(alpha)
    k = float(k)
    if alpha < 0:
        raise ValueError("classify expects alpha >= 0; map (alpha, k) -> (-alpha, -k) first")
    c = math.cos(math.pi * alpha)
    half_integer = abs(alpha - 0.5 - math.floor(alpha)) < tol or abs(alpha + 0.5 - math.ceil(alpha)) < tol
    if half_integer:
        c = 0.0
    if abs(k) > abs(c) + tol:
        return SolutionClass.Singular
    if abs(k - c) <= tol:
        return SolutionClass.pHM
    if abs(k + c) <= tol:
        if alpha < tol or half_integer:
            return SolutionClass.pHM
        return SolutionClass.sHM if alpha < 0.5 else SolutionClass.qHM
    # |k| < |cos(pi alpha)|
    if half_integer:
        return SolutionClass.DoesNotExist
    if alpha < 0.5:
        return SolutionClass.AS
    return SolutionClass.qAS


# ---------------------------------------------------------------------------
# The formal series B
# ---------------------------------------------------------------------------


def _raw_coefficients(alpha: float, N: int) -> np.ndarray:
    return np.array(_cached_coefficients(abs(float(alpha)), int(N)))


@lru_cache(maxsize=512)
def _cached_coefficients(alpha: float, N: int) -> Tuple[float, ...]:
    # Exact rational arithmetic on the binary value of alpha, rounded once at
    # the end: the float recurrence loses ~1e-13 to cancellation.
    two_a2 = 2 * Fraction(alpha) ** 2
    a = [Fraction(1)]
    sq: list = []
    for n in range(N):
        sq.append(sum(a[j] * a[n - j] for j in range(n + 1)))
        cube = sum(a[j] * sq[n - j] for j in range(n + 1))
        a.append((3 * n + 1) * (3 * n + 2) * a[n] - two_a2 * cube)
    return tuple(float(v) for v in a)


def series_coefficients(alpha: float, N: int) -> AsymCoeffs:
    """Coefficients of ``B(x; alpha) = (alpha/x) sum_n a_n x^(-3n)``.

    ``a_0 = 1`` and ``a_{n+1} = (3n+1)(3n+2) a_n - 2 alpha^2 sum_{k+l+m=n} a_k a_l a_m``.
    """
    if not 0 <= N <= MAX_PUBLIC_N:
        raise ValueError(f"N must lie in [0, {MAX_PUBLIC_N}]")
    return AsymCoeffs(float(alpha), tuple(float(v) for v in _raw_coefficients(float(alpha), N)))


def _terms(alpha: float, x: float, nmax: int = MAX_PUBLIC_N) -> np.ndarray:
    a = _raw_coefficients(alpha, nmax)
    return a * x ** (-3.0 * np.arange(nmax + 1))


def optimal_truncation(alpha: float, x: float) -> int:
    """Index N such that summing terms 0..N stops just before the smallest term."""
    t = np.abs(_terms(alpha, x))
    if np.all(t[1:] == 0.0):
        return 0
    return int(np.argmin(t[1:]))  # smallest term sits at index argmin + 1


def eval_B(alpha: float, x: float, N: Optional[int] = None) -> SeriesValue:
    """Truncated series B(x; alpha) and its term-wise derivative.

    Parameters
    ----------
    alpha : float
    x : float
        Evaluation point, x >= 2.
    N : int, optional
        Last included index. Defaults to optimal truncation.

    Returns
    -------
    SeriesValue
        ``error`` is the magnitude of the first omitted term.

    Raises
    ------
    TruncationDiverging
        If terms have started to grow before index N.
    """
    x = float(x)
    if x < 2.0:
        raise ValueError("eval_B requires x >= 2")
    alpha = float(alpha)
    if alpha == 0.0:
        return SeriesValue(0.0, 0.0, 0.0, 0 if N is None else int(N))
    terms = _terms(alpha, x)
    mags = np.abs(terms)
    n_opt = optimal_truncation(alpha, x)
    terminating = np.all(mags[n_opt + 1:] == 0.0)
    if N is None:
        N = n_opt
    N = int(N)
    if N > MAX_PUBLIC_N:
        raise ValueError(f"N must not exceed {MAX_PUBLIC_N}")
    if N > n_opt + 1 and not terminating:
        raise TruncationDiverging(
            f"terms grow beyond index {n_opt + 1} at x = {x}; requested N = {N}")
    n = np.arange(N + 1)
    s = float(np.sum(terms[: N + 1]))
    ds = float(np.sum(-3.0 * n * terms[: N + 1])) / x
    u = alpha / x * s
    up = -u / x + alpha / x * ds
    err = abs(alpha / x) * (float(mags[N + 1]) if N + 1 < len(mags) else 0.0)
    return SeriesValue(u, up, err, N)


def eval_positive_asymptote(params: SolutionParams, x: float, N: Optional[int] = None) -> float:
    """Leading positive-axis behaviour ``B(x; alpha) + k Ai(x)`` (real part of the RH correction)."""
    if x < 4.0:
        raise ValueError("eval_positive_asymptote requires x >= 4")
    b = eval_B(params.alpha, x, N)
    return b.u + params.k * airy_ai(x)[0]


# ---------------------------------------------------------------------------
# Median resummation of B and the decaying linear mode
# ---------------------------------------------------------------------------


@lru_cache(maxsize=256)
def _late_order_fit(alpha: float) -> Tuple[np.ndarray, np.ndarray]:
    """Fit ``a_n (4/9)^n = sum_j d_j Gamma(2n + 1/2 - j)`` on large n.

    The leading coefficient agrees with
    ``sqrt(3/2) sin(pi alpha) / (alpha pi^(3/2))``; the fit also captures the
    first few corrections, which matter at the modest n used at x ~ 10.
    """
    from scipy.special import gammaln

    lo, hi = _LATE_ORDER_RANGE
    a = _raw_coefficients(alpha, hi)
    n = np.arange(lo, hi + 1)
    scaled = a[n] / np.exp(n * math.log(9.0 / 4.0) + gammaln(2 * n + 0.5))
    cols = [np.exp(gammaln(2 * n + 0.5 - j) - gammaln(2 * n + 0.5)) for j in range(_LATE_ORDER_TERMS)]
    d, *_ = np.linalg.lstsq(np.array(cols).T, scaled, rcond=None)
    return d, a


def _pv_laplace(t: float, p: float) -> float:
    """``e^t * PV int_0^inf e^(-t s) s^p / (1 - s^2) ds``."""

    def cauchy_part(s: float) -> float:
        if s <= 0.0:
            return 0.0
        return -math.exp(-t * (s - 1.0) + p * math.log(s)) / (1.0 + s)

    def regular_part(s: float) -> float:
        return math.exp(-t * (s - 1.0) + p * math.log(s)) / (1.0 - s * s)

    b = 1.0 + 40.0 / math.sqrt(t) + 40.0 / t
    with warnings.catch_warnings():
        # quad flags round-off near its tolerance floor; the recurrence
        # I(p) - I(p + 2) = Gamma(p + 1) / t^(p + 1) holds to ~1e-14 regardless.
        warnings.simplefilter("ignore", IntegrationWarning)
        v1, _ = quad(cauchy_part, 0.0, b, weight="cauchy", wvar=1.0, epsabs=0.0, epsrel=1e-13, limit=200)
        v2, _ = quad(regular_part, b, math.inf, epsabs=0.0, epsrel=1e-13, limit=200)
    return v1 + v2


def median_sum(alpha: float, x: float, N: Optional[int] = None) -> Tuple[float, float]:
    """Median (principal value) Borel sum of B and its derivative.

    The series is summed exactly up to the optimal truncation index and the
    remainder is replaced by the principal-value Laplace integral of its
    late-order form. This is the real solution with no exponentially small
    Ai-type component, i.e. the ``k = 0`` member of the family, which is what
    ``k`` is measured against. Plain optimal truncation leaves an ambiguity of
    roughly half of Ai(x) times alpha, large enough to shift pole phases by
    tenths of a radian.

    Parameters
    ----------
    alpha : float
    x : float
        Point of evaluation, x >= 5.
    N : int, optional
        Split between exact head and resummed tail; the result is insensitive
        to it near the optimal value.
    """
    x = float(x)
    alpha = float(alpha)
    if alpha == 0.0:
        return 0.0, 0.0
    if x < 5.0:
        raise ValueError("median_sum requires x >= 5")
    sign = 1.0 if alpha > 0 else -1.0
    alpha = abs(alpha)
    d, a = _late_order_fit(alpha)
    hi = len(a) - 1
    n = np.arange(hi + 1)
    terms = a * x ** (-3.0 * n)
    if N is None:
        N = int(np.argmin(np.abs(terms[1:])) + 1)
    head = float(np.sum(terms[:N]))
    dhead = float(np.sum(-3.0 * n[:N] * terms[:N])) / x
    tail = 0.0
    dtail_dt = 0.0
    if math.sin(math.pi * alpha) != 0.0:
        t = (2.0 / 3.0) * x ** 1.5
        scale = math.exp(-t)
        for j, dj in enumerate(d):
            p = 2.0 * N - 0.5 - j
            i0 = _pv_laplace(t, p)
            i1 = _pv_laplace(t, p + 1.0)
            tail += dj * t ** (0.5 - j) * i0
            dtail_dt += dj * ((0.5 - j) * t ** (-0.5 - j) * i0 - t ** (0.5 - j) * i1)
        tail *= scale
        dtail_dt *= scale
    s = head + tail
    u = alpha / x * s
    up = -u / x + alpha / x * (dhead + dtail_dt * math.sqrt(x))
    return sign * u, sign * up


def decaying_mode(alpha: float, x: float, x_far: float = 40.0) -> Tuple[float, float]:
    """Decaying solution E of the equation linearised about the k = 0 solution.

    E solves ``E'' = (x + 6 U0^2) E`` with ``E / Ai -> 1`` as x -> infinity.
    Writing ``E = Ai g`` the log-derivative ``w = g'/g`` obeys a Riccati
    equation that is stable when integrated toward smaller x.
    Asymptotically ``E ~ Ai (1 + 2 alpha^2 x^(-3/2))``.
    """
    x = float(x)
    alpha = float(alpha)
    ai, aip = airy_ai(x)
    if alpha == 0.0:
        return ai, aip

    def u0(y: float) -> float:
        return eval_B(alpha, y).u

    def rhs(y: float, state: np.ndarray) -> List[float]:
        w = state[0]
        a, ap = airy_ai(y)
        uu = u0(y)
        return [6.0 * uu * uu - w * w - 2.0 * (ap / a) * w, w]

    u_far = u0(x_far)
    w_far = -3.0 * u_far * u_far / math.sqrt(x_far)
    tail_far = -2.0 * alpha * alpha * x_far ** -1.5
    sol = solve_ivp(rhs, (x_far, x), [w_far, 0.0], method="DOP853", rtol=1e-10, atol=1e-13)
    w_x = float(sol.y[0, -1])
    # state[1] accumulates int_{x_far}^{y} w, so int_x^inf w = -state[1] + tail.
    integral = -float(sol.y[1, -1]) + tail_far
    g = math.exp(-integral)
    e = ai * g
    return e, e * (aip / ai + w_x)


def resummed_initial_data(params: SolutionParams, x0: float) -> Tuple[float, float]:
    """``(u, u')`` at x0 from the median sum plus k times the decaying mode."""
    u0, up0 = median_sum(params.alpha, x0)
    e, ep = decaying_mode(params.alpha, x0)
    return u0 + params.k * e, up0 + params.k * ep


# ---------------------------------------------------------------------------
# Negative axis
# ---------------------------------------------------------------------------


def phase(params: SolutionParams, x: float) -> float:
    """Phi(x) = (2/3)(-x)^(3/2) + (3/4) d^2 ln(-x) + phi."""
    if x >= 0:
        raise ValueError("phase is defined for x < 0")
    return params.phase(x)


def eval_negative_asymptote(params: SolutionParams, x: float, delta_phase: float = 1e-3) -> float:
    """Singular negative-axis asymptote ``sqrt(-x) / sin(Phi(x))``.

    Intended for x <= -5, where the relative error is O((-x)^(-3/2)).

    Raises
    ------
    NearPole
        If Phi(x) lies within ``delta_phase`` of a multiple of pi.
    """
    ph = phase(params, x)
    dist = abs(math.remainder(ph, math.pi))
    if dist < delta_phase:
        raise NearPole(f"Phi({x}) = {ph} is within {dist:.3g} of a multiple of pi")
    return math.sqrt(-x) / math.sin(ph)


def predict_poles(params: SolutionParams, x_lo: float, x_hi: float) -> List[float]:
    """Solutions of Phi(x) = n pi in [x_lo, x_hi], ordered from x_hi toward x_lo.

    Phi is monotone in y = -x except, when d^2 < 0, for a single turning point
    at ``y* = (-(3/4) d^2)^(2/3)``. The window is split there, each root is
    bracketed on a monotone piece and polished by Newton's method.
    """
    if not x_lo < x_hi < 0:
        raise ValueError("need x_lo < x_hi < 0")
    y_lo, y_hi = -x_hi, -x_lo
    cuts = [y_lo, y_hi]
    if params.d_squared < 0:
        y_star = (-0.75 * params.d_squared) ** (2.0 / 3.0)
        if y_lo < y_star < y_hi:
            cuts = [y_lo, y_star, y_hi]
    f = lambda y: params.phase(-y)
    df = lambda y: math.sqrt(y) + 0.75 * params.d_squared / y
    roots: List[float] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        fa, fb = f(a), f(b)
        lo_ph, hi_ph = min(fa, fb), max(fa, fb)
        for n in range(math.ceil(lo_ph / math.pi), math.floor(hi_ph / math.pi) + 1):
            target = n * math.pi
            g = lambda y: f(y) - target
            if g(a) == 0.0:
                y = a
            elif g(b) == 0.0:
                y = b
            else:
                y = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            for _ in range(3):
                slope = df(y)
                if slope == 0.0:
                    break
                y -= g(y) / slope
            y = min(max(y, a), b)
            roots.append(-y)
    roots = sorted(set(roots), reverse=True)
    return roots
