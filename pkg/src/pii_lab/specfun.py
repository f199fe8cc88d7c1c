"""Special functions needed by the Painleve II connection problem.

Everything here is implemented directly (series, asymptotic expansions,
quadrature and Taylor stepping of the defining ODEs) so that accuracy claims
can be checked against independent oracles such as mpmath.

Functions
---------
gamma_complex, loggamma, rgamma
    Complex gamma function, its principal logarithm and its reciprocal.
airy_ai
    Ai(x) and Ai'(x) for real x.
bessel_j, bessel_y, hankel, hankel_prime
    Bessel functions of real order and complex argument.
parabolic_cylinder_d, parabolic_cylinder_d_prime
    Weber parabolic cylinder function D_nu(z) for complex nu and z.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import ConvergenceFailure, OriginSingularity, OutOfSector, PoleOfGamma

__all__ = [
    "FunctionEvalResult",
    "gamma_complex",
    "loggamma",
    "rgamma",
    "airy_ai",
    "bessel_j",
    "bessel_y",
    "hankel",
    "hankel_prime",
    "parabolic_cylinder_d",
    "parabolic_cylinder_d_prime",
]

EPS = np.finfo(float).eps
EULER_GAMMA = 0.57721566490153286061
HANKEL_SWITCH = 12.0
AIRY_SWITCH = 8.0
PCF_SERIES_RADIUS = 4.0
PCF_ASYMPTOTIC_RADIUS = 8.0
# Rounding in the series combination, in ulps of its largest partial term;
# 3x the worst ratio seen against 30-digit references for |z| <= 4, |nu| <= 5.
_PCF_SERIES_ULPS = 32.0
# Second inward start, used when the expansion at the asymptotic radius is
# too coarse for large |nu|.
_PCF_FAR_START = 12.0

METHODS = ("series", "asymptotic", "recurrence", "reflection", "quadrature", "ode")


@dataclass(frozen=True)
class FunctionEvalResult:
    """Value of a special function together with provenance.

    Attributes
    ----------
    value : complex
        Function value.
    est_error : float
        Estimated upper bound on the absolute error of ``value``.
    method : str
        Branch of the algorithm that produced the value.
    """

    value: complex
    est_error: float
    method: str

    def __complex__(self) -> complex:
        return complex(self.value)


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# B_{2k} / (2k (2k-1)) for the Stirling series of log Gamma.
_STIRLING_COEF = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
)


def _nonpositive_integer(z: complex, tol: float = 1e-14) -> bool:
    return z.real < 0.5 and abs(z.imag) <= tol and abs(z.real - round(z.real)) <= tol


def _sinpi(z: complex) -> complex:
    # sin(pi z) with the integer part removed exactly before scaling by pi
    n = round(z.real)
    s = cmath.sin(math.pi * (z - n))
    return -s if n % 2 else s


def _lanczos(z: complex) -> complex:
    # Valid for Re z >= 1/2.
    z = z - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * cmath.exp((z + 0.5) * cmath.log(t) - t) * acc


def gamma_complex(z: complex) -> FunctionEvalResult:
    """Gamma function of a complex argument.

    Lanczos approximation (g = 7) for |z| <= 5, the exponential of the
    Stirling log-gamma beyond, and the reflection formula for Re z < 1/2.

    Parameters
    ----------
    z : complex
        Argument, not a nonpositive integer.

    Returns
    -------
    FunctionEvalResult
        ``method`` is ``"series"`` for the direct branch and ``"reflection"``
        otherwise.

    Raises
    ------
    PoleOfGamma
        If ``z`` lies within 1e-14 of 0, -1, -2, ...
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleOfGamma(f"Gamma has a pole at z = {z}")
    w = z if z.real >= 0.5 else 1.0 - z
    if abs(w) <= 5.0:
        g = _lanczos(w)
        growth = abs((w - 0.5) * cmath.log(w + _LANCZOS_G - 0.5))
    else:
        # exp of the Stirling log-gamma: the Lanczos exponent is not reduced
        # and loses ~|z log z| ulps in its phase for large |z|
        lg = loggamma(w)
        g = cmath.exp(lg)
        growth = abs(lg.imag) + abs(lg.real)
    if z.real >= 0.5:
        value, method = g, "series"
    else:
        value, method = math.pi / (_sinpi(z) * g), "reflection"
        growth += abs(math.pi * z.imag)
    # calibrated against 50-digit references on |z| <= 50
    est = abs(value) * EPS * (320.0 + 0.25 * growth)
    return FunctionEvalResult(value, est, method)


def loggamma(z: complex) -> complex:
    """Principal branch of log Gamma(z).

    The imaginary part is the continuous argument of Gamma on the right half
    plane, which is what the connection formulas need. Computed by upward
    recurrence to |z| >= 15 followed by the Stirling series.
    """
    z = complex(z)
    if _nonpositive_integer(z):
        raise PoleOfGamma(f"log Gamma has a pole at z = {z}")
    shift = 0.0 + 0.0j
    while abs(z) < 15.0 or z.real < 0.0 and abs(z.imag) < 15.0:
        shift += cmath.log(z)
        z += 1.0
    inv = 1.0 / z
    inv2 = inv * inv
    series = 0.0 + 0.0j
    power = inv
    for c in _STIRLING_COEF:
        series += c * power
        power *= inv2
    return (z - 0.5) * cmath.log(z) - z + 0.5 * math.log(2.0 * math.pi) + series - shift


def rgamma(z: complex) -> complex:
    """Reciprocal gamma function, entire, equal to zero at the poles of Gamma."""
    z = complex(z)
    if z.real < 0.5:
        # reflection keeps full relative accuracy right up to the poles
        return gamma_complex(1.0 - z).value * _sinpi(z) / math.pi
    return 1.0 / gamma_complex(z).value


# ---------------------------------------------------------------------------
# Taylor stepping for y'' = q(s) y with quadratic q
# ---------------------------------------------------------------------------


def _taylor_step(q: Tuple[complex, complex, complex], y: complex, yp: complex, h: complex,
                 max_terms: int = 200) -> Tuple[complex, complex]:
    """Advance y'' = (q0 + q1 s + q2 s^2) y by a step h from s = 0."""
    q0, q1, q2 = q
    c = [y, yp]
    val = y + yp * h
    der = yp
    hp = h
    small = 0
    for n in range(0, max_terms):
        cn2 = q0 * c[n]
        if n >= 1:
            cn2 += q1 * c[n - 1]
        if n >= 2:
            cn2 += q2 * c[n - 2]
        cn2 /= (n + 2) * (n + 1)
        c.append(cn2)
        der += (n + 2) * cn2 * hp
        hp *= h
        term = cn2 * hp
        val += term
        if abs(term) <= 1e-18 * (abs(val) + abs(der * h)):
            small += 1
            if small >= 3:
                return val, der
        else:
            small = 0
    raise ConvergenceFailure("Taylor step did not converge")


# ---------------------------------------------------------------------------
# Airy
# ---------------------------------------------------------------------------

_AI0 = 0.355028053887817239260
_AIP0 = -0.258819403792806798405


def _airy_maclaurin(x: float) -> Tuple[float, float, float]:
    x3 = x * x * x
    f, fp = 1.0, 0.0
    g, gp = x, 1.0
    tf, tg = 1.0, x
    df, dg = x * x / 2.0, 1.0
    fp = df
    scale = 1.0 + abs(x)
    k = 1
    while True:
        tf *= x3 / ((3 * k - 1) * (3 * k))
        tg *= x3 / ((3 * k) * (3 * k + 1))
        dg *= x3 / ((3 * k) * (3 * k - 2))
        if k >= 2:
            df *= x3 / ((3 * k - 1) * (3 * k - 3))
            fp += df
        f += tf
        g += tg
        gp += dg
        scale += abs(tf) + abs(tg)
        if abs(tf) + abs(tg) + abs(df) + abs(dg) < 1e-18 * (abs(f) + abs(g) + abs(fp) + abs(gp)):
            break
        k += 1
        if k > 500:
            raise ConvergenceFailure("Airy Maclaurin series")
    ai = _AI0 * f + _AIP0 * g
    aip = _AI0 * fp + _AIP0 * gp
    return ai, aip, scale * EPS


def _bessel_k_trapezoid(nu: float, w: float) -> float:
    # K_nu(w) = int_0^inf exp(-w cosh t) cosh(nu t) dt; the integrand is
    # analytic in a strip, so the trapezoid rule converges geometrically.
    h = 0.125
    tmax = math.acosh(1.0 + 45.0 / w)
    t = np.arange(0.0, tmax + h, h)
    f = np.exp(-w * (np.cosh(t) - 1.0)) * np.cosh(nu * t)
    return float(h * (f.sum() - 0.5 * f[0])) * math.exp(-w)


def _airy_k(x: float) -> Tuple[float, float]:
    zeta = 2.0 / 3.0 * x ** 1.5
    ai = math.sqrt(x / 3.0) / math.pi * _bessel_k_trapezoid(1.0 / 3.0, zeta)
    aip = -x / (math.pi * math.sqrt(3.0)) * _bessel_k_trapezoid(2.0 / 3.0, zeta)
    return ai, aip


def _airy_uk(kmax: int = 40) -> Tuple[np.ndarray, np.ndarray]:
    u = np.empty(kmax)
    v = np.empty(kmax)
    u[0] = 1.0
    v[0] = 1.0
    for k in range(1, kmax):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1))
        v[k] = -u[k] * (6 * k + 1) / (6 * k - 1)
    return u, v


_AIRY_U, _AIRY_V = _airy_uk()


def _truncated(coeffs: np.ndarray, zinv: complex) -> Tuple[complex, float]:
    """Sum an asymptotic series sum c_k zinv^k up to its smallest term."""
    total = 0.0 + 0.0j
    power = 1.0 + 0.0j
    last = math.inf
    for c in coeffs:
        term = c * power
        if abs(term) > last:
            break
        total += term
        last = abs(term)
        power *= zinv
    return total, last


def _airy_positive_asymptotic(x: float) -> Tuple[float, float, float]:
    zeta = 2.0 / 3.0 * x ** 1.5
    alt = np.array([(-1) ** k for k in range(len(_AIRY_U))], dtype=float)
    s_ai, err_ai = _truncated(_AIRY_U * alt, 1.0 / zeta)
    s_aip, _ = _truncated(_AIRY_V * alt, 1.0 / zeta)
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * x ** -0.25 * s_ai.real
    aip = -pref * x ** 0.25 * s_aip.real
    return ai, aip, abs(ai) * err_ai


def _airy_negative_asymptotic(x: float) -> Tuple[float, float, float]:
    z = -x
    zeta = 2.0 / 3.0 * z ** 1.5
    inv = 1.0 / zeta
    n = len(_AIRY_U)
    sign = np.array([(-1) ** (k // 2) for k in range(n)], dtype=float)
    # Split even and odd terms of the alternating-in-pairs series.
    even_u = np.where(np.arange(n) % 2 == 0, _AIRY_U * sign, 0.0)
    odd_u = np.where(np.arange(n) % 2 == 1, _AIRY_U * sign, 0.0)
    even_v = np.where(np.arange(n) % 2 == 0, _AIRY_V * sign, 0.0)
    odd_v = np.where(np.arange(n) % 2 == 1, _AIRY_V * sign, 0.0)
    # Truncate all four at the same index where |u_k| zeta^-k is smallest.
    mags = np.abs(_AIRY_U) * inv ** np.arange(n)
    kstop = int(np.argmin(mags[1:]) + 1)
    powers = inv ** np.arange(kstop)
    p_u = float(np.dot(even_u[:kstop], powers))
    q_u = float(np.dot(odd_u[:kstop], powers))
    p_v = float(np.dot(even_v[:kstop], powers))
    q_v = float(np.dot(odd_v[:kstop], powers))
    chi = zeta + math.pi / 4.0
    s, c = math.sin(chi), math.cos(chi)
    amp = 1.0 / math.sqrt(math.pi)
    ai = amp * z ** -0.25 * (s * p_u - c * q_u)
    aip = -amp * z ** 0.25 * (c * p_v + s * q_v)
    return ai, aip, amp * z ** -0.25 * float(mags[kstop])


def airy_ai(x: float) -> Tuple[float, float]:
    """Airy function Ai(x) and its derivative for real x.

    Branches: Maclaurin series on [-5, 2], the Macdonald-function integral on
    (2, 8), the exponential asymptotic expansion for x >= 8, Taylor
    stepping of Ai'' = x Ai from x = -5 on [-8, -5), and the oscillatory
    asymptotic expansion for x < -8.

    Parameters
    ----------
    x : float
        Real argument with |x| <= 100.

    Returns
    -------
    tuple of float
        ``(Ai(x), Ai'(x))``.
    """
    return airy_ai_result(x)[:2]


def airy_ai_result(x: float) -> Tuple[float, float, float, str]:
    """Like :func:`airy_ai` but also returns an error estimate and the branch."""
    x = float(x)
    if -5.0 <= x <= 2.0:
        ai, aip, err = _airy_maclaurin(x)
        return ai, aip, err, "series"
    if 2.0 < x < AIRY_SWITCH:
        ai, aip = _airy_k(x)
        return ai, aip, 4 * EPS * abs(ai), "quadrature"
    if x >= AIRY_SWITCH:
        ai, aip, err = _airy_positive_asymptotic(x)
        return ai, aip, err, "asymptotic"
    if x >= -AIRY_SWITCH:
        ai, aip, err = _airy_maclaurin(-5.0)
        s = -5.0
        y, yp = complex(ai), complex(aip)
        while s > x:
            h = max(x - s, -0.5)
            y, yp = _taylor_step((s, 1.0, 0.0), y, yp, h)
            s += h
        return y.real, yp.real, err * 4, "ode"
    ai, aip, err = _airy_negative_asymptotic(x)
    return ai, aip, err, "asymptotic"


# ---------------------------------------------------------------------------
# Bessel and Hankel functions
# ---------------------------------------------------------------------------


def _power(z: complex, p: float) -> complex:
    return cmath.exp(p * cmath.log(z))


def _j_series(nu: float, z: complex) -> Tuple[complex, float]:
    """Ascending series for J_nu(z); returns value and sum of |terms|."""
    q = -0.25 * z * z
    term = _power(0.5 * z, nu) * rgamma(nu + 1.0)
    if term == 0:
        # 1/Gamma(nu+1) = 0: start at the first nonzero term.
        k0 = int(round(-nu))
        term = _power(0.5 * z, nu) * q ** k0 / (math.factorial(k0) * gamma_complex(nu + k0 + 1.0).value)
    else:
        k0 = 0
    total = term
    absum = abs(term)
    k = k0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        absum += abs(term)
        if k > abs(z) and abs(term) < 1e-18 * absum:
            return total, absum
        if k > 400:
            raise ConvergenceFailure("Bessel J series")


def _y_integer_series(n: int, z: complex) -> Tuple[complex, float]:
    half = 0.5 * z
    q = 0.25 * z * z
    jn, jabs = _j_series(float(n), z)
    first = 0.0 + 0.0j
    if n > 0:
        term = math.factorial(n - 1) + 0.0j
        first = term
        for k in range(1, n):
            term *= q / (k * (n - k))
            first += term
        first *= half ** (-n)
    harm_k = 0.0
    harm_nk = sum(1.0 / j for j in range(1, n + 1))
    term = half ** n / math.factorial(n)
    third = term * (harm_k + harm_nk - 2.0 * EULER_GAMMA)
    absum = abs(third)
    k = 0
    while True:
        k += 1
        term *= -q / (k * (n + k))
        harm_k += 1.0 / k
        harm_nk += 1.0 / (n + k)
        piece = term * (harm_k + harm_nk - 2.0 * EULER_GAMMA)
        third += piece
        absum += abs(piece)
        if k > abs(z) and abs(piece) < 1e-18 * absum:
            break
        if k > 400:
            raise ConvergenceFailure("Bessel Y series")
    value = -first / math.pi + 2.0 / math.pi * cmath.log(half) * jn - third / math.pi
    return value, absum / math.pi + abs(first) / math.pi + jabs * abs(cmath.log(half))


def _jy_series(nu: float, z: complex) -> Tuple[complex, complex, float]:
    """J_nu and Y_nu for nu >= 0 by ascending series, with an error scale."""
    n = int(round(nu))
    if abs(nu - n) < 1e-6:
        if abs(nu - n) == 0.0:
            jv, jabs = _j_series(float(n), z)
            yv, yabs = _y_integer_series(n, z)
            return jv, yv, EPS * (jabs + yabs)
        # Within 1e-6 of an integer the reflection formula cancels badly; use
        # the limit value plus a first order correction in the order.
        d = nu - n
        h = 1e-3
        jv, jabs = _j_series(nu, z)
        yv0, yabs = _y_integer_series(n, z)
        slope = (_jy_series(n + h, z)[1] - _jy_series(n - h, z)[1]) / (2.0 * h)
        return jv, yv0 + d * slope, EPS * (jabs + yabs) + abs(d) * abs(slope) * h * h
    jv, jabs = _j_series(nu, z)
    jm, jmabs = _j_series(-nu, z)
    s = math.sin(nu * math.pi)
    yv = (jv * math.cos(nu * math.pi) - jm) / s
    return jv, yv, EPS * (jabs + jmabs) / abs(s)


def bessel_j(nu: float, z: complex) -> complex:
    """Bessel J of real order nu at complex z (principal branch)."""
    z = complex(z)
    if abs(z) <= HANKEL_SWITCH:
        return _j_series(nu, z)[0]
    return 0.5 * (hankel(1, nu, z).value + hankel(2, nu, z).value)


def bessel_y(nu: float, z: complex) -> complex:
    """Bessel Y of real order nu at complex z (principal branch)."""
    z = complex(z)
    if z == 0:
        raise OriginSingularity("Bessel Y is singular at z = 0")
    return (hankel(1, nu, z).value - hankel(2, nu, z).value) / 2j


def _hankel_asymptotic(kind: int, nu: float, z: complex) -> Tuple[complex, float]:
    sgn = 1 if kind == 1 else -1
    mu2 = 4.0 * nu * nu
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    last = 1.0
    for k in range(1, 80):
        term = term * (mu2 - (2 * k - 1) ** 2) / (8.0 * k) * (sgn * 1j) / z
        if abs(term) > last and k > 2:
            break
        total += term
        last = abs(term)
        if last < 1e-17:
            break
    pref = cmath.sqrt(2.0 / (math.pi * z)) * cmath.exp(sgn * 1j * (z - 0.5 * nu * math.pi - 0.25 * math.pi))
    return pref * total, abs(pref) * (last + 4 * EPS)


@lru_cache(maxsize=64)
def _laguerre_rule(a: float, n: int = 48) -> Tuple[np.ndarray, np.ndarray]:
    u, w = roots_genlaguerre(n, a)
    return u, w


def _hankel1_laplace(nu: float, z: complex) -> Tuple[complex, float]:
    # H1_nu(z) = sqrt(2/(pi z)) exp(i(z - nu pi/2 - pi/4)) / Gamma(nu + 1/2)
    #            * int_0^inf exp(-u) u^(nu-1/2) (1 + i u/(2z))^(nu-1/2) du,
    # valid for nu > -1/2 and -pi/2 < arg z < 3 pi/2.
    a = nu - 0.5
    u, w = _laguerre_rule(round(a, 15))
    f = np.exp(a * np.log(1.0 + 1j * u / (2.0 * z)))
    integral = complex(np.dot(w, f))
    pref = cmath.sqrt(2.0 / (math.pi * z)) * cmath.exp(1j * (z - 0.5 * nu * math.pi - 0.25 * math.pi))
    value = pref * integral * rgamma(nu + 0.5)
    return value, 1e-14 * abs(value)


def _hankel_principal(kind: int, nu: float, z: complex) -> FunctionEvalResult:
    """H^(kind)_nu(z) for nu >= 0 and -pi < arg z <= pi."""
    r = abs(z)
    if r > HANKEL_SWITCH:
        v, e = _hankel_asymptotic(kind, nu, z)
        return FunctionEvalResult(v, e, "asymptotic")
    recessive = (kind == 1 and z.imag >= 1.0) or (kind == 2 and z.imag <= -1.0)
    if recessive and r >= 1.5:
        if kind == 1:
            v, e = _hankel1_laplace(nu, z)
        else:
            v, e = _hankel1_laplace(nu, z.conjugate())
            v = v.conjugate()
        return FunctionEvalResult(v, e, "quadrature")
    jv, yv, err = _jy_series(nu, z)
    v = jv + 1j * yv if kind == 1 else jv - 1j * yv
    return FunctionEvalResult(v, 2 * err, "series")


def hankel(kind: int, nu: float, z: complex, arg: float | None = None) -> FunctionEvalResult:
    """Hankel function H^(1)_nu or H^(2)_nu of real order at complex argument.

    Parameters
    ----------
    kind : {1, 2}
        Which Hankel function.
    nu : float
        Real order.
    z : complex
        Argument. Only ``abs(z)`` is used when ``arg`` is given.
    arg : float, optional
        Phase of the argument on the Riemann surface of the logarithm. Must
        lie in (-pi, 2*pi) for kind 1 and in (-2*pi, pi) for kind 2. Defaults
        to the principal phase of ``z``.

    Returns
    -------
    FunctionEvalResult

    Raises
    ------
    OriginSingularity
        If ``z == 0``.
    OutOfSector
        If ``arg`` falls outside the continuation range of the chosen kind.

    Notes
    -----
    On the principal sheet the value comes from the ascending J/Y series for
    |z| <= 12 (with the logarithmic limit for integer order), from the Hankel
    asymptotic expansion for |z| > 12, and from Gauss-Laguerre quadrature of
    the Laplace-type integral where the requested function is exponentially
    recessive and the series would cancel. Other sheets use

    ``J(z e^{m pi i}) = e^{m nu pi i} J(z)``,
    ``Y(z e^{m pi i}) = e^{-m nu pi i} Y(z) + 2i sin(m nu pi) cot(nu pi) J(z)``.
    """
    if kind not in (1, 2):
        raise ValueError("kind must be 1 or 2")
    z = complex(z)
    r = abs(z)
    if r == 0.0:
        raise OriginSingularity("Hankel functions are singular at z = 0")
    theta = cmath.phase(z) if arg is None else float(arg)
    lo, hi = (-math.pi, 2 * math.pi) if kind == 1 else (-2 * math.pi, math.pi)
    if not (lo < theta < hi) and not (arg is None):
        raise OutOfSector(f"arg z = {theta} outside ({lo}, {hi}) for kind {kind}")
    # Negative order: H1_{-mu} = e^{i mu pi} H1_mu, H2_{-mu} = e^{-i mu pi} H2_mu.
    mu = abs(nu)
    order_factor = 1.0 + 0.0j
    if nu < 0:
        order_factor = cmath.exp((1j if kind == 1 else -1j) * mu * math.pi)
    if -math.pi < theta <= math.pi:
        native = (-0.5 * math.pi < theta < 1.5 * math.pi) if kind == 1 else (-1.5 * math.pi < theta < 0.5 * math.pi)
        if r <= HANKEL_SWITCH or native:
            res = _hankel_principal(kind, mu, cmath.rect(r, theta))
            return FunctionEvalResult(order_factor * res.value, res.est_error, res.method)
    # Continue from z' = z e^{-m pi i}, where the large-argument expansions of
    # both kinds are uniformly valid.
    m = 1 if theta > 0 else -1
    value, err = _hankel_continued(kind, mu, r, theta - m * math.pi, m)
    return FunctionEvalResult(order_factor * value, err, "reflection")


def _hankel_continued(kind: int, mu: float, r: float, theta0: float, m: int) -> Tuple[complex, float]:
    zp = cmath.rect(r, theta0)
    h1 = _hankel_principal(1, mu, zp)
    h2 = _hankel_principal(2, mu, zp)
    jv = 0.5 * (h1.value + h2.value)
    yv = (h1.value - h2.value) / 2j
    n = int(round(mu))
    d = mu - n
    parity = -1.0 if (m * n) % 2 else 1.0
    cot_factor = parity * (m if d == 0.0 else math.sin(m * d * math.pi) / math.tan(d * math.pi))
    jr = cmath.exp(1j * m * mu * math.pi) * jv
    yr = cmath.exp(-1j * m * mu * math.pi) * yv + 2j * cot_factor * jv
    value = jr + 1j * yr if kind == 1 else jr - 1j * yr
    err = (h1.est_error + h2.est_error) * (2.0 + 2.0 * abs(cot_factor))
    return value, err


def hankel_prime(kind: int, nu: float, z: complex, arg: float | None = None) -> complex:
    """Derivative of the Hankel function from H'_nu = H_{nu-1} - (nu/z) H_nu."""
    z = complex(z)
    theta = cmath.phase(z) if arg is None else float(arg)
    zz = cmath.rect(abs(z), theta)
    return hankel(kind, nu - 1.0, z, arg).value - nu / zz * hankel(kind, nu, z, arg).value


# ---------------------------------------------------------------------------
# Parabolic cylinder functions
# ---------------------------------------------------------------------------


def _kummer_m(a: complex, b: float, x: complex) -> Tuple[complex, float]:
    """M(a, b, x) and the largest magnitude met among its terms and partial sums."""
    total = 1.0 + 0.0j
    term = 1.0 + 0.0j
    absum = 1.0
    peak = 1.0
    k = 0
    while True:
        term *= (a + k) * x / ((b + k) * (k + 1))
        k += 1
        total += term
        absum += abs(term)
        peak = max(peak, abs(term), abs(total))
        if abs(term) < 1e-18 * absum and k > abs(x):
            return total, peak
        if k > 2000:
            raise ConvergenceFailure("Kummer series did not converge")


def _pcf_series(nu: complex, z: complex) -> Tuple[complex, float]:
    a = -nu - 0.5
    A1 = 0.5 * a + 0.25
    A2 = 0.5 * a + 0.75
    x = 0.5 * z * z
    if x.real >= 0:
        m1, s1 = _kummer_m(A1, 0.5, x)
        m2, s2 = _kummer_m(A2, 1.5, x)
        e = cmath.exp(-0.25 * z * z)
        u1, u1abs = e * m1, abs(e) * s1
        u2, u2abs = z * e * m2, abs(z * e) * s2
    else:
        # Kummer transformation keeps the series argument in Re >= 0.
        m1, s1 = _kummer_m(0.5 - A1, 0.5, -x)
        m2, s2 = _kummer_m(1.5 - A2, 1.5, -x)
        e = cmath.exp(0.25 * z * z)
        u1, u1abs = e * m1, abs(e) * s1
        u2, u2abs = z * e * m2, abs(z * e) * s2
    sp = math.sqrt(math.pi)
    c1 = 2.0 ** (0.5 * nu) * sp * rgamma(0.5 - 0.5 * nu)
    c2 = -(2.0 ** (0.5 * (nu + 1.0))) * sp * rgamma(-0.5 * nu)
    value = c1 * u1 + c2 * u2
    err = _PCF_SERIES_ULPS * EPS * (abs(c1) * u1abs + abs(c2) * u2abs)
    return value, err


def _pcf_asymptotic(nu: complex, z: complex) -> Tuple[complex, float]:
    inv = 1.0 / (2.0 * z * z)
    s1 = 1.0 + 0.0j
    term = 1.0 + 0.0j
    last = 1.0
    for s in range(1, 200):
        term *= -(-nu + 2 * s - 2) * (-nu + 2 * s - 1) / s * inv
        if abs(term) > last:
            break
        s1 += term
        last = abs(term)
        if last < 1e-17:
            break
    log_z = cmath.log(z)
    # Rounding in the exponential grows with the size of its argument, and
    # the smallest term understates the tail near |z| = 8; both calibrated
    # against 40-digit references for |nu| <= 5.
    expo = nu * log_z - 0.25 * z * z
    first = cmath.exp(expo) * s1
    err = abs(first) * (20.0 * last + 2.0 * EPS * (1.0 + abs(nu * log_z) + abs(0.25 * z * z)))
    theta = cmath.phase(z)
    if abs(theta) <= 0.5 * math.pi:
        return first, err
    s2 = 1.0 + 0.0j
    term = 1.0 + 0.0j
    last2 = 1.0
    for s in range(1, 200):
        term *= (nu + 2 * s - 1) * (nu + 2 * s) / s * inv
        if abs(term) > last2:
            break
        s2 += term
        last2 = abs(term)
        if last2 < 1e-17:
            break
    phase = cmath.exp((1j if theta > 0 else -1j) * math.pi * nu)
    expo2 = 0.25 * z * z - (nu + 1.0) * log_z
    second = -math.sqrt(2.0 * math.pi) * rgamma(-nu) * phase * cmath.exp(expo2) * s2
    err2 = abs(second) * (20.0 * last2 + 2.0 * EPS * (1.0 + abs(expo2) + math.pi * abs(nu)))
    return first + second, err + err2


def _pcf_direct(nu: complex, z: complex) -> Tuple[complex, float, str]:
    r = abs(z)
    if r <= PCF_SERIES_RADIUS:
        v, e = _pcf_series(nu, z)
        return v, e, "series"
    if r >= PCF_ASYMPTOTIC_RADIUS:
        v, e = _pcf_asymptotic(nu, z)
        return v, e, "asymptotic"
    raise AssertionError("middle band handled by _pcf_ode")


def _is_nonneg_integer(nu: complex) -> bool:
    return abs(nu.imag) < 1e-12 and nu.real > -0.5 and abs(nu.real - round(nu.real)) < 1e-12


def _pcf_recessive(nu: complex, z: complex) -> bool:
    theta = abs(cmath.phase(z))
    return theta < 0.25 * math.pi or (_is_nonneg_integer(nu) and theta > 0.75 * math.pi)


def _pcf_ode(nu: complex, z: complex, r0: float) -> Tuple[complex, float]:
    """Taylor-step Weber's equation along the ray through z, starting at |z| = r0.

    Starts at or beyond the asymptotic radius use the large-argument
    expansion, nearer ones the series.
    """
    direction = cmath.exp(1j * cmath.phase(z))
    z0 = r0 * direction
    branch = _pcf_asymptotic if r0 >= PCF_ASYMPTOTIC_RADIUS else _pcf_series
    d0, e0 = branch(nu, z0)
    d1, e1 = branch(nu + 1.0, z0)
    y = d0
    yp = 0.5 * z0 * d0 - d1
    # Start errors are carried to z by the propagator of Weber's equation,
    # stepped alongside the solution; this counts any growth along the ray.
    p = [1.0 + 0.0j, 0.0j, 0.0j, 1.0 + 0.0j]
    s = r0
    target = abs(z)
    nsteps = max(1, int(math.ceil(abs(target - s) / 0.25)))
    h = (target - s) / nsteps
    for _ in range(nsteps):
        zc = s * direction
        q = (0.25 * zc * zc - nu - 0.5, 0.5 * zc, 0.25 + 0.0j)
        y, yp = _taylor_step(q, y, yp, h * direction)
        p[0], p[2] = _taylor_step(q, p[0], p[2], h * direction)
        p[1], p[3] = _taylor_step(q, p[1], p[3], h * direction)
        s += h
    start_err = abs(p[0]) * e0 + abs(p[1]) * (0.5 * r0 * e0 + e1)
    err = start_err + 1e-14 * nsteps * abs(y)
    return y, err


def parabolic_cylinder_d(nu: complex, z: complex) -> FunctionEvalResult:
    """Weber parabolic cylinder function D_nu(z).

    Parameters
    ----------
    nu : complex
        Order, |nu| <= 5.
    z : complex
        Argument, |z| <= 30.

    Returns
    -------
    FunctionEvalResult

    Notes
    -----
    For |z| <= 4 the value is the combination of the even and odd
    confluent-hypergeometric solutions with the exact values of D_nu and
    D_nu' at the origin. For |z| >= 8 the large-argument expansion is used,
    including the Stokes term for |arg z| > pi/2. In between, Weber's equation
    ``y'' = (z^2/4 - nu - 1/2) y`` is integrated by Taylor steps along the ray
    through z, inward from |z| = 8 where D_nu is recessive and outward from
    |z| = 4 otherwise, so the stepping is always numerically stable.
    """
    nu = complex(nu)
    z = complex(z)
    r = abs(z)
    if r <= PCF_SERIES_RADIUS or r >= PCF_ASYMPTOTIC_RADIUS:
        v, e, method = _pcf_direct(nu, z)
    else:
        start = PCF_ASYMPTOTIC_RADIUS if _pcf_recessive(nu, z) else PCF_SERIES_RADIUS
        v, e = _pcf_ode(nu, z, start)
        method = "ode"
    if 1.0 < r <= 10.0 and not e <= 1e-12 * abs(v):
        # Cancellation or growth spoiled the first route; try the others,
        # including a further inward start for large |nu|, and keep the one
        # with the smallest estimate.
        routes = [r0 for r0 in (PCF_SERIES_RADIUS, PCF_ASYMPTOTIC_RADIUS, _PCF_FAR_START)
                  if r0 > r or (r0 < r and method != "series")]
        if method == "ode":
            routes.remove(start)
        for r0 in routes:
            v2, e2 = _pcf_ode(nu, z, r0)
            if np.isfinite(v2) and e2 * abs(v) < e * abs(v2):
                v, e, method = v2, e2, "ode"
    if not np.isfinite(v):
        raise ConvergenceFailure(f"D_nu(z) not finite at nu={nu}, z={z}")
    # Near a zero of D_nu the relative budget is meaningless; require both
    # a relative and an absolute excess before failing.
    if r <= 10.0 and e > 1e-9 * abs(v) and e > 1e-13:
        raise ConvergenceFailure(f"D_nu(z) error estimate {e:.3g} exceeds budget at nu={nu}, z={z}")
    return FunctionEvalResult(v, e, method)


def parabolic_cylinder_d_prime(nu: complex, z: complex) -> complex:
    """Derivative from the recurrence D_nu'(z) = (z/2) D_nu(z) - D_{nu+1}(z)."""
    z = complex(z)
    return 0.5 * z * parabolic_cylinder_d(nu, z).value - parabolic_cylinder_d(complex(nu) + 1.0, z).value
