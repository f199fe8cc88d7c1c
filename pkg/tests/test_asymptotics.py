import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pii_lab import asymptotics as asy
from pii_lab.asymptotics import SolutionClass, make_params
from pii_lab.errors import NearPole, NotSingularRegime, TruncationDiverging
from pii_lab.pii_solver import integrate
from pii_lab.specfun import airy_ai, loggamma

from oracles import brute_force_coefficients, neg_pole_closed_form

singular_pairs = st.tuples(st.floats(-2.8, 2.8), st.floats(-4.0, 4.0)).filter(
    lambda p: p[1] ** 2 - math.cos(math.pi * p[0]) ** 2 > 1e-3)


# ---------------------------------------------------------------------------
# make_params
# ---------------------------------------------------------------------------


def test_params_alpha0_k_sqrt2():
    p = make_params(0.0, math.sqrt(2))
    assert abs(p.d_squared) < 1e-15
    assert abs(p.nu - (-0.5)) < 1e-15


def test_params_half_alpha_unit_k():
    p = make_params(0.5, 1.0)
    assert abs(p.d_squared) < 1e-15
    assert abs(p.phi - 3 * math.pi / 4) < 1e-14


def test_params_not_singular():
    with pytest.raises(NotSingularRegime):
        make_params(0.3, 0.5)


@settings(max_examples=200, deadline=None)
@given(singular_pairs)
def test_params_invariants(pair):
    alpha, k = pair
    p = make_params(alpha, k)
    assert p.s3 == pytest.approx(np.conj(p.s1), abs=1e-15)
    assert abs(p.s1 + p.s3 + 2 * math.sin(math.pi * alpha)) < 1e-14
    assert abs(p.nu.real + 0.5) < 1e-15
    assert abs(p.nu.imag - p.d_squared / 2) < 1e-15
    assert -math.pi < p.phi <= math.pi
    assert abs(p.d_squared - math.log(abs(p.s1) ** 2 - 1) / math.pi) < 1e-12 * max(1, abs(p.d_squared))


@settings(max_examples=200, deadline=None)
@given(singular_pairs)
def test_params_symmetry(pair):
    alpha, k = pair
    p, q = make_params(alpha, k), make_params(-alpha, -k)
    assert abs(p.d_squared - q.d_squared) < 1e-12
    gap = (p.phi - q.phi) % (2 * math.pi)
    assert abs(gap - math.pi) < 1e-12


# ---------------------------------------------------------------------------
# series
# ---------------------------------------------------------------------------


def test_first_coefficients():
    rng = np.random.default_rng(1)
    for alpha in rng.uniform(-3, 3, 20):
        c = asy.series_coefficients(alpha, 3).coeffs
        assert c[0] == 1.0
        assert abs(c[1] - (2 - 2 * alpha ** 2)) <= 4e-16 * max(1, abs(c[1]))
    assert asy.series_coefficients(0.0, 1).coeffs[1] == 2.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-3.0, 3.0), st.integers(0, 10))
def test_coefficients_match_brute_force_exactly(alpha, N):
    assert list(asy.series_coefficients(alpha, N).coeffs) == brute_force_coefficients(alpha, N)


def test_coefficient_order_bounds():
    with pytest.raises(ValueError):
        asy.series_coefficients(0.5, 31)
    assert asy.series_coefficients(0.5, 30).N == 30


def test_eval_B_examples():
    assert tuple(asy.eval_B(0.0, 7.3)) == (0.0, 0.0)
    assert asy.eval_B(1.0, 10.0, N=0).u == pytest.approx(0.1, abs=1e-17)


def test_eval_B_equation_residual():
    alpha, x, N = 0.7, 10.0, 5
    a = asy.series_coefficients(alpha, N).coeffs
    n = np.arange(N + 1)
    b = alpha * np.sum(np.array(a) * x ** (-3.0 * n - 1))
    b2 = alpha * np.sum(np.array(a) * (3 * n + 1) * (3 * n + 2) * x ** (-3.0 * n - 3))
    val = asy.eval_B(alpha, x, N=N)
    assert val.u == pytest.approx(b, rel=1e-15)
    residual = b2 - 2 * b ** 3 - x * b + alpha
    # the mismatch is led by the omitted term of alpha - x B, i.e. x times the
    # first omitted term of B: alpha a_{N+1} x^{-3N-3}
    a_next = asy.series_coefficients(alpha, N + 1).coeffs[-1]
    leading = alpha * a_next * x ** (-3.0 * N - 3)
    assert abs(residual) < 1.2 * x * val.error
    assert residual == pytest.approx(leading, rel=0.1)


def test_eval_B_derivative_matches_difference():
    alpha, x, h = 1.3, 6.0, 1e-5
    d = (asy.eval_B(alpha, x + h, N=3).u - asy.eval_B(alpha, x - h, N=3).u) / (2 * h)
    assert asy.eval_B(alpha, x, N=3).u_prime == pytest.approx(d, rel=1e-8)


def test_eval_B_truncation_diverging():
    alpha, x = 0.7, 2.5
    n_opt = asy.optimal_truncation(alpha, x)
    with pytest.raises(TruncationDiverging):
        asy.eval_B(alpha, x, N=n_opt + 3)


def test_optimal_truncation_grows_with_x():
    assert asy.optimal_truncation(0.7, 3.0) < asy.optimal_truncation(0.7, 6.0) <= asy.MAX_PUBLIC_N


# ---------------------------------------------------------------------------
# positive and negative asymptotes
# ---------------------------------------------------------------------------


def test_positive_asymptote_examples():
    assert asy.eval_positive_asymptote(make_params(0.0, 2.0), 8.0) == pytest.approx(2 * airy_ai(8.0)[0], rel=1e-15)
    p = make_params(1.0, 2.0)
    assert asy.eval_positive_asymptote(p, 9.0) - 2 * airy_ai(9.0)[0] == pytest.approx(asy.eval_B(1.0, 9.0).u, rel=1e-14)


def test_positive_asymptote_against_integration():
    p = make_params(0.5, 1.0)
    traj = integrate(p, 12.0, 6.0, 1e-12)
    x = 6.0
    bound = 5 * abs(p.k) * airy_ai(x)[0] * x ** -0.75
    assert traj.x[-1] == x
    assert abs(traj.u[-1] - asy.eval_positive_asymptote(p, x)) < bound


def test_negative_asymptote_at_midphase():
    p = make_params(0.0, math.sqrt(2))
    # Phi(x) = (2/3)(-x)^{3/2} + pi/2, so Phi = pi/2 + 2 pi at (-x)^{3/2} = 3 pi
    x = -(3 * math.pi) ** (2 / 3)
    assert asy.eval_negative_asymptote(p, x) == pytest.approx(math.sqrt(-x), rel=1e-12)


def test_negative_asymptote_near_pole():
    p = make_params(0.0, math.sqrt(2))
    with pytest.raises(NearPole):
        asy.eval_negative_asymptote(p, -((1.5 * math.pi) * 0.5) ** (2 / 3))


@settings(max_examples=100, deadline=None)
@given(singular_pairs, st.floats(-60.0, -5.0))
def test_negative_asymptote_symmetry(pair, x):
    alpha, k = pair
    p, q = make_params(alpha, k), make_params(-alpha, -k)
    try:
        a = asy.eval_negative_asymptote(p, x)
    except NearPole:
        return
    assert a == pytest.approx(-asy.eval_negative_asymptote(q, x), rel=1e-12)


# ---------------------------------------------------------------------------
# predicted poles
# ---------------------------------------------------------------------------


def test_predicted_poles_closed_form():
    p = make_params(0.0, math.sqrt(2))
    got = asy.predict_poles(p, -10.0, -1.0)
    expected = [neg_pole_closed_form(n) for n in range(1, 20) if -10.0 <= neg_pole_closed_form(n) <= -1.0]
    assert len(got) == len(expected) >= 3
    assert np.allclose(got, expected, rtol=0, atol=1e-11)
    assert got[1] == pytest.approx(-((9 * math.pi / 4) ** (2 / 3)), abs=1e-11)


@pytest.mark.parametrize("alpha,k", [(0.0, 3.0), (0.5, 2.0), (1.5, 1.5), (-0.5, -2.0), (0.0, 1.2)])
def test_predicted_poles_phase_gaps(alpha, k):
    p = make_params(alpha, k)
    xs = np.array(asy.predict_poles(p, -60.0, -5.0))
    assert np.all(np.diff(xs) < 0)
    ph = np.array([p.phase(x) for x in xs])
    assert np.allclose(np.diff(ph), math.pi, atol=1e-10)
    assert np.allclose(np.sin(ph), 0, atol=1e-11)
    mid = 0.5 * (xs[1:] + xs[:-1])
    ratio = -np.diff(xs) / (math.pi / np.sqrt(-mid))
    assert np.all((ratio[mid < -20] > 0.8) & (ratio[mid < -20] < 1.2))


@pytest.mark.parametrize("alpha,k", [(0.0, 3.0), (0.5, 2.0), (0.3, -1.7)])
def test_predicted_poles_alternative_phase_form(alpha, k):
    # 2t/3 + (ln(|s1|^2 - 1)/2pi) ln(8t) - arg Gamma(nu + 1) - arg s1 is a multiple of pi
    p = make_params(alpha, k)
    for x in asy.predict_poles(p, -40.0, -5.0):
        t = (-x) ** 1.5
        lhs = (2 * t / 3 + math.log(abs(p.s1) ** 2 - 1) / (2 * math.pi) * math.log(8 * t)
               - loggamma(p.nu + 1).imag - math.atan2(p.s1.imag, p.s1.real))
        r = math.remainder(lhs, math.pi)
        assert abs(r) < 1e-9


def test_predicted_poles_negative_d_squared_bruteforce():
    # 0 < k^2 - cos^2 < 1 gives d^2 < 0 and a phase that is not monotone everywhere
    p = make_params(0.0, 1.2)
    assert p.d_squared < 0
    got = asy.predict_poles(p, -30.0, -5.0)
    xs = np.linspace(-30.0, -5.0, 200001)
    s = np.sin(p.phase(xs))
    n_sign = int(np.sum(np.sign(s[1:]) != np.sign(s[:-1])))
    assert len(got) == n_sign


def test_predicted_poles_empty_window():
    p = make_params(0.0, 3.0)
    xs = asy.predict_poles(p, -30.0, -5.0)
    gap_lo, gap_hi = xs[3] + 1e-6, xs[2] - 1e-6
    assert asy.predict_poles(p, gap_lo, gap_hi) == []


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("alpha,k,expected", [
    (0.3, 0.1, SolutionClass.AS),
    (1.2, 2.0, SolutionClass.Singular),
    (1.5, 0.2, SolutionClass.Singular),
    (1.5, 0.0, SolutionClass.pHM),
    (0.0, 0.5, SolutionClass.AS),
    (0.0, 1.0, SolutionClass.pHM),
    (0.0, -1.0, SolutionClass.pHM),
    (0.25, -math.cos(0.25 * math.pi), SolutionClass.sHM),
    (0.25, math.cos(0.25 * math.pi), SolutionClass.pHM),
    (1.2, math.cos(1.2 * math.pi), SolutionClass.pHM),
    (1.2, -math.cos(1.2 * math.pi), SolutionClass.qHM),
    (1.2, 0.1, SolutionClass.qAS),
    (0.75, 0.1, SolutionClass.qAS),
    (0.5, 0.0, SolutionClass.pHM),
])
def test_classify_table(alpha, k, expected):
    assert asy.classify(alpha, k) == expected


def test_classify_requires_nonnegative_alpha():
    with pytest.raises(ValueError):
        asy.classify(-0.2, 1.0)


@settings(max_examples=300, deadline=None)
@given(st.floats(0.0, 3.0), st.floats(-5.0, 5.0))
def test_classify_singular_iff_constructible(alpha, k):
    cls = asy.classify(alpha, k)
    margin = k * k - math.cos(math.pi * alpha) ** 2
    if margin > 1e-9:
        assert cls == SolutionClass.Singular
        make_params(alpha, k)
    elif margin < -1e-9:
        assert cls != SolutionClass.Singular
