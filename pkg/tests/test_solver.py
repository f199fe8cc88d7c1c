import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from pii_lab import pii_solver as ps
from pii_lab.asymptotics import SolutionParams, make_params, predict_poles
from pii_lab.errors import AmbiguousResidue, PoleFitFailure
from pii_lab.specfun import airy_ai


def _rhs(alpha):
    return lambda x, y: [y[1], 2 * y[0] ** 3 + x * y[0] - alpha]


def _approach_window(params, n=12, u_lo=1e2, u_hi=1e6):
    """Samples on the right of the first pole below x = 0, from an independent tight solve."""
    y0 = ps.initial_conditions(params, 10.0)
    sol = solve_ivp(_rhs(params.alpha), (10.0, -5.0), y0, method="DOP853", rtol=1e-13, atol=1e-16,
                    dense_output=True, events=lambda x, y: abs(y[0]) - u_hi)
    x_stop = sol.t[-1]
    xs = np.linspace(x_stop + 0.02, x_stop, 4000)
    us = sol.sol(xs)
    sel = (np.abs(us[0]) >= u_lo) & (np.abs(us[0]) <= u_hi)
    idx = np.flatnonzero(sel)
    pick = idx[np.linspace(0, len(idx) - 1, n).astype(int)]
    return xs[pick], us[0][pick], us[1][pick]


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------


def test_initial_conditions_alpha0_is_pure_airy():
    p = make_params(0.0, 3.0)
    ai, aip = airy_ai(10.0)
    for method in ("truncated", "resummed"):
        u, up = ps.initial_conditions(p, 10.0, method=method)
        assert u == pytest.approx(3 * ai, rel=1e-14) and up == pytest.approx(3 * aip, rel=1e-14)


def test_initial_conditions_alpha1_no_tail():
    p = SolutionParams(1.0, 0.0, 0j, 0j, complex("nan"), float("nan"), float("nan"))
    u, _ = ps.initial_conditions(p, 10.0, method="truncated")
    # B(x; 1) = 1/x exactly: a_1 = 2 - 2 alpha^2 = 0 and every later a_n vanishes
    assert u == pytest.approx(0.1, rel=1e-15)


def test_initial_conditions_domain():
    with pytest.raises(ValueError):
        ps.initial_conditions(make_params(0.0, 3.0), 7.0)


def test_start_point_insensitivity_alpha0():
    p = make_params(0.0, 3.0)
    u10 = ps.integrate(p, 10.0, 0.0, 1e-12).u[-1]
    u12 = ps.integrate(p, 12.0, 0.0, 1e-12).u[-1]
    assert abs(u10 - u12) < 1e-8


# ---------------------------------------------------------------------------
# Laurent series and pole crossing
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("eps", [1, -1])
def test_laurent_coefficient_table(eps):
    x_p, h, alpha = -3.7, 0.42, 0.6
    b = ps.laurent_coefficients(x_p, eps, h, alpha, order=8)
    assert b[0] == eps
    assert b[1] == 0.0
    assert b[2] == pytest.approx(-eps * x_p / 6, rel=1e-15)
    assert b[3] == pytest.approx((alpha - eps) / 4, rel=1e-15)
    assert b[4] == h


def test_laurent_series_solves_equation():
    x_p, eps, h, alpha = -2.2, -1, 0.13, 1.5
    b = ps.laurent_coefficients(x_p, eps, h, alpha)
    z = np.linspace(-0.15, 0.15, 13)
    z = z[z != 0]
    u, _ = ps._laurent_eval(b, z)
    n = np.arange(len(b) - 1)
    upp = 2 * b[0] / z ** 3 + np.sum((b[1:] * n * (n - 1))[None, 2:] * z[:, None] ** (n[None, 2:] - 2), axis=1)
    res = upp - (2 * u ** 3 + (x_p + z) * u - alpha)
    # truncation at z^20 leaves a residual of order z^18 relative to 2u^3 ~ z^-3
    assert np.max(np.abs(res) / np.abs(2 * u ** 3)) < 1e-12


def test_cross_pole_first_negative_pole_of_alpha0_k3():
    p = make_params(0.0, 3.0)
    x, u, up = _approach_window(p)
    assert np.all(u > 0)  # u -> +infinity from the right
    rec, (xr, ur, upr) = ps.cross_pole((x, u, up), p)
    assert rec.epsilon == 1
    assert abs(rec.strength - 1) < 1e-6
    assert xr == pytest.approx(rec.x_p - rec.window)
    assert ur < 0  # past a +1 residue pole the solution comes back from -infinity


def test_cross_pole_jackknife():
    p = make_params(0.0, 3.0)
    x, u, up = _approach_window(p)
    full = ps.cross_pole((x, u, up), p)[0].x_p
    for drop in range(len(x)):
        keep = np.arange(len(x)) != drop
        assert abs(ps.cross_pole((x[keep], u[keep], up[keep]), p)[0].x_p - full) < 1e-8


def test_cross_pole_matches_independent_event_location():
    p = make_params(0.0, 3.0)
    x, u, up = _approach_window(p)
    rec = ps.cross_pole((x, u, up), p)[0]
    # at the last sample u ~ 1e6, so x_p = x - eps/u up to a relative O(z^2) correction
    assert abs(rec.x_p - (x[-1] - rec.epsilon / u[-1])) < 1e-10


def test_cross_pole_rejects_noise():
    p = make_params(0.0, 3.0)
    rng = np.random.default_rng(3)
    x = np.linspace(-0.60, -0.65, 10)
    u = 1e3 * (1 + rng.standard_normal(10))
    with pytest.raises((PoleFitFailure, AmbiguousResidue)):
        ps.cross_pole((x, np.abs(u), u), p)


def test_cross_pole_rejects_straddling_sign():
    p = make_params(0.0, 3.0)
    x, u, up = _approach_window(p)
    u = u.copy()
    u[::2] *= -1
    with pytest.raises(AmbiguousResidue):
        ps.cross_pole((x, u, up), p)


def test_cross_pole_needs_eight_samples():
    p = make_params(0.0, 3.0)
    x, u, up = _approach_window(p, n=7)
    with pytest.raises(PoleFitFailure):
        ps.cross_pole((x, u, up), p)


# ---------------------------------------------------------------------------
# full trajectories
# ---------------------------------------------------------------------------


def test_zero_solution_is_exact():
    p = SolutionParams(0.0, 0.0, 0j, 0j, complex("nan"), float("nan"), float("nan"))
    traj = ps.integrate(p, 10.0, -25.0)
    assert traj.poles == []
    assert np.all(traj.u == 0) and np.all(traj.u_prime == 0)
    assert ps.extract_observables(traj) == ([], [])


@pytest.fixture(scope="module")
def traj03(experiment):
    return experiment(0.0, 3.0).trajectory


def test_trajectory_ordering_and_windows(traj03):
    assert np.all(np.diff(traj03.x) < 0)
    for rec in traj03.poles:
        inside = np.abs(traj03.x - rec.x_p) < rec.window * (1 - 1e-12)
        assert not inside.any()
    poles, _ = ps.extract_observables(traj03)
    assert np.all(np.diff(poles) < 0)


def test_trajectory_pole_count_matches_prediction(traj03):
    # the asymptotic phase is meaningless next to x = 0, so count from x = -2
    p = traj03.params
    observed = [r.x_p for r in traj03.poles if -25.0 < r.x_p < -2.0]
    predicted = predict_poles(p, -25.0, -2.0)
    assert abs(len(observed) - len(predicted)) <= 1


def test_trajectory_residues_alternate_and_quantize(traj03):
    eps = [r.epsilon for r in traj03.poles]
    assert all(e * f == -1 for e, f in zip(eps, eps[1:]))
    assert all(abs(r.strength - r.epsilon) < 1e-6 for r in traj03.poles)
    assert all(r.fit_residual < 1e-6 for r in traj03.poles)


def test_trajectory_spacing_consistent_with_phase(traj03):
    xs = np.array([r.x_p for r in traj03.poles])
    mid = 0.5 * (xs[1:] + xs[:-1])
    ratio = -np.diff(xs) / (math.pi / np.sqrt(-mid))
    far = mid < -20
    assert far.sum() >= 3
    assert np.all((ratio[far] > 0.8) & (ratio[far] < 1.2))


def test_segments_reintegrate_backward(traj03):
    # near the poles the backward problem is ill-conditioned, so use the
    # regular stretch of each segment where |u| <= 5
    alpha = traj03.params.alpha
    tol = traj03.tol
    for seg in (3, 10, 20):
        idx = np.flatnonzero((traj03.segment_id == seg) & (np.abs(traj03.u) <= 5))
        i, j = idx[0], idx[-1]
        x, u, up = traj03.x, traj03.u, traj03.u_prime
        back = solve_ivp(_rhs(alpha), (x[j], x[i]), [u[j], up[j]], method="DOP853", rtol=1e-13, atol=1e-14)
        scale = max(1.0, abs(u[i]), abs(up[i]))
        assert abs(back.y[0, -1] - u[i]) < 100 * tol * scale
        assert abs(back.y[1, -1] - up[i]) < 100 * tol * scale


def test_envelope_deepest_midphase(traj03):
    _, env = ps.extract_observables(traj03)
    deep = [r for x, r in env if x < -20]
    assert deep and abs(deep[-1] - 1) < 0.05


def test_symmetric_parameters_mirror_trajectory(experiment):
    a = experiment(0.5, 2.0).trajectory
    b = experiment(-0.5, -2.0).trajectory
    assert len(a.poles) == len(b.poles)
    assert max(abs(p.x_p - q.x_p) for p, q in zip(a.poles, b.poles)) < 1e-8
    assert all(p.epsilon == -q.epsilon for p, q in zip(a.poles, b.poles))
    # pointwise u <-> -u on the shared smooth stretch before the first pole
    xs = np.linspace(9.0, 0.5, 30)
    ua = np.interp(xs, a.x[::-1], a.u[::-1])
    ub = np.interp(xs, b.x[::-1], b.u[::-1])
    assert np.allclose(ua, -ub, rtol=1e-9, atol=1e-12)


def test_tolerance_halving_before_first_crossing():
    p = make_params(0.0, 3.0)
    tol = 1e-10
    a = ps.integrate(p, 10.0, -3.0, tol)
    b = ps.integrate(p, 10.0, -3.0, tol / 2)
    assert abs(a.poles[0].x_p - b.poles[0].x_p) < 10 * tol


@pytest.mark.xfail(strict=True, reason="each crossing refits the free z^3 coefficient h from samples within "
                   "~0.1 of the pole, where h is fixed only to ~tol/d^4; later poles inherit that error")
def test_tolerance_halving_all_poles():
    p = make_params(0.0, 3.0)
    tol = 1e-10
    a = ps.integrate(p, 10.0, -25.0, tol)
    b = ps.integrate(p, 10.0, -25.0, tol / 2)
    assert max(abs(r.x_p - s.x_p) for r, s in zip(a.poles, b.poles)) < 10 * tol


def test_tolerance_halving_all_poles_practical():
    p = make_params(0.0, 3.0)
    a = ps.integrate(p, 10.0, -25.0, 1e-10)
    b = ps.integrate(p, 10.0, -25.0, 5e-11)
    assert len(a.poles) == len(b.poles)
    assert max(abs(r.x_p - s.x_p) for r, s in zip(a.poles, b.poles)) < 1e-5
