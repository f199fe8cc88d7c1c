import cmath
import math

import numpy as np
import pytest

from pii_lab import rh_parametrix as rp
from pii_lab.errors import BranchViolation, OnContour, OriginSingularity, OutOfSector

from oracles import z_closed_form_mp

S3_VALUES = (-0.7 + 2j, 1 - 1.5j)


# ---------------------------------------------------------------------------
# M
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("eta", [0.7, 3.0 * cmath.exp(0.3j), 15.0 * cmath.exp(-0.4j), 0.05])
def test_m_reduces_to_exponential(eta):
    m = rp.model_M(0.0, 0.0, eta)
    expected = np.diag([cmath.exp(1j * eta), cmath.exp(-1j * eta)])
    assert np.max(np.abs(m - expected)) < 1e-12 * max(1.0, np.max(np.abs(expected)))


def test_m_determinant_example():
    eta = 1.3 * cmath.exp(-1j * math.pi / 3)
    m = rp.model_M(0.75, -math.sin(0.75 * math.pi) + 2j, eta)
    assert abs(np.linalg.det(m) - 1) < 1e-9


@pytest.mark.parametrize("alpha", [0.25, 0.5, 1.5, 2.5])
@pytest.mark.parametrize("theta", [0.0, 1.2, -2.8, -1.0, 2.0])
def test_m_large_eta_normalisation(alpha, theta):
    eta = 40 * cmath.exp(1j * theta)
    m = rp.model_M(alpha, S3_VALUES[0], eta)
    dev = m @ np.diag([cmath.exp(-1j * eta), cmath.exp(1j * eta)]) - np.eye(2)
    assert np.max(np.abs(dev)) < 5 / abs(eta)


def test_m_sector_labels():
    assert rp.m_sector(0.0) == 1
    assert rp.m_sector(math.pi / 2) == 2
    assert rp.m_sector(-math.pi) == 3
    with pytest.raises(OnContour):
        rp.m_sector(math.pi / 6)
    assert rp.m_sector(-math.pi / 2) == 4


def test_m_errors():
    with pytest.raises(OriginSingularity):
        rp.model_M(0.5, 1j, 0.0)
    with pytest.raises(OnContour):
        rp.model_M(0.5, 1j, cmath.exp(1j * math.pi / 6))
    with pytest.raises(ValueError):
        rp.model_M(-0.5, 1j, 1.0)


def test_derived_s1_reality_relation():
    s3 = 0.3 - 0.8j
    assert rp.derived_s1(0.25, s3) + s3 == pytest.approx(-2 * math.sin(0.25 * math.pi))


def test_jumps_trivial_case():
    rep = rp.verify_M_jumps(0.0, 0.0, (0.3, 1.0, 3.0))
    assert rep.max_residual < 1e-12 and rep.passed
    # forming M_-^{-1} M_+ costs |M| |M^{-1}| ~ e^{|eta|} ulps on the rays
    far = rp.verify_M_jumps(0.0, 0.0, (10.0,))
    assert far.max_residual < 10 * math.exp(10.0) * np.finfo(float).eps


def test_jumps_half_alpha():
    rep = rp.verify_M_jumps(0.5, -1 + 2j, (1.0,))
    assert rep.max_residual < 1e-8


def test_jumps_integer_orders():
    rep = rp.verify_M_jumps(1.5, S3_VALUES[0], (0.3, 1.0, 3.0, 10.0))
    assert rep.max_residual < 1e-8


def test_jump_radii_domain():
    with pytest.raises(ValueError):
        rp.verify_M_jumps(0.5, 1j, (0.05,))
    with pytest.raises(ValueError):
        rp.verify_M_jumps(0.5, 1j, (31.0,))


def test_report_structure():
    rep = rp.verify_M_jumps(0.25, S3_VALUES[1], (1.0, 3.0))
    assert len(rep.samples) == 8
    assert rep.max_residual == max(r for _, r in rep.samples)
    assert rep.passed == (rep.max_residual < rep.tolerance_used)


@pytest.mark.parametrize("alpha", [0.0, 0.75, 2.5])
def test_m_determinant_everywhere(alpha):
    for s3 in S3_VALUES:
        assert rp.verify_M_det(alpha, s3).max_residual < 1e-9


def test_m_infinity_slope():
    rep = rp.verify_M_infinity(0.75, S3_VALUES[0])
    assert rep.passed
    slopes = rep.detail["slopes"]
    assert all(abs(s + 1) < 0.2 for s in slopes.values())


def test_origin_alpha_zero():
    rep = rp.verify_M_origin(0.0, S3_VALUES[0])
    assert rep.passed
    assert all(abs(s) < 0.1 for s in rep.detail["slopes"].values())


def test_origin_alpha_three_quarters_sector_two():
    rep = rp.verify_M_origin(0.75, S3_VALUES[0])
    assert rep.passed
    slopes = rep.detail["slopes"]
    assert slopes[(2, 0)] == pytest.approx(-0.75, abs=0.1)
    assert slopes[(2, 1)] == pytest.approx(0.75, abs=0.1)
    assert not rep.detail["log_preferred"]


@pytest.mark.parametrize("alpha,expect_log", [(0.5, True), (1.5, True), (2.5, True),
                                              (0.25, False), (0.75, False), (1.0, False)])
def test_origin_log_detection(alpha, expect_log):
    out = rp.log_detection(alpha, S3_VALUES[1])
    assert out["log_preferred"] is expect_log


def test_regularized_m_matches_direct_product():
    alpha, s3 = 0.75, S3_VALUES[0]
    for eta in (0.5 * cmath.exp(1.0j), 0.5 * cmath.exp(-1.2j)):
        direct = rp.model_M(alpha, s3, eta)
        sector = rp.m_sector(cmath.phase(eta))
        reg = rp.regularized_M(alpha, s3, eta)
        # the regulariser is unimodular, so determinants agree
        assert abs(np.linalg.det(reg) - np.linalg.det(direct)) < 1e-10
        assert sector in (2, 4)


# ---------------------------------------------------------------------------
# Z
# ---------------------------------------------------------------------------


def test_h1_vanishes_at_nu_zero():
    h0, h1 = rp.stokes_h(0.0)
    assert h1 == 0
    assert np.array_equal(rp.z_jumps(0.0)[1], np.eye(2))


@pytest.mark.parametrize("nu", [-0.5 + 0.33j, 0.3 + 0.2j, -0.5 - 0.4j])
def test_stokes_structure(nu):
    H = rp.z_jumps(nu)
    for h in H:
        assert abs(np.linalg.det(h) - 1) < 1e-14
    assert np.max(np.abs(H[0] @ H[1] - H[1] @ H[0])) > 1e-3


@pytest.mark.parametrize("nu", [-0.5 + 0.33j, -0.5 + 0.1j, 0.3 + 0.2j])
@pytest.mark.parametrize("k", range(5))
def test_z_pieces_against_mpmath(nu, k):
    for zeta in (cmath.rect(2.5, 0.3 + k), cmath.rect(6.0, -0.2 + 1.3 * k), cmath.rect(0.4, 2.0 * k)):
        ref = z_closed_form_mp(k, nu, zeta)
        assert np.max(np.abs(rp.z_piece(k, nu, zeta) - ref)) <= 1e-9 * np.max(np.abs(ref))


@pytest.mark.parametrize("k", range(1, 5))
def test_z_pieces_against_literal_products(k):
    nu = -0.5 + 0.33j
    for zeta in (cmath.rect(1.0, 0.7 * k), cmath.rect(2.0, 1.1 * k)):
        a, b = rp.z_piece(k, nu, zeta), rp.z_piece_product(k, nu, zeta)
        assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(b))


def test_z_crossing_at_quarter_turn():
    nu = -0.5 + 0.33j
    H1 = rp.z_jumps(nu)[1]
    for r in (1.0, 3.0):
        above = rp.model_Z(nu, cmath.rect(r, math.pi / 2 + 1e-12))
        below = rp.model_Z(nu, cmath.rect(r, math.pi / 2 - 1e-12))
        assert np.max(np.abs(np.linalg.solve(below, above) - H1)) < 1e-8


@pytest.mark.parametrize("nu", [-0.5 + 0.33j, -0.5 + 0.1j, 0.3 + 0.2j, 0j])
def test_z_verifications(nu):
    assert rp.verify_Z_crossings(nu).max_residual < 1e-8
    assert rp.verify_Z_det(nu).max_residual < 1e-8
    large = rp.verify_Z_large(nu)
    assert large.tolerance_used == pytest.approx(10 / 25 ** 4)
    assert large.passed


def test_z_large_example_point():
    nu = -0.5 + 0.33j
    zeta = 25 * cmath.exp(1j * math.pi / 8)
    diff = rp.z_normalized(nu, zeta) - rp.z_large_expansion(nu, zeta)
    assert np.max(np.abs(diff)) < 10 / 25 ** 4


def test_z_out_of_sector():
    with pytest.raises(OutOfSector):
        rp.model_Z(0.1j, cmath.exp(-1j * math.pi / 4))
    with pytest.raises(OutOfSector):
        rp.model_Z(0.1j, 0.0)


# ---------------------------------------------------------------------------
# conformal maps
# ---------------------------------------------------------------------------


def test_eta_neg_origin():
    assert rp.eta_neg(0) == 0
    h = 1e-6
    assert (rp.eta_neg(h) - rp.eta_neg(-h)) / (2 * h) == pytest.approx(1, abs=1e-10)


def test_eta_pos_example():
    assert rp.eta_pos(0.5j) == pytest.approx(-1j / 3, abs=1e-15)


def test_zeta_plus_local_slope():
    c = cmath.exp(0.75j * math.pi) * 2 * math.sqrt(2)
    assert abs(rp.zeta_plus(0.5 + 1e-4) / 1e-4 - c) < 1e-2


def test_zeta_plus_defining_relation():
    theta = lambda z: 1j * (4 / 3 * z ** 3 - z)
    for z in (0.5 + 0.2j, 0.3 - 0.1j, 0.8 + 0.05j):
        assert rp.zeta_plus(z) ** 2 / 4 == pytest.approx(theta(0.5) - theta(z), abs=1e-14)


def test_zeta_plus_branch_violation():
    with pytest.raises(BranchViolation):
        rp.zeta_plus(1.2)
