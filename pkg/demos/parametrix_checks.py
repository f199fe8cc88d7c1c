"""
Checking the model Riemann-Hilbert solutions
============================================

The Hankel matrix M(eta) and the parabolic-cylinder matrix Z(zeta) are
written down in closed form. Here we test that they really do have the jumps,
determinants and normalisations they are supposed to have.
"""

import cmath
import math

import numpy as np

from pii_lab import rh_parametrix as rp
from pii_lab.harness import DEFAULT_S3, run_parametrix_suite, stokes_nu

# A single evaluation first. With alpha = 0 and s3 = 0, M collapses to
# diag(e^{i eta}, e^{-i eta}).
eta = 2.0 * cmath.exp(0.4j)
print(np.round(rp.model_M(0.0, 0.0, eta), 12))

# alpha = 1.5 is the interesting case: the Hankel orders are integers and a
# logarithm appears at the origin.
s3 = DEFAULT_S3[0]
jumps = rp.verify_M_jumps(1.5, s3, (0.3, 1.0, 3.0, 10.0))
print(f"{len(jumps.samples)} ray samples, worst jump residual {jumps.max_residual:.2e}")
print("log model preferred at the origin:", rp.log_detection(1.5, s3)["log_preferred"])

# The parabolic-cylinder side uses the nu implied by the Stokes data.
nu = stokes_nu(1.5, s3)
print(f"nu = {nu:.6f}")
zeta = 25 * cmath.exp(1j * math.pi / 8)
gap = np.max(np.abs(rp.z_normalized(nu, zeta) - rp.z_large_expansion(nu, zeta)))
print(f"Z at |zeta| = 25 differs from its expansion by {gap:.2e} (allowed {10 / 25 ** 4:.1e})")

# Finally the whole default suite, one line per check.
for rep in run_parametrix_suite():
    print(f"{'PASS' if rep.passed else 'FAIL'}  {rep.contour_id:45s} {rep.max_residual:.2e}")
