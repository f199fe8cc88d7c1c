"""
Poles of a singular solution against the connection formula
============================================================

Start from the Airy-like tail at x = 10 and integrate toward minus infinity,
stepping over every pole with a Laurent fit. The observed poles are then
compared with the zeros of sin(Phi(x)), where Phi carries the constants d^2
and phi computed from (alpha, k).
"""

from pii_lab.asymptotics import make_params, predict_poles
from pii_lab.harness import RunConfig, phase_error, run_connection_experiment

alpha, k = 0.0, 3.0
params = make_params(alpha, k)
print(f"alpha = {alpha}, k = {k}: d^2 = {params.d_squared:.6f}, phi = {params.phi:.6f}")

# One end-to-end run. The report keeps the trajectory in memory as well.
report = run_connection_experiment(RunConfig(alpha=alpha, k=k))
traj = report.trajectory
print(f"{len(traj.poles)} poles crossed, stop reason: {traj.stop_reason}")

# Residues come out as +-1 to many digits, alternating in sign.
for rec in traj.poles[:5]:
    print(f"  x_p = {rec.x_p:+.10f}  eps = {rec.epsilon:+d}  |c_-1 - eps| = {abs(rec.strength - rec.epsilon):.1e}")

# Far out, each observed pole sits close to a predicted one, and the phase
# error shrinks roughly like (-x)^(-3/2).
print("\n   predicted     observed   phase error")
for pred, obs in report.pairs[-8:]:
    print(f"  {pred:10.5f}  {obs:10.5f}   {phase_error(params, obs):+.4f}")

# Between poles the solution follows sqrt(-x)/sin(Phi); the ratio is close to 1.
ratios = [r for x, r in report.envelope_ratios if x < -20]
print(f"\nenvelope ratio for x < -20: min {min(ratios):.4f}, max {max(ratios):.4f}")

print("\nverdict:", ", ".join(f"{name}={'ok' if ok else 'FAIL'}" for name, ok in report.verdict.items()))

# The formula alone gives a good guess of where the next poles lie.
print("next predicted poles:", [round(x, 4) for x in predict_poles(params, -33.0, -30.0)])
