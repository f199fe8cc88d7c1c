"""
Where the singular family lives in the (alpha, k) plane
=======================================================

Solutions are labelled by their behaviour along the negative axis. The
singular family is the region |k| > |cos(pi alpha)|; its edge carries the
Hastings-McLeod type solutions. This demo draws the labels as a character map
and then solves a few singular cells up to their first pole.
"""

from pii_lab.harness import grid_scan

symbols = {"AS": ".", "qAS": ",", "Singular": "#", "pHM": "H", "sHM": "s", "qHM": "q"}

rows = grid_scan((0.0, 2.0), (-2.0, 2.0), (41, 21))
by_cell = {(r["alpha"], r["k"]): r["classification"] for r in rows}
alphas = sorted({r["alpha"] for r in rows})
ks = sorted({r["k"] for r in rows}, reverse=True)

print("k \\ alpha from 0 to 2")
for k in ks:
    print(f"{k:+5.1f} " + "".join(symbols[by_cell[(a, k)]] for a in alphas))
print("legend:", ", ".join(f"{s} {name}" for name, s in symbols.items()))

# Integrating each singular cell to its first pole shows the poles moving
# toward the origin as |k| grows.
for row in grid_scan((0.0, 0.0), (1.5, 4.0), (1, 6), solve=True):
    print(f"alpha = 0, k = {row['k']:.1f}: first pole at x = {row['first_pole']:.6f}")
