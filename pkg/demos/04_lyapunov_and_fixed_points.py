"""Lyapunov exponents of matrix cocycles and circle fixed points.

A unit-determinant matrix acts on directions; its random products have
finite-time growth rates along a vector and in operator norm.  Through
the half-angle chart a 2x2 matrix also induces a circle map whose
non-expansive fixed points mark the attracting directions.
"""

import numpy as np

from rdslab import (
    DrivingMeasure,
    ProjectiveAction,
    SeededStream,
    lyapunov_1d,
    lyapunov_projective,
    nonexpansive_fixed_points,
    simulate,
)

print("== deterministic diagonal cocycle: exact rate log 2 ==")
diag = DrivingMeasure(atoms=((ProjectiveAction([[2.0, 0.0], [0.0, 0.5]]), 1.0),))
v, w = lyapunov_projective(diag, [1.0, 0.0], 100, SeededStream(0).generator())
print(f"  vector rate = {v:.12f}   norm rate = {w:.12f}   log 2 = {np.log(2):.12f}")

print("\n== random mix of a hyperbolic map and a rotation ==")
th = 0.4
R = ProjectiveAction([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
H = ProjectiveAction([[1.5, 0.3], [0.2, (1.0 + 0.3 * 0.2) / 1.5]])  # det = 1
nu = DrivingMeasure(atoms=((H, 0.7), (R, 0.3)))
v, w = lyapunov_projective(nu, [1.0, 0.0], 5000, SeededStream(1).generator())
print(f"  vector rate = {v:.4f}   norm rate = {w:.4f}  (positive: hyperbolicity wins)")

print("\n== circle chart: chain-rule exponent along one realization ==")
C = ProjectiveAction([[4.0, 0.0], [0.0, 0.25]], chart="circle")
nuC = DrivingMeasure(atoms=((C, 1.0),))
traj = simulate(nuC, 0.3, 50, SeededStream(2), record_log_derivative=True)
print(f"  (1/n) log |G_n'(x)| = {lyapunov_1d(traj):.4f}"
      f"  (orbit falls into the attracting direction, multiplier 1/16 -> log 1/16 = {np.log(1/16):.4f})")

print("\n== non-expansive fixed points of the induced circle map ==")
pts = nonexpansive_fixed_points(nuC, 1, SeededStream(0).generator())
for theta, mult in pts:
    print(f"  fixed point theta={theta:.6f} with multiplier {mult:.6f}")
print("the expanding fixed point (multiplier 16) is filtered out by design")
