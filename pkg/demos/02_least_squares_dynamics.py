"""Least-squares dynamics: solutions of x' = X(x) minimize the action.

We integrate the Lorenz field, watch its two quadratic first integrals,
then compare the action of the true trajectory with a slightly bent one.
Finally the second-order Euler-Lagrange flow, started on the first-order
jet, reproduces the same curve.
"""

import numpy as np

from jetgeo import dynamics as D
from jetgeo import lorenz5 as L

eps = 0.05
field = L.lorenz_field(eps)
x0 = np.array([1.0, 1.0, 1.0, 0.1, 0.1])

traj = D.integrate_field(field, x0, 0.0, 10.0, 1e-3)
print(f"Integrated {len(traj)} samples up to t = {traj.ts[-1]}")

I = L.first_integrals(traj.xs)
print("First-integral drift:", np.abs(I - I[0]).max(axis=0))

half = D.Trajectory(0.0, 1e-3, traj.xs[:5001])
print(f"\nAction of the solution on [0, 5]:     {D.action(field, half):.3e}")

bent = half.xs.copy()
bent[2500, 0] += 0.1
print(f"Action after nudging one sample by 0.1: {D.action(field, D.Trajectory(0.0, 1e-3, bent)):.3e}")

# A jet that starts off the first-order flow costs action and drifts away.
el = D.integrate_el(field, x0, field(x0), 0.0, 5.0, 1e-3)
print(f"\nEuler-Lagrange flow from v0 = X(x0): max |x_EL - x| = {np.max(np.abs(el.xs - half.xs)):.2e}")
kicked = D.integrate_el(field, x0, field(x0) + [0.5, 0, 0, 0, 0], 0.0, 5.0, 1e-3)
print(f"Euler-Lagrange flow with a kicked v0: action = {D.action(field, kicked):.3e}")
