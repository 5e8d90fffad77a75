"""Geometry of the five-dimensional Lorenz field at a single point.

We parse the field, look at its Jacobian, and build the objects that come
out of it: the nonlinear connection, its torsion, the electromagnetic-like
matrix and the Yang-Mills energy. Then we check the generic results against
the hand-derived closed forms.
"""

import numpy as np

from jetgeo import geometry as G
from jetgeo import lorenz5 as L

np.set_printoptions(precision=4, suppress=True)

eps = 0.1
field = L.lorenz_field(eps)
x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])

print("Field text:")
print(field.to_text())
print("X(x) =", field(x))

J = G.jacobian(field, x)
print("\nJacobian at x:\n", J)

# The connection keeps only the antisymmetric half of J.
N = G.nonlinear_connection(field, x)
print("\nNonlinear connection N:\n", N)

# Torsion is the x-derivative of N. For this field it does not depend on x.
R = G.torsion(field, x)
print("\nNonzero torsion entries (k, i, j) -> value, 1-based:")
for k, i, j in zip(*np.nonzero(R)):
    print(f"  ({k + 1}, {i + 1}, {j + 1}) -> {R[k, i, j]:+.3f}")

F = G.em_matrix(field, x)
print("\nF = -N, Yang-Mills energy =", G.yang_mills_energy(field, x))
print("Maxwell residual           =", G.maxwell_residual(field, x))

# Cross-check the generic pipeline against the closed forms on random points.
P = np.random.default_rng(0).uniform(-5, 5, (1000, 5))
err = max(
    np.max(np.abs(G.nonlinear_connection(field, P) - L.closed_connection(P, eps))),
    np.max(np.abs(G.yang_mills_energy(field, P) - L.closed_eym(P, eps))),
)
print(f"\nGeneric vs closed form on 1000 random points: max error {err:.2e}")
