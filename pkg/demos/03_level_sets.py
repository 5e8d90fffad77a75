"""Level sets of the Yang-Mills energy of the Lorenz field.

The energy is at least 1. It equals 1 on a line and is a circular cylinder
for larger values. The coordinates x2 and x4 never enter.
"""

import numpy as np

from jetgeo import lorenz5 as L

eps = 1.0
for C in (0.5, 1.0, 2.0, 5.0):
    print(f"C = {C}:", L.classify_level_set(C, eps).to_dict())

print("\nRotation to canonical axes, eps = 1:\n", L.rotation_matrix(eps))

cyl = L.classify_level_set(5.0, eps)
rng = np.random.default_rng(1)
pts = cyl.sample(rng.uniform(-3, 3, 5), rng.uniform(0, 2 * np.pi, 5))
x = np.zeros((5, 5))
x[:, [0, 2, 4]] = pts
x[:, [1, 3]] = rng.uniform(-10, 10, (5, 2))   # free coordinates, anything goes
print("\nEnergy at five random points on the C = 5 cylinder:", L.closed_eym(x, eps))
