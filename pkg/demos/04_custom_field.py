"""Bring your own field.

Any autonomous field written with + - * / ^, sin, cos and exp can be
parsed, differentiated symbolically and checked by the invariant suites.
"""

import numpy as np

from jetgeo import geometry as G
from jetgeo import parse_field, partial
from jetgeo.verify import run_suites

text = """
# a damped oscillator coupled to a third coordinate
X1 = x2
X2 = -w^2*x1 - c*x2 + sin(x3)
X3 = exp(-x1^2) - x3
"""
field = parse_field(text, {"w": 2.0, "c": 0.3})

print("dX2/dx1 =", partial(field, 2, 1))
print("dX3/dx1 =", partial(field, 3, 1))

report = G.geometry_report(field, np.array([0.5, -1.0, 0.2]))
print("\nGeometry report:")
print(report.to_json(indent=1))

print("\nInvariant suites:")
for result in run_suites(field, seed=3):
    print(" ", result.line())
