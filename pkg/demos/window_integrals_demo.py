"""
Distance density of a square window
===================================

"""

# Double integrals over a window reduce to one-dimensional integrals against
# the density of the distance between two uniform points. The same density
# gives the constant c1 in the long-range variance formula.
import numpy as np
from scipy import integrate

from strongweak.window import WindowSpec, c1_coefficient, distance_density, double_integral

unit = WindowSpec(0.5)
mean, _ = integrate.quad(lambda s: s * distance_density(unit, s), 0, unit.diameter, points=[1.0])
print("mean distance in the unit square:", mean)

for kappa, alpha in [(1, 1.0), (2, 0.2), (2, 0.4)]:
    print(f"c1(kappa={kappa}, alpha={alpha}) on [-1,1]^2:", c1_coefficient(WindowSpec(1.0), kappa, alpha))

# %%
# The integral of a short-range covariance over Delta(r)^2 grows like r^2.
for r in (10, 20, 40):
    val = double_integral(WindowSpec(r), lambda s: (1 + s * s) ** -1.25)
    print(f"r={r:3d}  integral / r^2 = {val / r ** 2:.4f}")
