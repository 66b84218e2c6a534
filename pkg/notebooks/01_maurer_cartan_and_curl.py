"""
The Maurer-Cartan coframe on S^3 and its curl eigenforms
=========================================================

The left-invariant coframe w1, w2, w3 on the sphere of radius 2/nu obeys
dw^k = -nu w^(k+1) ^ w^(k+2).  Applying the Hodge star turns this into an
eigenvalue statement for the curl operator *d.
"""

import numpy as np

from coframe import (ChartPoint, coframe_at, curl, eigenvalue_check, embed, exterior_d,
                     frame_at, omega, one_form, s3_frame)
from coframe.chart import structure_equation_residual

nu = 1.5
spec = s3_frame(nu)

# A point of the chart and its image in R^4.  The radius is 2/nu.
p = ChartPoint(phi=0.4, theta=0.9, psi=2.0)
x = embed(p, nu)
print("embedded point", x, "radius", np.linalg.norm(x), "expected", 2 / nu)

# Coframe and frame matrices are inverse to each other.
c, f = coframe_at(p, spec), frame_at(p, spec)
print("|C F - I| =", np.abs(c @ f - np.eye(3)).max())
print("det C =", np.linalg.det(c), " -sin(nu theta) =", -np.sin(nu * p.theta))

# Structure equations, once from the structure constants and once by
# differentiating the coframe matrix in coordinates.
for k in (1, 2, 3):
    print(f"d w{k} coefficients:", [cf.const for cf in exterior_d(omega(k), spec).coeffs])
print("coordinate-route residual", structure_equation_residual(spec))

# *d w3 = -nu w3, and every constant combination shares the eigenvalue.
print("curl w3 =", [cf.const for cf in curl(omega(3), spec).coeffs])
for coeffs in [(0, 0, 1), (1, 1, 0), (0.3, -2.0, 0.7)]:
    print(coeffs, "->", eigenvalue_check(one_form(*coeffs), spec))
