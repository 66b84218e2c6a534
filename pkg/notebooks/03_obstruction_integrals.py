"""
The Xi and Bott integrals
=========================

Xi = (G1 - G2) ^ j1 ^ j2 has coefficient nu / sin(nu theta) in every gauge.
After pulling back, the sin factors cancel and Gauss-Legendre quadrature
integrates it to 8 pi^3 / nu^2.  In the gauge t1 = sin(nu theta/2),
t2 = 1/sin(nu theta/2) the Bott representative is (nu/2) w1^w2^w3, with
integral 8 pi^2 / nu^2.
"""

import numpy as np

from coframe import run_verification, s3_frame
from coframe.obstruction import QuadratureGrid, bott_class, bott_target, xi_target
from coframe.poisson import build_poisson_pair, constant_gauge, paper_gauge

for nu in (0.5, 1.0, 2.0):
    r = run_verification(s3_frame(nu), stages=["xi", "bott", "volume"])
    print(f"nu={nu}: xi={r.xi_integral:.10f} ({xi_target(nu):.10f})  "
          f"bott={r.bott_integral:.10f} ({bott_target(nu):.10f})")

# Per-term values: term 1 and term 3 vanish, term 4 is the Xi integral.
spec = s3_frame(1.0)
pair = build_poisson_pair(spec)
b = bott_class(pair, *paper_gauge(spec), spec)
print("t1 = sin(nu theta/2) terms", np.round(b.term_integrals, 9))

# Other gauges give other integrals; the difference is all in term 2.
c = bott_class(pair, *constant_gauge(1.0, 0.0), spec)
print("constant gauge (1, 0):", c.integral, "terms", np.round(c.term_integrals, 9))

# Convergence in the number of nodes per axis.
for n in (4, 8, 16, 32):
    v = bott_class(pair, *paper_gauge(spec), spec, QuadratureGrid.gauss_legendre(spec, n)).integral
    print(n, v, abs(v - bott_target(1.0)) / bott_target(1.0))
