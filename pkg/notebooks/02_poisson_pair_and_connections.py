"""
Poisson one-forms and their connection forms
============================================

J1 = d(nu (phi + psi)/2) and J2 = d(nu (phi - psi)/2) are exact, hence
Poisson and compatible.  Their unit sections are still Poisson, each with a
connection Gamma solving d j = Gamma ^ j, but the pair is no longer
compatible.
"""

import numpy as np

from coframe import (build_poisson_pair, compatibility_check, exterior_d, jacobi_check,
                     max_abs, s3_frame, solve_connection, wedge)
from coframe.obstruction import gauge_connections
from coframe.poisson import paper_gauge
from coframe.sampling import random_trig_field

spec = s3_frame(1.0)
grid = spec.standard_grid()
pair = build_poisson_pair(spec)

print("Jacobi residuals (J1, J2, j1, j2):",
      [jacobi_check(J, spec, grid) for J in (pair.J1, pair.J2, pair.j1_hat, pair.j2_hat)])
print("compatibility of J1, J2      :", compatibility_check(pair.J1, pair.J2, spec, grid))
print("compatibility of unit sections:", compatibility_check(pair.j1_hat, pair.j2_hat, spec, grid))

# The connection is fixed only up to multiples of j: pin the w3 coefficient.
t1, t2 = paper_gauge(spec)
g1 = solve_connection(pair.j1_hat, t1, spec, points=grid)
g2 = solve_connection(pair.j2_hat, t2, spec, points=grid)
print("connection residuals", g1.residual, g2.residual)

# Changing the pinned value moves Gamma along j and nothing else.
rng = np.random.default_rng(0)
other = solve_connection(pair.j1_hat, random_trig_field(rng, spec), spec, points=grid)
print("|(G - G') ^ j1| =", max_abs(wedge(g1.gamma - other.gamma, pair.j1_hat), grid))

# The gauge values enter as pointwise parameters.  Frozen, d does not see
# their variation and G1 + G2 is closed.  Differentiated, it is not.
f1, f2 = gauge_connections(pair, t1, t2, spec)
print("|d(G1 + G2)|, frozen gauge        :", max_abs(exterior_d(f1.gamma + f2.gamma, spec), grid))
print("|d(G1 + G2)|, differentiated gauge:", max_abs(exterior_d(g1.gamma + g2.gamma, spec), grid))
