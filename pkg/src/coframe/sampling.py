"""Random smooth fields and forms for property checks."""

from __future__ import annotations

import numpy as np

from . import scalar as sc
from .forms import Form
from .scalar import PHI, PSI, THETA, ScalarField


def random_trig_field(rng: np.random.Generator, spec, n_terms: int = 3,
                      vanish_at_poles: bool = False) -> ScalarField:
    """Trigonometric polynomial periodic in phi (period 2pi/nu) and psi (4pi/nu).

    With ``vanish_at_poles`` the field carries a ``sin(nu theta)^2`` factor,
    so it vanishes to second order at both ends of the theta range.
    """
    nu = spec.nu
    total = sc.ZERO
    for _ in range(n_terms):
        kp, kt, ks = rng.integers(0, 3, size=3)
        amp = float(rng.normal())
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        arg = (nu * float(kp)) * PHI + (nu * float(kt)) * THETA + (0.5 * nu * float(ks)) * PSI
        total = total + amp * sc.cos(arg + phase)
    if vanish_at_poles:
        s = sc.sin(nu * THETA)
        total = total * s * s
    return total


def random_form(rng: np.random.Generator, spec, degree: int,
                vanish_at_poles: bool = False) -> Form:
    n = {0: 1, 1: 3, 2: 3, 3: 1}[degree]
    return Form(degree, tuple(random_trig_field(rng, spec, vanish_at_poles=vanish_at_poles)
                              for _ in range(n)))


def random_global_two_form(rng: np.random.Generator, spec) -> Form:
    """A 2-form that extends smoothly over the chart poles (for Stokes checks)."""
    return random_form(rng, spec, 2, vanish_at_poles=True)
