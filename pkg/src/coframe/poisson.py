"""Poisson one-forms on S^3: curl eigenforms, the local pair J1/J2, their unit
sections and the connection forms solving ``d j = Gamma ^ j``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import scalar as sc
from .errors import IllConditionedError, InconsistentSystemError
from .forms import (Form, exterior_d, form_norm, hodge_star, max_abs, one_form,
                    wedge, zero_form)
from .scalar import PHI, PSI, THETA, Dual3, PointSet, ScalarField, as_field, real_part

DET_FLOOR = 1e-12


def curl(a: Form, spec) -> Form:
    """``*d a`` for a one-form."""
    if a.degree != 1:
        raise ValueError("curl expects a one-form")
    return hodge_star(exterior_d(a, spec), spec)


def eigenvalue_check(a: Form, spec, points: PointSet | None = None,
                     tol: float = 1e-9) -> float | None:
    """Constant ``lam`` with ``curl(a) = lam * a`` on the grid, else ``None``."""
    ps = spec.standard_grid() if points is None else points
    va = a.evaluate(ps)
    vc = curl(a, spec).evaluate(ps)
    norm2 = np.sum(va * va, axis=0)
    if np.any(norm2 < tol):
        raise ValueError("eigenvalue_check needs a nonvanishing one-form")
    lam_pointwise = np.sum(vc * va, axis=0) / norm2
    lam = float(np.mean(lam_pointwise))
    scale = max(1.0, abs(lam))
    if np.max(np.abs(lam_pointwise - lam)) > tol * scale:
        return None
    if np.max(np.abs(vc - lam * va)) > tol * scale:
        return None
    return lam


@dataclass(frozen=True, eq=False)
class PoissonPair:
    """Local Poisson one-forms, their unit sections and local Hamiltonians.

    ``H1 = nu (phi + psi)/2`` and ``H2 = nu (phi - psi)/2`` are chart-local:
    phi and psi are angles, so neither is a global function on S^3.
    """

    J1: Form
    J2: Form
    j1_hat: Form
    j2_hat: Form
    H1: ScalarField
    H2: ScalarField


def build_poisson_pair(spec) -> PoissonPair:
    nu = spec.nu
    h1 = (0.5 * nu) * (PHI + PSI)
    h2 = (0.5 * nu) * (PHI - PSI)
    j1 = exterior_d(zero_form(h1), spec)
    j2 = exterior_d(zero_form(h2), spec)
    return PoissonPair(J1=j1, J2=j2,
                       j1_hat=j1 * (1.0 / form_norm(j1)),
                       j2_hat=j2 * (1.0 / form_norm(j2)),
                       H1=h1, H2=h2)


def jacobi_check(J: Form, spec, points: PointSet | None = None) -> float:
    """Max of ``|dJ ^ J|`` over the grid."""
    ps = spec.standard_grid() if points is None else points
    return max_abs(wedge(exterior_d(J, spec), J), ps)


def compatibility_form(J1: Form, J2: Form, spec) -> Form:
    return wedge(J1, exterior_d(J2, spec)) + wedge(J2, exterior_d(J1, spec))


def compatibility_check(J1: Form, J2: Form, spec,
                        points: PointSet | None = None) -> float:
    """Max of ``|J1 ^ dJ2 + J2 ^ dJ1|`` over the grid."""
    ps = spec.standard_grid() if points is None else points
    return max_abs(compatibility_form(J1, J2, spec), ps)


@dataclass(frozen=True, eq=False)
class ConnectionSolution:
    gamma: Form
    free_parameter: ScalarField
    residual: float


def _pinned_solve(jv, dv, t, pin: int):
    """Solve ``G x j = D`` for ``G`` with ``G[pin] = t``.

    With ``(p, a, b)`` the cyclic order starting at ``pin``, the ``a`` and
    ``b`` rows read ``G_b j_p - t j_b = D_a`` and ``t j_a - G_a j_p = D_b``,
    so each free unknown costs one division by ``j_p``.  The remaining row
    is the consistency condition, checked by the caller.  The normal
    equations of the full system have determinant ``j_p^2 |j|^2``; that is
    the quantity held against the conditioning floor.
    """
    a, b = (pin + 1) % 3, (pin + 2) % 3
    jp = jv[pin]
    det = jp * jp * (jv[0] * jv[0] + jv[1] * jv[1] + jv[2] * jv[2])
    if np.any(np.abs(real_part(det)) < DET_FLOOR):
        raise IllConditionedError(
            f"pinned connection system is singular (|det| < {DET_FLOOR:g})")
    g = [None, None, None]
    g[b] = (dv[a] + t * jv[b]) / jp
    g[a] = (t * jv[a] - dv[b]) / jp
    g[pin] = t
    return g


def solve_connection(j_hat: Form, t, spec, pin: int = 2,
                     points: PointSet | None = None,
                     tol: float = 1e-9) -> ConnectionSolution:
    """Connection one-form ``Gamma`` with ``d j_hat = Gamma ^ j_hat``.

    The system is underdetermined (``Gamma`` is fixed up to multiples of
    ``j_hat``); the ``w^(pin+1)`` coefficient is pinned to the field ``t`` and
    the other two are solved pointwise.  Raises
    :class:`InconsistentSystemError` if the solved Gamma leaves a residual
    above ``tol`` on the grid, which happens exactly when ``dj ^ j != 0``.
    """
    t = as_field(t)
    dj = exterior_d(j_hat, spec)

    def component(m: int) -> ScalarField:
        def fn(p: PointSet) -> Dual3:
            key = ("connection", id(dj), id(t), pin)
            hit = p._cache.get(key)
            if hit is None:
                jv = [c.evaluate(p) for c in j_hat.coeffs]
                dv = [c.evaluate(p) for c in dj.coeffs]
                hit = (dj, _pinned_solve(jv, dv, t.evaluate(p), pin))
                p._cache[key] = hit
            out = hit[1][m]
            return out if isinstance(out, Dual3) else Dual3.constant(out)
        return ScalarField(fn, name=f"Gamma{m + 1}")

    comps = [component(m) if m != pin else t for m in range(3)]
    gamma = one_form(*comps)
    ps = spec.standard_grid() if points is None else points
    residual = max_abs(dj - wedge(gamma, j_hat), ps)
    if residual > tol:
        raise InconsistentSystemError(
            f"d j = Gamma ^ j has no solution with the pinned coefficient "
            f"(residual {residual:.3e}); is d j ^ j = 0?")
    return ConnectionSolution(gamma=gamma, free_parameter=t, residual=residual)


# -- gauge presets ------------------------------------------------------------


def paper_gauge(spec) -> tuple[ScalarField, ScalarField]:
    """``t1 = sin(nu theta/2)``, ``t2 = 1/sin(nu theta/2)``: the Bott-class gauge."""
    s = sc.sin(0.5 * spec.nu * THETA)
    return s, 1.0 / s


def zero_gauge(spec=None) -> tuple[ScalarField, ScalarField]:
    return sc.ZERO, sc.ZERO


def constant_gauge(c1: float, c2: float) -> tuple[ScalarField, ScalarField]:
    return as_field(float(c1)), as_field(float(c2))


__all__ = [
    "ConnectionSolution", "PoissonPair", "build_poisson_pair", "compatibility_check",
    "compatibility_form", "constant_gauge", "curl", "eigenvalue_check",
    "jacobi_check", "paper_gauge", "solve_connection", "zero_gauge",
]
