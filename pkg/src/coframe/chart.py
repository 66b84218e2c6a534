"""Euler-arclength chart of the 3-sphere of radius ``R = 2/nu``.

Coordinates ``(phi, theta, psi)`` range over ``0 <= nu*phi < 2pi``,
``0 < nu*theta < pi`` and ``0 <= nu*psi < 4pi``.  The left-invariant
orthonormal coframe used throughout is

    w1 = sin(nu theta) sin(nu psi) dphi + cos(nu psi) dtheta
    w2 = sin(nu theta) cos(nu psi) dphi - sin(nu psi) dtheta
    w3 = cos(nu theta) dphi + dpsi

which satisfies ``dw1 = -nu w2^w3`` (and cyclic).  Its determinant against
``dphi^dtheta^dpsi`` is ``-sin(nu theta)``: the sphere is oriented by the
coframe, so the chart is negatively oriented and integrals of top forms use
the density ``|det| = sin(nu theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.stats import qmc

from . import scalar as sc
from .errors import SingularChartError
from .scalar import PHI, PSI, THETA, PointSet, ScalarField

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class ChartPoint:
    """A point of the open chart, in arclength units."""

    phi: float
    theta: float
    psi: float


def levi_civita() -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k] = 1.0
        eps[i, k, j] = -1.0
    return eps


@dataclass(frozen=True, eq=False)
class FrameSpec:
    """Manifold descriptor: coframe, frame, structure constants and chart bounds.

    ``structure_constants[k, i, j]`` is ``C^k_ij`` with
    ``dw^k = -1/2 C^k_ij w^i ^ w^j``.  ``coframe_matrix[i][mu]`` is the
    coefficient of ``dx^mu`` in ``w^i``; ``frame_matrix[mu][i]`` is the
    coefficient of ``w^i`` in ``dx^mu`` (row ``mu``), equivalently the
    ``mu``-component of the frame vector ``e_i`` (column ``i``).
    """

    nu: float
    structure_constants: np.ndarray
    coframe_matrix: tuple
    frame_matrix: tuple
    jacobian: ScalarField
    orientation: int = 1
    chart_orientation: int = -1
    epsilon: float = 1e-6
    grid_size: int = 17
    n_random: int = 200
    seed: int = 0
    extras: dict = field(default_factory=dict)

    @property
    def radius(self) -> float:
        return 2.0 / self.nu

    @property
    def lengths(self) -> tuple[float, float, float]:
        """Chart extents along phi, theta, psi."""
        return (TWO_PI / self.nu, np.pi / self.nu, 2.0 * TWO_PI / self.nu)

    def check_interior(self, theta) -> None:
        nt = self.nu * np.asarray(sc.real_part(theta))
        margin = self.nu * self.epsilon
        if np.any(nt <= margin) or np.any(nt >= np.pi - margin):
            raise SingularChartError(
                f"nu*theta must lie in ({margin:g}, pi - {margin:g}); "
                f"got range [{nt.min():.3g}, {nt.max():.3g}]")

    def points(self, phi, theta, psi) -> PointSet:
        """Validated point set for the given coordinate arrays."""
        ps = PointSet.from_arrays(phi, theta, psi)
        self.check_interior(ps.theta)
        return ps

    @cached_property
    def _grid_arrays(self):
        n = self.grid_size
        lp, lt, ls = self.lengths
        centers = (np.arange(n) + 0.5) / n
        a, b, c = np.meshgrid(centers * lp, centers * lt, centers * ls,
                              indexing="ij")
        u = qmc.Halton(d=3, scramble=True, seed=self.seed).random(self.n_random)
        # quasi-random points share the theta band of the cell-centred grid
        t_lo = 0.5 * lt / n
        rand = (u[:, 0] * lp, t_lo + u[:, 1] * (lt - 2 * t_lo), u[:, 2] * ls)
        return tuple(np.concatenate([g.ravel(), r])
                     for g, r in zip((a, b, c), rand))

    def standard_grid(self) -> PointSet:
        """Fresh point set: ``n^3`` cell-centred nodes plus quasi-random points."""
        return self.points(*self._grid_arrays)


def _s3_trig(nu: float):
    s, c = sc.sin(nu * THETA), sc.cos(nu * THETA)
    sp, cp = sc.sin(nu * PSI), sc.cos(nu * PSI)
    return s, c, sp, cp


def s3_frame(nu: float = 1.0, epsilon: float | None = None, **kwargs) -> FrameSpec:
    """FrameSpec of the 3-sphere of radius ``2/nu`` with its Maurer-Cartan coframe."""
    if not nu > 0:
        raise ValueError("nu must be positive")
    if epsilon is None:
        epsilon = 1e-6 / nu
    s, c, sp, cp = _s3_trig(nu)
    zero, one = sc.ZERO, sc.ONE
    coframe = (
        (s * sp, cp, zero),
        (s * cp, -sp, zero),
        (c, zero, one),
    )
    cot = c / s
    frame = (
        (sp / s, cp / s, zero),
        (cp, -sp, zero),
        (-sp * cot, -cp * cot, one),
    )
    return FrameSpec(
        nu=float(nu),
        structure_constants=nu * levi_civita(),
        coframe_matrix=coframe,
        frame_matrix=frame,
        jacobian=s,
        epsilon=float(epsilon),
        **kwargs,
    )


def _pointset(p, spec: FrameSpec) -> PointSet:
    ps = PointSet.from_arrays(p.phi, p.theta, p.psi)
    spec.check_interior(ps.theta)
    return ps


def _matrix_values(rows, ps: PointSet) -> np.ndarray:
    out = np.stack([np.stack([f.values(ps) for f in row]) for row in rows])
    return out if out.ndim == 2 else np.moveaxis(out, (0, 1), (-2, -1))


def embed(p, nu: float) -> np.ndarray:
    """Cartesian point of the sphere in R^4 (last axis of length 4)."""
    r = 2.0 / nu
    h = 0.5 * nu * np.asarray(p.theta, dtype=float)
    plus = 0.5 * nu * (np.asarray(p.phi) + np.asarray(p.psi))
    minus = 0.5 * nu * (np.asarray(p.phi) - np.asarray(p.psi))
    return np.stack([
        r * np.cos(h) * np.cos(plus),
        r * np.cos(h) * np.sin(plus),
        r * np.sin(h) * np.cos(minus),
        r * np.sin(h) * np.sin(minus),
    ], axis=-1)


def coframe_at(p, spec: FrameSpec) -> np.ndarray:
    """Row ``k`` holds the coefficients of ``w^k`` in ``(dphi, dtheta, dpsi)``."""
    return _matrix_values(spec.coframe_matrix, _pointset(p, spec))


def frame_at(p, spec: FrameSpec) -> np.ndarray:
    """Inverse of :func:`coframe_at`; row ``mu`` expresses ``dx^mu`` in the w basis."""
    return _matrix_values(spec.frame_matrix, _pointset(p, spec))


def measure_weight(p, spec: FrameSpec) -> np.ndarray | float:
    """Chart density of the volume form, ``sin(nu theta)``.

    The normalized Haar density is this divided by ``16 pi^2``.
    """
    out = spec.jacobian.values(_pointset(p, spec))
    return float(out) if out.ndim == 0 else out


def haar_total(spec: FrameSpec) -> float:
    """Closed-form integral of ``sin(nu theta) / 16 pi^2`` over the chart: ``1/nu^3``."""
    return 1.0 / spec.nu ** 3


def metric_from_embedding(p, nu: float) -> np.ndarray:
    """Pullback of the Euclidean metric of R^4 through :func:`embed`.

    Computed with dual numbers directly from the embedding formulas; used as
    an oracle for the coframe (``C^T C`` must equal it).
    """
    ps = PointSet.from_arrays(p.phi, p.theta, p.psi)
    r = 2.0 / nu
    h = 0.5 * nu * THETA
    plus = 0.5 * nu * (PHI + PSI)
    minus = 0.5 * nu * (PHI - PSI)
    xs = (r * sc.cos(h) * sc.cos(plus), r * sc.cos(h) * sc.sin(plus),
          r * sc.sin(h) * sc.cos(minus), r * sc.sin(h) * sc.sin(minus))
    jac = np.stack([x.gradient(ps) for x in xs])  # (4, 3, ...)
    return np.einsum("am...,an...->...mn", jac, jac)


def structure_equation_residual(spec: FrameSpec, points: PointSet | None = None) -> float:
    """Max deviation of ``dw^k`` (computed in coordinates) from the structure constants.

    ``(dw^k)_{mu nu} = d_mu C^k_nu - d_nu C^k_mu`` is converted to the w basis
    with the frame matrix and compared against ``-C^k_ij`` for ``i < j``.
    This route never uses the structure constants to differentiate.
    """
    ps = spec.standard_grid() if points is None else points
    shape = ps.shape
    grads = np.empty((3, 3, 3) + shape)  # [k, nu, mu] = d_mu C^k_nu
    for k in range(3):
        for n in range(3):
            grads[k, n] = spec.coframe_matrix[k][n].gradient(ps)
    frame = np.stack([np.stack([np.broadcast_to(f.values(ps), shape)
                                for f in row]) for row in spec.frame_matrix])
    worst = 0.0
    for k in range(3):
        f_mn = np.swapaxes(grads[k], 0, 1) - grads[k]  # [mu, nu]
        f_ij = np.einsum("mi...,nj...,mn...->ij...", frame, frame, f_mn)
        target = -spec.structure_constants[k]
        worst = max(worst, float(np.max(np.abs(f_ij - target[(...,) + (None,) * len(shape)]))))
    return worst
