"""The incompatibility three-form Xi, the Bott-class representative, the
curvature trace, and tensor-product Gauss-Legendre integration over S^3.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .chart import s3_frame, structure_equation_residual
from .errors import CoframeError, NonFiniteError
from .forms import (BASIS, Form, exterior_d, hodge_star, inner, max_abs, omega,
                    pullback_top, volume_form, wedge, zero_form)
from .poisson import (ConnectionSolution, PoissonPair, build_poisson_pair,
                      compatibility_check, eigenvalue_check, jacobi_check,
                      solve_connection)
from .sampling import random_form, random_global_two_form, random_trig_field
from .scalar import as_field

log = logging.getLogger(__name__)


# -- quadrature ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor-product nodes and weights along (phi, theta, psi)."""

    nodes: tuple[np.ndarray, np.ndarray, np.ndarray]
    weights: tuple[np.ndarray, np.ndarray, np.ndarray]
    epsilon: float

    @property
    def counts(self) -> tuple[int, int, int]:
        return tuple(len(n) for n in self.nodes)

    @classmethod
    def gauss_legendre(cls, spec, n: int | Sequence[int] = 32) -> "QuadratureGrid":
        counts = (n, n, n) if np.isscalar(n) else tuple(n)
        if min(counts) < 1:
            raise ValueError("node counts must be positive")
        nodes, weights = [], []
        for m, length in zip(counts, spec.lengths):
            x, w = np.polynomial.legendre.leggauss(int(m))
            nodes.append(0.5 * length * (x + 1.0))
            weights.append(0.5 * length * w)
        grid = cls(tuple(nodes), tuple(weights), spec.epsilon)
        grid.validate(spec)
        return grid

    def validate(self, spec) -> None:
        theta = self.nodes[1]
        lo, hi = self.epsilon, spec.lengths[1] - self.epsilon
        if np.any(theta <= lo) or np.any(theta >= hi):
            raise ValueError("theta nodes must lie strictly inside the chart margin")
        for w, length in zip(self.weights, spec.lengths):
            if np.any(w <= 0):
                raise ValueError("quadrature weights must be positive")
            if not np.isclose(w.sum(), length, rtol=1e-12):
                raise ValueError("axis weights must sum to the axis length")


def integrate_top(a: Form, grid: QuadratureGrid, spec, chunk_size: int = 4096) -> float:
    """Integral of a 3-form over S^3 (oriented by the coframe)."""
    density = pullback_top(a, spec)
    if density.const == 0:
        return 0.0
    nph, nth, nps = grid.counts
    block = max(1, chunk_size // (nth * nps))
    w_rest = np.multiply.outer(grid.weights[1], grid.weights[2])
    total = 0.0
    for start in range(0, nph, block):
        sl = slice(start, start + block)
        a_, b_, c_ = np.meshgrid(grid.nodes[0][sl], grid.nodes[1], grid.nodes[2],
                                 indexing="ij")
        vals = density.values(spec.points(a_, b_, c_))
        if not np.all(np.isfinite(vals)):
            raise NonFiniteError("non-finite integrand at a quadrature node")
        total += float(np.einsum("i,ijk,jk->", grid.weights[0][sl], vals, w_rest))
    return total


# -- Xi and the Bott class ----------------------------------------------------


def xi_form(g1: ConnectionSolution, g2: ConnectionSolution,
            j1_hat: Form, j2_hat: Form) -> Form:
    """``(Gamma1 - Gamma2) ^ j1 ^ j2``."""
    return wedge(wedge(g1.gamma - g2.gamma, j1_hat), j2_hat)


def gauge_connections(pair: PoissonPair, t1, t2, spec,
                      differentiate_gauge: bool = False):
    """Solve both connection equations in the gauge ``(t1, t2)``.

    By default the gauge fields enter as pointwise parameters: ``d`` does not
    see their variation (``dt_i = 0``).  With ``differentiate_gauge`` they are
    ordinary functions and their derivatives feed into ``d Gamma_i``.
    """
    t1, t2 = as_field(t1), as_field(t2)
    if not differentiate_gauge:
        t1, t2 = t1.frozen(), t2.frozen()
    return (solve_connection(pair.j1_hat, t1, spec),
            solve_connection(pair.j2_hat, t2, spec))


def bott_terms(g1: ConnectionSolution, g2: ConnectionSolution, j1_hat: Form,
               j2_hat: Form, b11, b22, spec) -> tuple[Form, Form, Form, Form]:
    """The four summands of ``h ^ dh`` with ``h = (G1 + G2) + (b11 j1 + b22 j2)``."""
    g = g1.gamma + g2.gamma
    b = j1_hat * as_field(b11) + j2_hat * as_field(b22)
    dg, db = exterior_d(g, spec), exterior_d(b, spec)
    return wedge(g, dg), wedge(g, db), wedge(b, dg), wedge(b, db)


@dataclass(frozen=True, eq=False)
class BottClass:
    form: Form
    terms: tuple[Form, Form, Form, Form]
    integral: float
    term_integrals: tuple[float, float, float, float]
    connections: tuple[ConnectionSolution, ConnectionSolution]


def bott_class(pair: PoissonPair, t1, t2, spec, grid: QuadratureGrid | None = None,
               b11=1.0, b22=1.0, differentiate_gauge: bool = False) -> BottClass:
    grid = QuadratureGrid.gauss_legendre(spec) if grid is None else grid
    g1, g2 = gauge_connections(pair, t1, t2, spec, differentiate_gauge)
    terms = bott_terms(g1, g2, pair.j1_hat, pair.j2_hat, b11, b22, spec)
    beta = terms[0] + terms[1] + terms[2] + terms[3]
    term_integrals = tuple(integrate_top(t, grid, spec) for t in terms)
    return BottClass(form=beta, terms=terms, integral=integrate_top(beta, grid, spec),
                     term_integrals=term_integrals, connections=(g1, g2))


def curvature_and_chern(g1: ConnectionSolution, g2: ConnectionSolution,
                        j1_hat: Form, j2_hat: Form, b, spec, points=None):
    """Curvature matrix of the split connection and its trace residual.

    ``b`` is a 2x2 nested sequence of fields.  Returns ``(kappa, residual)``
    with ``residual = max |tr(kappa) - d(G1 + G2 + b11 j1 + b22 j2)|``.
    """
    (b11, b12), (b21, b22) = [[as_field(x) for x in row] for row in b]
    G1, G2 = g1.gamma, g2.gamma

    def d0(f):
        return exterior_d(zero_form(f), spec)

    k11 = exterior_d(G1, spec) + wedge(d0(b11) + G1 * b11 + j2_hat * (b12 * b21), j1_hat)
    k12 = wedge(d0(b12) + G1 * b12 + j1_hat * (b11 * b12), j2_hat)
    k21 = wedge(d0(b21) + G2 * b21 + j2_hat * (b21 * b22), j1_hat)
    k22 = exterior_d(G2, spec) + wedge(d0(b22) + G2 * b22 + j1_hat * (b21 * b12), j2_hat)
    kappa = ((k11, k12), (k21, k22))
    expected = exterior_d(G1 + G2 + j1_hat * b11 + j2_hat * b22, spec)
    ps = spec.standard_grid() if points is None else points
    return kappa, max_abs(k11 + k22 - expected, ps)


# -- closed forms -------------------------------------------------------------


def xi_target(nu: float) -> float:
    return 8.0 * np.pi ** 3 / nu ** 2


def bott_target(nu: float) -> float:
    """Integral of the Bott representative for t1 = sin(nu theta/2), t2 = 1/t1."""
    return 8.0 * np.pi ** 2 / nu ** 2


def volume_target(nu: float) -> float:
    return 16.0 * np.pi ** 2 / nu ** 3


def bott_target_for(preset: str, nu: float, c1: float = 0.0, c2: float = 0.0) -> float:
    """Closed-form Bott integral (parameter gauge) for the named presets.

    Term 2 integrates to ``16 pi^2 (c1 - c2)/nu^2`` for constant gauges; term 4
    always gives the Xi value.
    """
    if preset == "paper":
        return bott_target(nu)
    if preset == "zero":
        return xi_target(nu)
    if preset == "constant":
        return xi_target(nu) + 16.0 * np.pi ** 2 * (c1 - c2) / nu ** 2
    raise ValueError(f"unknown gauge preset {preset!r}")


# -- verification report ------------------------------------------------------

STAGES = ("maurer-cartan", "hodge", "eigenvalue", "jacobi", "compatibility",
          "connections", "xi-gauge", "chern", "stokes", "xi", "bott", "volume")

DEFAULT_TOLERANCES = {
    "maurer-cartan": 1e-9,
    "hodge": 1e-9,
    "eigenvalue": 1e-10,
    "jacobi": 1e-9,
    "compatibility": 1e-9,
    "connections": 1e-9,
    "xi-gauge": 1e-9,
    "chern": 1e-9,
    "stokes": 1e-7,
    "xi": 1e-8,
    "bott": 1e-8,
    "volume": 1e-8,
}


@dataclass
class StageResult:
    name: str
    max_residual: float | None
    tolerance: float
    passed: bool
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"name": self.name, "max_residual": self.max_residual,
               "tolerance": self.tolerance, "pass": self.passed}
        if self.error is not None:
            out["error"] = self.error
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "StageResult":
        return cls(d["name"], d["max_residual"], d["tolerance"], d["pass"], d.get("error"))


@dataclass
class IntegralResult:
    value: float
    target: float | None
    rel_err: float | None
    normalized: float  # value * nu^2, independent of nu for xi and bott

    @classmethod
    def of(cls, value: float, target: float | None, nu: float) -> "IntegralResult":
        rel = None if target is None else abs(value - target) / abs(target)
        return cls(value, target, rel, value * nu ** 2)


@dataclass
class ObstructionReport:
    nu: float
    nodes_per_axis: int
    epsilon: float
    stages: list[StageResult] = field(default_factory=list)
    integrals: dict[str, IntegralResult] = field(default_factory=dict)
    lambda_: float | None = None
    gauge: dict = field(default_factory=dict)
    bott_term_integrals: list[float] | None = None
    chern_trace_residual: float | None = None
    connection_residuals: list[float] | None = None
    jacobi_residuals: list[float] | None = None
    compatibility_residual: float | None = None

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.stages)

    @property
    def xi_integral(self) -> float | None:
        r = self.integrals.get("xi")
        return None if r is None else r.value

    @property
    def bott_integral(self) -> float | None:
        r = self.integrals.get("bott")
        return None if r is None else r.value

    def stage(self, name: str) -> StageResult:
        for s in self.stages:
            if s.name == name:
                return s
        raise KeyError(name)

    def to_dict(self) -> dict:
        integrals = {k: asdict(v) for k, v in self.integrals.items()}
        if self.bott_term_integrals is not None and "bott" in integrals:
            integrals["bott"]["terms"] = list(self.bott_term_integrals)
        return {
            "nu": self.nu,
            "grid": {"nodes_per_axis": self.nodes_per_axis, "epsilon": self.epsilon},
            "stages": [s.to_dict() for s in self.stages],
            "integrals": integrals,
            "lambda": self.lambda_,
            "gauge": dict(self.gauge),
            "residuals": {
                "jacobi": self.jacobi_residuals,
                "compatibility": self.compatibility_residual,
                "connections": self.connection_residuals,
                "chern_trace": self.chern_trace_residual,
            },
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ObstructionReport":
        integrals, terms = {}, None
        for k, v in d.get("integrals", {}).items():
            v = dict(v)
            if k == "bott":
                terms = v.pop("terms", None)
            integrals[k] = IntegralResult(**v)
        res = d.get("residuals", {})
        return cls(
            nu=d["nu"],
            nodes_per_axis=d["grid"]["nodes_per_axis"],
            epsilon=d["grid"]["epsilon"],
            stages=[StageResult.from_dict(s) for s in d.get("stages", [])],
            integrals=integrals,
            lambda_=d.get("lambda"),
            gauge=dict(d.get("gauge", {})),
            bott_term_integrals=terms,
            chern_trace_residual=res.get("chern_trace"),
            connection_residuals=res.get("connections"),
            jacobi_residuals=res.get("jacobi"),
            compatibility_residual=res.get("compatibility"),
        )


# -- stage implementations ----------------------------------------------------


def maurer_cartan_residual(spec, points=None) -> float:
    """Both routes: coordinate differentiation of the coframe and ``exterior_d``."""
    ps = spec.standard_grid() if points is None else points
    worst = structure_equation_residual(spec, ps)
    nu_eps = spec.structure_constants
    for k in range(3):
        target = [-nu_eps[k][i][j] for (i, j) in BASIS[2]]
        got = exterior_d(omega(k + 1), spec)
        worst = max(worst, max(abs(c.const - t) for c, t in zip(got.coeffs, target)))
    return worst


def hodge_residual(spec, rng: np.random.Generator, points=None) -> float:
    """Duality relations, involutivity, and ``a ^ *b = <a, b> vol``."""
    ps = spec.standard_grid() if points is None else points
    worst = 0.0
    for k in range(3):
        star = hodge_star(omega(k + 1), spec)
        target = np.zeros(3)
        target[k] = 1.0
        worst = max(worst, max(abs(c.const - t) for c, t in zip(star.coeffs, target)))
    worst = max(worst, abs(hodge_star(volume_form(), spec).coeffs[0].const - 1.0))
    for degree in range(4):
        a = random_form(rng, spec, degree)
        b = random_form(rng, spec, degree)
        worst = max(worst, max_abs(hodge_star(hodge_star(a, spec), spec) - a, ps))
        lhs = wedge(a, hodge_star(b, spec))
        worst = max(worst, max_abs(lhs.coeffs[0] - inner(a, b), ps))
    return worst


def stokes_residual(spec, grid: QuadratureGrid, rng: np.random.Generator,
                    count: int = 10) -> float:
    """Largest ``|integral of d(b)|`` over random global 2-forms ``b``."""
    return max(abs(integrate_top(exterior_d(random_global_two_form(rng, spec), spec),
                                 grid, spec))
               for _ in range(count))


def xi_gauge_residual(pair: PoissonPair, spec, rng: np.random.Generator,
                      count: int = 5, points=None) -> float:
    """Pointwise spread of Xi across random gauges, and distance from nu/sin(nu theta)."""
    ps = spec.standard_grid() if points is None else points
    target = spec.nu / spec.jacobian
    worst = 0.0
    for _ in range(count):
        t1, t2 = random_trig_field(rng, spec), random_trig_field(rng, spec)
        g1 = solve_connection(pair.j1_hat, t1, spec, points=ps)
        g2 = solve_connection(pair.j2_hat, t2, spec, points=ps)
        xi = xi_form(g1, g2, pair.j1_hat, pair.j2_hat)
        worst = max(worst, max_abs(xi.coeffs[0] - target, ps))
    return worst


def run_verification(spec=None, grid: QuadratureGrid | None = None, t1=None, t2=None,
                     tolerances: dict | None = None, stages: Sequence[str] | None = None,
                     seed: int = 0, gauge_label: dict | None = None,
                     bott_reference: float | None = None,
                     differentiate_gauge: bool = False,
                     compatibility_forms: str = "poisson") -> ObstructionReport:
    """Run the verification stages in order and collect an :class:`ObstructionReport`.

    A failing or raising stage is recorded with its name and never skipped
    silently; later stages still run when their inputs are available.
    ``bott_reference`` is the closed-form target for the Bott integral in the
    chosen gauge (``None`` when no closed form is known).
    """
    spec = s3_frame() if spec is None else spec
    grid = QuadratureGrid.gauss_legendre(spec) if grid is None else grid
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    wanted = list(STAGES) if stages is None else list(stages)
    unknown = set(wanted) - set(STAGES)
    if unknown:
        raise ValueError(f"unknown stages: {sorted(unknown)}")
    if t1 is None or t2 is None:
        from .poisson import paper_gauge
        t1, t2 = paper_gauge(spec)
        gauge_label = gauge_label or {"t1": "sin(nu*theta/2)", "t2": "1/sin(nu*theta/2)"}
        if bott_reference is None:
            bott_reference = bott_target(spec.nu)
    rng = np.random.default_rng(seed)
    nu = spec.nu
    report = ObstructionReport(nu=nu, nodes_per_axis=grid.counts[0], epsilon=grid.epsilon,
                               gauge=dict(gauge_label or {"t1": "custom", "t2": "custom"}))
    report.gauge["differentiated"] = bool(differentiate_gauge)
    ps = spec.standard_grid()
    state: dict = {}

    def pair() -> PoissonPair:
        if "pair" not in state:
            state["pair"] = build_poisson_pair(spec)
        return state["pair"]

    def connections():
        if "conn" not in state:
            state["conn"] = gauge_connections(pair(), t1, t2, spec, differentiate_gauge)
        return state["conn"]

    def record(name: str, fn) -> None:
        try:
            value = fn()
            value = float(value) if value is not None else None
            ok = value is not None and np.isfinite(value) and value < tol[name]
            report.stages.append(StageResult(name, value, tol[name], bool(ok)))
        except (CoframeError, ValueError, ArithmeticError) as exc:
            log.warning("stage %s failed: %s", name, exc)
            report.stages.append(StageResult(name, None, tol[name], False, str(exc)))

    def eigen():
        lam = eigenvalue_check(omega(3), spec, ps, tol=tol["eigenvalue"])
        report.lambda_ = lam
        return None if lam is None else abs(lam + nu)

    def jacobi():
        p = pair()
        res = [jacobi_check(f, spec, ps) for f in (p.J1, p.J2, p.j1_hat, p.j2_hat)]
        report.jacobi_residuals = res
        return max(res)

    def compat():
        p = pair()
        forms = (p.J1, p.J2) if compatibility_forms == "poisson" else (p.j1_hat, p.j2_hat)
        report.compatibility_residual = compatibility_check(*forms, spec, ps)
        return report.compatibility_residual

    def conn():
        g1, g2 = connections()
        report.connection_residuals = [g1.residual, g2.residual]
        return max(g1.residual, g2.residual)

    def chern():
        g1, g2 = connections()
        p = pair()
        _, trace_res = curvature_and_chern(g1, g2, p.j1_hat, p.j2_hat,
                                           ((1.0, 0.0), (0.0, 1.0)), spec, ps)
        report.chern_trace_residual = trace_res
        closed = max_abs(exterior_d(g1.gamma + g2.gamma, spec), ps)
        return max(trace_res, closed)

    def xi():
        g1, g2 = connections()
        p = pair()
        value = integrate_top(xi_form(g1, g2, p.j1_hat, p.j2_hat), grid, spec)
        report.integrals["xi"] = IntegralResult.of(value, xi_target(nu), nu)
        return report.integrals["xi"].rel_err

    def bott():
        g1, g2 = connections()
        p = pair()
        terms = bott_terms(g1, g2, p.j1_hat, p.j2_hat, 1.0, 1.0, spec)
        term_values = [integrate_top(t, grid, spec) for t in terms]
        value = integrate_top(terms[0] + terms[1] + terms[2] + terms[3], grid, spec)
        report.bott_term_integrals = term_values
        report.integrals["bott"] = IntegralResult.of(value, bott_reference, nu)
        if bott_reference is None:
            raise CoframeError("no closed-form Bott target for this gauge")
        return report.integrals["bott"].rel_err

    def volume():
        value = integrate_top(volume_form(), grid, spec)
        report.integrals["volume"] = IntegralResult.of(value, volume_target(nu), nu)
        return report.integrals["volume"].rel_err

    runners = {
        "maurer-cartan": lambda: maurer_cartan_residual(spec, ps),
        "hodge": lambda: hodge_residual(spec, rng, ps),
        "eigenvalue": eigen,
        "jacobi": jacobi,
        "compatibility": compat,
        "connections": conn,
        "xi-gauge": lambda: xi_gauge_residual(pair(), spec, rng, points=ps),
        "chern": chern,
        "stokes": lambda: stokes_residual(spec, grid, rng),
        "xi": xi,
        "bott": bott,
        "volume": volume,
    }
    for name in STAGES:
        if name in wanted:
            record(name, runners[name])
    return report
