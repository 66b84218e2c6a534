import numpy as np
import pytest

from coframe import scalar as sc
from coframe.errors import IllConditionedError, InconsistentSystemError
from coframe.forms import (exterior_d, form_norm, max_abs, omega, one_form, wedge,
                           zero_form)
from coframe.poisson import (build_poisson_pair, compatibility_check, constant_gauge, curl,
                             eigenvalue_check, jacobi_check, paper_gauge, solve_connection,
                             zero_gauge)
from coframe.sampling import random_trig_field
from coframe.scalar import PHI, PSI, THETA

TOL = 1e-9


@pytest.mark.parametrize("k", [1, 2, 3])
def test_curl_of_basis(any_spec, k):
    c = curl(omega(k), any_spec)
    assert [x.const for x in c.coeffs] == [-any_spec.nu if i == k - 1 else 0.0 for i in range(3)]


def test_curl_of_exact_form_vanishes(any_spec):
    ps = any_spec.standard_grid()
    df = exterior_d(zero_form(sc.sin(any_spec.nu * THETA)), any_spec)
    assert max_abs(curl(df, any_spec), ps) < TOL


def test_curl_rejects_other_degrees(spec):
    with pytest.raises(ValueError):
        curl(zero_form(1.0), spec)


def test_eigenvalues(any_spec):
    ps = any_spec.standard_grid()
    nu = any_spec.nu
    assert abs(eigenvalue_check(omega(3), any_spec, ps) + nu) < 1e-10
    assert abs(eigenvalue_check(omega(1) + omega(2), any_spec, ps) + nu) < 1e-10
    assert eigenvalue_check(build_poisson_pair(any_spec).j1_hat, any_spec, ps) is None


def test_eigenvalue_universality(spec, grid, rng):
    for _ in range(10):
        a, b, c = rng.normal(size=3)
        lam = eigenvalue_check(one_form(a, b, c), spec, grid)
        assert lam is not None and abs(lam + spec.nu) < 1e-10


def test_eigenvalue_needs_nonvanishing_form(spec, grid):
    with pytest.raises(ValueError):
        eigenvalue_check(one_form(0.0, 0.0, 0.0), spec, grid)


def test_pair_is_exact_differential(any_spec):
    ps = any_spec.standard_grid()
    p = build_poisson_pair(any_spec)
    nu = any_spec.nu
    assert max_abs(p.J1 - exterior_d(zero_form(0.5 * nu * (PHI + PSI)), any_spec), ps) < TOL
    assert max_abs(p.J2 - exterior_d(zero_form(0.5 * nu * (PHI - PSI)), any_spec), ps) < TOL
    for J in (p.J1, p.J2):
        assert max_abs(exterior_d(J, any_spec), ps) < TOL


def test_pair_displays(any_spec):
    ps = any_spec.standard_grid()
    nu = any_spec.nu
    p = build_poisson_pair(any_spec)
    s, c = sc.sin(nu * THETA), sc.cos(nu * THETA)
    sp, cp = sc.sin(nu * PSI), sc.cos(nu * PSI)
    h = 0.5 * nu * THETA
    J1 = one_form(sp / s * (1 - c), cp / s * (1 - c), 1.0) * (0.5 * nu)
    assert max_abs(p.J1 - J1, ps) < TOL
    j1 = one_form(sp * sc.sin(h), cp * sc.sin(h), sc.cos(h))
    j2 = one_form(sp * sc.cos(h), cp * sc.cos(h), -sc.sin(h))
    assert max_abs(p.j1_hat - j1, ps) < TOL
    assert max_abs(p.j2_hat - j2, ps) < TOL


def test_unit_sections_are_orthonormal(any_spec):
    ps = any_spec.standard_grid()
    p = build_poisson_pair(any_spec)
    for j in (p.j1_hat, p.j2_hat):
        assert np.max(np.abs(form_norm(j).values(ps) - 1.0)) < 1e-10
    dot = sum(a * b for a, b in zip(p.j1_hat.coeffs, p.j2_hat.coeffs))
    assert np.max(np.abs(dot.values(ps))) < 1e-12
    # pointwise independence of J1, J2
    cross = form_norm(wedge(p.J1, p.J2)).values(ps)
    assert cross.min() > 0.1 * any_spec.nu ** 2


def test_jacobi(any_spec):
    ps = any_spec.standard_grid()
    p = build_poisson_pair(any_spec)
    for J in (p.J1, p.J2, p.j1_hat, p.j2_hat):
        assert jacobi_check(J, any_spec, ps) < TOL
    assert jacobi_check(omega(3), any_spec, ps) == pytest.approx(any_spec.nu, rel=1e-12)


def test_exactness_consistency(spec, grid, rng):
    for _ in range(20):
        f = random_trig_field(rng, spec, n_terms=2)
        assert jacobi_check(exterior_d(zero_form(f), spec), spec, grid) < TOL


def test_compatibility(any_spec):
    ps = any_spec.standard_grid()
    p = build_poisson_pair(any_spec)
    assert compatibility_check(p.J1, p.J2, any_spec, ps) < TOL
    assert compatibility_check(p.j1_hat, p.j2_hat, any_spec, ps) > 0.1 * any_spec.nu
    assert compatibility_check(p.j1_hat, p.j1_hat, any_spec, ps) < TOL


def test_unit_section_compatibility_closed_form(spec, grid):
    # j1^dj2 + j2^dj1 = (nu / sin(nu theta)) w1^w2^w3
    p = build_poisson_pair(spec)
    lhs = wedge(p.j1_hat, exterior_d(p.j2_hat, spec)) + wedge(p.j2_hat, exterior_d(p.j1_hat, spec))
    assert max_abs(lhs.coeffs[0] - spec.nu / sc.sin(spec.nu * THETA), grid) < TOL


def _display_gammas(nu, t1, t2):
    h = 0.5 * nu * THETA
    sp, cp = sc.sin(nu * PSI), sc.cos(nu * PSI)
    g1 = one_form(sc.tan(h) * (-0.5 * nu * cp + t1 * sp),
                  sc.tan(h) * (0.5 * nu * sp + t1 * cp), t1)
    g2 = one_form(sc.cot(h) * (0.5 * nu * cp - t2 * sp),
                  sc.cot(h) * (-0.5 * nu * sp - t2 * cp), t2)
    return g1, g2


@pytest.mark.parametrize("t1,t2", [(0.0, 0.0), (5.0, -3.0), (0.25, 1.5)])
def test_connections_match_displays(any_spec, t1, t2):
    ps = any_spec.standard_grid()
    p = build_poisson_pair(any_spec)
    e1, e2 = _display_gammas(any_spec.nu, t1, t2)
    s1 = solve_connection(p.j1_hat, t1, any_spec, points=ps)
    s2 = solve_connection(p.j2_hat, t2, any_spec, points=ps)
    assert s1.residual < TOL and s2.residual < TOL
    assert max_abs(s1.gamma - e1, ps) < TOL
    assert max_abs(s2.gamma - e2, ps) < TOL


def test_connection_with_field_gauge(spec, grid):
    p = build_poisson_pair(spec)
    t1, t2 = paper_gauge(spec)
    e1, e2 = _display_gammas(spec.nu, t1, t2)
    assert max_abs(solve_connection(p.j1_hat, t1, spec, points=grid).gamma - e1, grid) < TOL
    assert max_abs(solve_connection(p.j2_hat, t2, spec, points=grid).gamma - e2, grid) < TOL


def test_gauge_freedom_is_along_j(spec, grid, rng):
    p = build_poisson_pair(spec)
    for j in (p.j1_hat, p.j2_hat):
        t, t2 = random_trig_field(rng, spec), random_trig_field(rng, spec)
        diff = (solve_connection(j, t, spec, points=grid).gamma
                - solve_connection(j, t2, spec, points=grid).gamma)
        assert max_abs(wedge(diff, j), grid) < TOL


def test_inconsistent_system_raises(spec, grid):
    # w3 fails Jacobi, so d w3 = G ^ w3 has no solution
    with pytest.raises(InconsistentSystemError):
        solve_connection(omega(1) + omega(3) * 0.5, 0.0, spec, pin=0, points=grid)


def test_ill_conditioned_pin_raises(spec, grid):
    # pinning the w1 coefficient of j = w3 leaves a singular pointwise system
    with pytest.raises(IllConditionedError):
        solve_connection(omega(3), 0.0, spec, pin=0, points=grid)


def test_gauge_presets(spec, grid):
    t1, t2 = paper_gauge(spec)
    h = 0.5 * spec.nu * grid.theta
    np.testing.assert_allclose(t1.values(grid), np.sin(h))
    np.testing.assert_allclose(t2.values(grid), 1 / np.sin(h))
    assert [t.const for t in zero_gauge()] == [0.0, 0.0]
    assert [t.const for t in constant_gauge(2, -1)] == [2.0, -1.0]
