import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coframe import scalar as sc
from coframe.errors import EvaluationError
from coframe.scalar import PHI, PSI, THETA, Dual3, PointSet, ScalarField, frame_derivative

from conftest import interior_points

finite = st.floats(-10, 10, allow_nan=False)


def dual(v, g):
    return Dual3(v, g)


@settings(max_examples=60, deadline=None)
@given(finite, finite, st.tuples(finite, finite, finite), st.tuples(finite, finite, finite))
def test_leibniz_rule_is_exact(u, v, gu, gv):
    a, b = dual(u, gu), dual(v, gv)
    prod = a * b
    for k in range(3):
        assert prod.grad[k] == gu[k] * v + u * gv[k]


@settings(max_examples=60, deadline=None)
@given(finite)
def test_constant_has_zero_gradient(c):
    assert Dual3.constant(c).grad == (0.0, 0.0, 0.0)
    ps = PointSet.from_arrays([0.3], [1.0], [2.0])
    assert np.all(ScalarField.constant(c).gradient(ps) == 0.0)


def test_quotient_rule():
    a, b = Dual3(3.0, (1.0, 2.0, 0.0)), Dual3(2.0, (0.5, 0.0, 1.0))
    q = a / b
    assert q.value == 1.5
    np.testing.assert_allclose(q.grad, [(1.0 * 2 - 3 * 0.5) / 4, 1.0, -0.75])


def test_division_by_tiny_denominator_raises():
    with pytest.raises(EvaluationError):
        Dual3(1.0) / Dual3(1e-15)
    ps = PointSet.from_arrays([0.0], [1.0], [0.0])
    with pytest.raises(EvaluationError):
        (ScalarField.constant(1.0) / sc.sin(PHI)).values(ps)


def _named_fields(nu):
    h = 0.5 * nu * THETA
    return {
        "sin(nu psi)": sc.sin(nu * PSI),
        "cos(nu psi)": sc.cos(nu * PSI),
        "sin(h)": sc.sin(h),
        "cos(h)": sc.cos(h),
        "tan(h)": sc.tan(h),
        "cot(h)": sc.cot(h),
        "sec(h)": sc.sec(h),
        "csc(h)": sc.csc(h),
        "cot(nu theta)": sc.cot(nu * THETA),
        "1/sin(nu theta)": 1.0 / sc.sin(nu * THETA),
        "mixed": sc.sqrt(2.0 + sc.sin(nu * PHI) * sc.cos(nu * PSI)) * THETA ** 2,
    }


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
def test_duals_match_central_differences(nu, rng):
    from coframe import s3_frame
    spec = s3_frame(nu)
    ps = interior_points(spec, 500, rng, margin=0.1)
    coords = np.stack([ps.phi, ps.theta, ps.psi])
    step = 1e-6
    for name, f in _named_fields(nu).items():
        grad = f.gradient(ps)
        for axis in range(3):
            hi, lo = coords.copy(), coords.copy()
            hi[axis] += step
            lo[axis] -= step
            fd = (f.values(PointSet.from_arrays(*hi)) - f.values(PointSet.from_arrays(*lo))) / (2 * step)
            scale = np.maximum(1.0, np.abs(grad[axis]))
            err = np.max(np.abs(fd - grad[axis]) / scale)
            assert err < 1e-6, (name, axis, err)


def test_trig_identities(grid):
    x = sc.sin(PHI) * THETA + PSI
    one = sc.sin(x) * sc.sin(x) + sc.cos(x) * sc.cos(x)
    np.testing.assert_allclose(one.values(grid), 1.0, atol=1e-12)
    np.testing.assert_allclose(one.gradient(grid), 0.0, atol=1e-12)
    h = 0.5 * THETA
    np.testing.assert_allclose((sc.tan(h) * sc.cot(h)).values(grid), 1.0, atol=1e-12)


def test_derivative_of_sine_near_pole():
    nu = 1.7
    ps = PointSet.from_arrays([0.0], [1e-7], [0.0])
    assert sc.sin(nu * THETA).gradient(ps)[1][0] == pytest.approx(nu, rel=1e-12)


def test_constant_folding_and_simplification():
    assert (ScalarField.constant(2.0) * 3.0).const == 6.0
    assert (THETA * 0).const == 0.0
    assert (THETA * 1) is THETA
    assert (THETA + 0) is THETA


def test_frozen_field_has_no_derivatives(spec, grid):
    f = sc.sin(spec.nu * THETA) * PSI
    fr = f.frozen()
    np.testing.assert_array_equal(fr.values(grid), f.values(grid))
    assert np.all(fr.gradient(grid) == 0.0)
    for k in (1, 2, 3):
        assert np.all(frame_derivative(fr, k, spec).values(grid) == 0.0)


def test_frame_derivative_of_psi(any_spec):
    spec, nu = any_spec, any_spec.nu
    ps = spec.standard_grid()
    f = nu * PSI
    cot = sc.cot(nu * THETA)
    expected = (-sc.sin(nu * PSI) * cot * nu, -sc.cos(nu * PSI) * cot * nu, sc.ONE * nu)
    for k in (1, 2, 3):
        diff = frame_derivative(f, k, spec) - expected[k - 1]
        assert np.max(np.abs(diff.values(ps))) < 1e-9


def test_frame_derivative_of_constant_is_zero(spec, grid):
    for k in (1, 2, 3):
        assert frame_derivative(ScalarField.constant(4.2), k, spec).const == 0.0


def test_frame_derivative_of_first_hamiltonian_gives_j1(any_spec):
    spec, nu = any_spec, any_spec.nu
    ps = spec.standard_grid()
    s, c = sc.sin(nu * THETA), sc.cos(nu * THETA)
    sp, cp = sc.sin(nu * PSI), sc.cos(nu * PSI)
    f = 0.5 * nu * (PHI + PSI)
    expected = (0.5 * nu * sp / s * (1 - c), 0.5 * nu * cp / s * (1 - c), sc.ONE * (0.5 * nu))
    for k in (1, 2, 3):
        assert np.max(np.abs((frame_derivative(f, k, spec) - expected[k - 1]).values(ps))) < 1e-9


def test_frame_derivative_is_linear(spec, grid):
    f = sc.sin(PHI) * sc.cos(THETA)
    g = PSI * sc.sin(THETA)
    a, b = 2.5, -0.75
    for k in (1, 2, 3):
        lhs = frame_derivative(a * f + b * g, k, spec).values(grid)
        rhs = a * frame_derivative(f, k, spec).values(grid) + b * frame_derivative(g, k, spec).values(grid)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_frame_derivative_rejects_bad_index(spec):
    with pytest.raises(ValueError):
        frame_derivative(THETA, 4, spec)


def test_nested_duals_give_mixed_partials():
    # d/dtheta of (d/dphi of sin(phi) theta^2) = 2 theta cos(phi)
    ps = PointSet.from_arrays([0.4], [1.1], [0.0])
    f = sc.sin(PHI) * THETA * THETA
    inner = f.evaluate(ps.lifted()).grad[0]  # dual over ps
    assert inner.grad[1][0] == pytest.approx(2 * 1.1 * np.cos(0.4), rel=1e-14)


def test_memoization_is_per_point_set(spec):
    calls = []

    def fn(p):
        calls.append(1)
        return p.coordinate(1)
    f = ScalarField(fn)
    ps = spec.standard_grid()
    f.values(ps)
    f.values(ps)
    assert len(calls) == 1
    f.values(spec.standard_grid())
    assert len(calls) == 2
