"""Scalar fields on the (phi, theta, psi) chart with exact first derivatives.

Derivatives are propagated by forward-mode dual numbers carrying a fixed
three-slot gradient.  Dual components may themselves be duals, which is how
derivatives of derivative fields (``frame_derivative`` of a
``frame_derivative``) stay exact: each level of nesting differentiates the
level below it.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Callable

import numpy as np

from .errors import EvaluationError

if TYPE_CHECKING:
    from .chart import FrameSpec

DENOMINATOR_FLOOR = 1e-14


def real_part(x):
    """Strip every dual level and return the underlying float/array."""
    while isinstance(x, Dual3):
        x = x.value
    return x


class Dual3:
    """``value + grad . (d_phi, d_theta, d_psi)`` with a 3-slot gradient."""

    __slots__ = ("value", "grad")
    __array_ufunc__ = None  # make ndarray operators defer to us

    def __init__(self, value, grad=(0.0, 0.0, 0.0)):
        self.value = value
        self.grad = tuple(grad)

    @classmethod
    def constant(cls, value) -> "Dual3":
        return cls(value, (0.0, 0.0, 0.0))

    @property
    def d_phi(self):
        return self.grad[0]

    @property
    def d_theta(self):
        return self.grad[1]

    @property
    def d_psi(self):
        return self.grad[2]

    def __repr__(self) -> str:
        return f"Dual3({self.value!r}, {self.grad!r})"

    def __neg__(self) -> "Dual3":
        return Dual3(-self.value, tuple(-g for g in self.grad))

    def __pos__(self) -> "Dual3":
        return self

    def __add__(self, other) -> "Dual3":
        if isinstance(other, Dual3):
            return Dual3(self.value + other.value,
                         tuple(a + b for a, b in zip(self.grad, other.grad)))
        return Dual3(self.value + other, self.grad)

    __radd__ = __add__

    def __sub__(self, other) -> "Dual3":
        if isinstance(other, Dual3):
            return Dual3(self.value - other.value,
                         tuple(a - b for a, b in zip(self.grad, other.grad)))
        return Dual3(self.value - other, self.grad)

    def __rsub__(self, other) -> "Dual3":
        return Dual3(other - self.value, tuple(-g for g in self.grad))

    def __mul__(self, other) -> "Dual3":
        if isinstance(other, Dual3):
            u, v = self.value, other.value
            return Dual3(u * v, tuple(a * v + u * b
                                      for a, b in zip(self.grad, other.grad)))
        return Dual3(self.value * other, tuple(g * other for g in self.grad))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Dual3":
        if isinstance(other, Dual3):
            _check_denominator(other)
            q = self.value / other.value
            return Dual3(q, tuple((a - q * b) / other.value
                                  for a, b in zip(self.grad, other.grad)))
        _check_denominator(other)
        return Dual3(self.value / other, tuple(g / other for g in self.grad))

    def __rtruediv__(self, other) -> "Dual3":
        _check_denominator(self)
        q = other / self.value
        return Dual3(q, tuple(-q * g / self.value for g in self.grad))

    def __pow__(self, n) -> "Dual3":
        if isinstance(n, Dual3):
            raise TypeError("dual exponents are not supported")
        if n == 0:
            return Dual3.constant(self.value * 0 + 1.0)
        if n == 1:
            return self
        if n == 2:
            return self * self
        if n < 0 or not float(n).is_integer():
            _check_denominator(self)
        outer = n * self.value ** (n - 1)
        return Dual3(self.value ** n, tuple(outer * g for g in self.grad))


def _check_denominator(x) -> None:
    r = np.abs(real_part(x))
    if np.any(r < DENOMINATOR_FLOOR):
        raise EvaluationError(
            f"denominator magnitude below {DENOMINATOR_FLOOR:g} "
            f"(min |denominator| = {np.min(r):.3e})")


def _unary(x, f, df):
    if isinstance(x, Dual3):
        outer = df(x.value)
        return Dual3(f(x.value), tuple(outer * g for g in x.grad))
    return f(x)


def _cos(x):
    if isinstance(x, Dual3):
        return _unary(x, _cos, lambda v: -_sin(v))
    return np.cos(x)


def _sin(x):
    if isinstance(x, Dual3):
        return _unary(x, _sin, _cos)
    return np.sin(x)


def _sqrt(x):
    if isinstance(x, Dual3):
        root = _sqrt(x.value)
        _check_denominator(root)
        return Dual3(root, tuple(g / (2.0 * root) for g in x.grad))
    if np.any(np.asarray(x) < 0):
        raise EvaluationError("square root of a negative value")
    return np.sqrt(x)


# ---------------------------------------------------------------------------
# Point sets


class PointSet:
    """A batch of chart points at which fields are evaluated.

    Coordinates are arrays (or, for a lifted set, duals over the parent's
    coordinates).  Each set memoizes field evaluations, so a shared
    subexpression is computed once per set; create a fresh set per batch.
    """

    def __init__(self, phi, theta, psi, parent: "PointSet | None" = None):
        self.phi, self.theta, self.psi = phi, theta, psi
        self.parent = parent
        self._cache: dict[int, tuple] = {}
        self._lifted: PointSet | None = None

    @classmethod
    def from_arrays(cls, phi, theta, psi) -> "PointSet":
        phi, theta, psi = np.broadcast_arrays(
            *(np.asarray(a, dtype=float) for a in (phi, theta, psi)))
        return cls(phi, theta, psi)

    @property
    def root(self) -> "PointSet":
        p = self
        while p.parent is not None:
            p = p.parent
        return p

    @property
    def shape(self):
        return np.shape(real_part(self.theta))

    def __len__(self) -> int:
        return int(np.prod(self.shape))

    def coordinate(self, axis: int) -> Dual3:
        seed = [0.0, 0.0, 0.0]
        seed[axis] = 1.0
        return Dual3((self.phi, self.theta, self.psi)[axis], seed)

    def lifted(self) -> "PointSet":
        """Point set whose coordinates are duals over this set's coordinates."""
        if self._lifted is None:
            self._lifted = PointSet(self.coordinate(0), self.coordinate(1),
                                    self.coordinate(2), parent=self)
        return self._lifted


# ---------------------------------------------------------------------------
# Scalar fields


def as_field(x) -> "ScalarField":
    """Promote a number to a constant field; fields pass through."""
    if isinstance(x, ScalarField):
        return x
    if x == 0:
        return ZERO
    if x == 1:
        return ONE
    return ScalarField.constant(x)


_as_field = as_field


class ScalarField:
    """A chart function ``PointSet -> Dual3``, composed lazily."""

    __slots__ = ("_fn", "name", "const")
    __array_ufunc__ = None

    def __init__(self, fn: Callable[[PointSet], Dual3], name: str = "field",
                 const: float | None = None):
        self._fn = fn
        self.name = name
        self.const = const  # set only for constant fields

    def __repr__(self) -> str:
        return f"ScalarField({self.name})"

    # -- evaluation ---------------------------------------------------------

    def evaluate(self, points) -> Dual3:
        if not isinstance(points, PointSet):
            points = _to_pointset(points)
        key = id(self)
        hit = points._cache.get(key)
        if hit is not None:
            return hit[1]
        out = self._fn(points)
        if not isinstance(out, Dual3):
            out = Dual3.constant(out)
        points._cache[key] = (self, out)
        return out

    __call__ = evaluate

    def values(self, points) -> np.ndarray:
        """Plain values at a root point set (or ChartPoint)."""
        return np.broadcast_to(real_part(self.evaluate(points)),
                               _shape_of(points)).copy()

    def gradient(self, points) -> np.ndarray:
        """Coordinate gradient, shape ``(3,) + points.shape``."""
        d = self.evaluate(points)
        shape = _shape_of(points)
        return np.stack([np.broadcast_to(real_part(g), shape) for g in d.grad])

    def named(self, name: str) -> "ScalarField":
        return ScalarField(self.evaluate, name=name)

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c: float) -> "ScalarField":
        c = float(c)
        return cls(lambda p: Dual3.constant(c), name=repr(c), const=c)

    @classmethod
    def coordinate(cls, axis: int) -> "ScalarField":
        return cls(lambda p: p.coordinate(axis), name=("phi", "theta", "psi")[axis])

    def frozen(self) -> "ScalarField":
        """Same values, every derivative level set to zero.

        Models a pointwise parameter: d treats it as a constant.
        """
        def fn(p: PointSet) -> Dual3:
            return Dual3.constant(real_part(self.evaluate(p.root)))
        return ScalarField(fn, name="frozen")

    # -- algebra ------------------------------------------------------------

    def _binary(self, other, op, sym, reflect=False):
        other = as_field(other)
        a, b = (other, self) if reflect else (self, other)
        if a.const is not None and b.const is not None:
            if sym == "/" and b.const == 0:
                raise EvaluationError("division by the zero field")
            return ScalarField.constant(op(a.const, b.const))
        if sym == "+":
            if a.const == 0:
                return b
            if b.const == 0:
                return a
        elif sym == "-":
            if b.const == 0:
                return a
        elif sym == "*":
            if a.const == 0 or b.const == 0:
                return ZERO
            if a.const == 1:
                return b
            if b.const == 1:
                return a
        elif sym == "/" and b.const == 1:
            return a
        return ScalarField(lambda p: op(a.evaluate(p), b.evaluate(p)), name=sym)

    def __add__(self, other):
        return self._binary(other, lambda x, y: x + y, "+")

    def __radd__(self, other):
        return self._binary(other, lambda x, y: x + y, "+", reflect=True)

    def __sub__(self, other):
        return self._binary(other, lambda x, y: x - y, "-")

    def __rsub__(self, other):
        return self._binary(other, lambda x, y: x - y, "-", reflect=True)

    def __mul__(self, other):
        return self._binary(other, lambda x, y: x * y, "*")

    def __rmul__(self, other):
        return self._binary(other, lambda x, y: x * y, "*", reflect=True)

    def __truediv__(self, other):
        return self._binary(other, lambda x, y: x / y, "/")

    def __rtruediv__(self, other):
        return self._binary(other, lambda x, y: x / y, "/", reflect=True)

    def __neg__(self):
        if self.const is not None:
            return ScalarField.constant(-self.const)
        return ScalarField(lambda p: -self.evaluate(p), name="neg")

    def __pow__(self, n):
        return ScalarField(lambda p: self.evaluate(p) ** n, name=f"pow{n}")


def _to_pointset(points) -> PointSet:
    # ChartPoint or anything with phi/theta/psi attributes
    return PointSet.from_arrays(points.phi, points.theta, points.psi)


def _shape_of(points):
    if isinstance(points, PointSet):
        return points.shape
    return np.shape(points.theta)


def _lift_unary(x, base, name):
    if isinstance(x, ScalarField):
        return ScalarField(lambda p: base(x.evaluate(p)), name=name)
    return base(x)


def sin(x):
    return _lift_unary(x, _sin, "sin")


def cos(x):
    return _lift_unary(x, _cos, "cos")


def tan(x):
    return _lift_unary(x, lambda v: _sin(v) / _cos(v), "tan")


def cot(x):
    return _lift_unary(x, lambda v: _cos(v) / _sin(v), "cot")


def sec(x):
    return _lift_unary(x, lambda v: 1.0 / _cos(v), "sec")


def csc(x):
    return _lift_unary(x, lambda v: 1.0 / _sin(v), "csc")


def sqrt(x):
    return _lift_unary(x, _sqrt, "sqrt")


PHI = ScalarField.coordinate(0)
THETA = ScalarField.coordinate(1)
PSI = ScalarField.coordinate(2)
ZERO = ScalarField.constant(0.0)
ONE = ScalarField.constant(1.0)


def frame_derivative(f: ScalarField, k: int, spec: "FrameSpec") -> ScalarField:
    """Coefficient of the k-th coframe element (k = 1, 2, 3) in ``df``.

    ``e_k(f) = sum_mu F[mu][k] d_mu f`` where ``F`` is the frame matrix.  The
    coordinate gradient is read from ``f`` evaluated on the lifted point set,
    so the result is itself differentiable.
    """
    if k not in (1, 2, 3):
        raise ValueError(f"frame index must be 1, 2 or 3, got {k}")
    f = as_field(f)
    if f.const is not None:
        return ZERO
    column = [spec.frame_matrix[mu][k - 1] for mu in range(3)]

    def fn(p: PointSet) -> Dual3:
        grad = f.evaluate(p.lifted()).grad
        total = None
        for mu in range(3):
            term = column[mu].evaluate(p) * grad[mu]
            total = term if total is None else total + term
        return total

    return ScalarField(fn, name=f"e{k}")
