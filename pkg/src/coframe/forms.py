"""Exterior algebra over the orthonormal coframe ``w1, w2, w3``.

A degree-k form stores one coefficient field per element of the wedge
basis of that degree:

    0: 1
    1: w1, w2, w3
    2: w2^w3, w3^w1, w1^w2   (cyclic, so *w^k is the k-th unit vector)
    3: w1^w2^w3

All sign bookkeeping goes through :func:`_canonical`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import scalar as sc
from .errors import DegreeError
from .scalar import ScalarField, as_field, frame_derivative

BASIS: dict[int, tuple[tuple[int, ...], ...]] = {
    0: ((),),
    1: ((0,), (1,), (2,)),
    2: ((1, 2), (2, 0), (0, 1)),
    3: ((0, 1, 2),),
}


def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Parity of the permutation sorting ``idx`` (0 if an index repeats)."""
    if len(set(idx)) < len(idx):
        return 0, ()
    sign, arr = 1, list(idx)
    for i in range(len(arr)):
        for j in range(len(arr) - 1 - i):
            if arr[j] > arr[j + 1]:
                arr[j], arr[j + 1] = arr[j + 1], arr[j]
                sign = -sign
    return sign, tuple(arr)


@lru_cache(maxsize=None)
def _canonical(idx: tuple[int, ...]) -> tuple[int, int]:
    """``w^idx = sign * BASIS[len(idx)][position]``; sign 0 for repeated indices."""
    sign, key = _sort_sign(idx)
    if sign == 0:
        return 0, -1
    for pos, b in enumerate(BASIS[len(idx)]):
        bsign, bkey = _sort_sign(b)
        if bkey == key:
            return sign * bsign, pos
    raise AssertionError(idx)


@lru_cache(maxsize=None)
def _product_table(da: int, db: int) -> tuple[tuple[int, int, int, int], ...]:
    rows = []
    for (i, ei), (j, ej) in product(enumerate(BASIS[da]), enumerate(BASIS[db])):
        sign, pos = _canonical(ei + ej)
        if sign:
            rows.append((i, j, pos, sign))
    return tuple(rows)


def _accumulate(terms: list[list], n: int) -> tuple[ScalarField, ...]:
    out = []
    for k in range(n):
        total = sc.ZERO
        for t in terms[k]:
            total = total + t
        out.append(total)
    return tuple(out)


@dataclass(frozen=True, eq=False)
class Form:
    """An immutable differential form of degree 0..3."""

    degree: int
    coeffs: tuple[ScalarField, ...]

    def __post_init__(self):
        if self.degree not in BASIS:
            raise DegreeError(f"degree must be 0..3, got {self.degree}")
        coeffs = tuple(as_field(c) for c in self.coeffs)
        if len(coeffs) != len(BASIS[self.degree]):
            raise ValueError(
                f"degree-{self.degree} form needs {len(BASIS[self.degree])} "
                f"coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, degree: int) -> "Form":
        return cls(degree, (sc.ZERO,) * len(BASIS[degree]))

    def __repr__(self) -> str:
        return f"Form(degree={self.degree}, coeffs={[c.name for c in self.coeffs]})"

    def __getitem__(self, i: int) -> ScalarField:
        return self.coeffs[i]

    def _same_degree(self, other: "Form") -> None:
        if not isinstance(other, Form) or other.degree != self.degree:
            raise DegreeError("forms of different degree cannot be added")

    def __add__(self, other: "Form") -> "Form":
        self._same_degree(other)
        return Form(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Form") -> "Form":
        self._same_degree(other)
        return Form(self.degree, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Form":
        return Form(self.degree, tuple(-a for a in self.coeffs))

    def __mul__(self, f) -> "Form":
        if isinstance(f, Form):
            return wedge(self, f)
        return Form(self.degree, tuple(a * f for a in self.coeffs))

    def __rmul__(self, f) -> "Form":
        return Form(self.degree, tuple(f * a for a in self.coeffs))

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def evaluate(self, points) -> np.ndarray:
        """Coefficient values, shape ``(n_coeffs,) + points.shape``."""
        return np.stack([c.values(points) for c in self.coeffs])


def zero_form(f) -> Form:
    return Form(0, (f,))


def one_form(a1, a2, a3) -> Form:
    return Form(1, (a1, a2, a3))


def two_form(b23, b31, b12) -> Form:
    return Form(2, (b23, b31, b12))


def three_form(f) -> Form:
    return Form(3, (f,))


def omega(k: int) -> Form:
    """Basis one-form ``w^k`` for k = 1, 2, 3."""
    c = [0.0, 0.0, 0.0]
    c[k - 1] = 1.0
    return one_form(*c)


def volume_form() -> Form:
    return three_form(1.0)


def wedge(a: Form, b: Form) -> Form:
    da, db = a.degree, b.degree
    if da + db > 3:
        raise DegreeError(f"wedge of degrees {da} and {db} exceeds 3")
    n = len(BASIS[da + db])
    terms: list[list] = [[] for _ in range(n)]
    for i, j, pos, sign in _product_table(da, db):
        x, y = a.coeffs[i], b.coeffs[j]
        if x.const == 0 or y.const == 0:
            continue
        terms[pos].append(x * y if sign > 0 else -(x * y))
    return Form(da + db, _accumulate(terms, n))


@lru_cache(maxsize=None)
def _basis_derivatives(constants_key: bytes, degree: int) -> np.ndarray:
    """``d`` of each degree-k basis element as constant coefficients, shape (n_k, n_{k+1})."""
    c = np.frombuffer(constants_key).reshape(3, 3, 3)
    # dw^k = -sum over cyclic pairs (i, j) of C^k_ij w^i^w^j
    dw = np.array([[-c[k][i][j] for (i, j) in BASIS[2]] for k in range(3)])
    if degree == 0:
        return np.zeros((1, 3))
    if degree == 1:
        return dw
    if degree == 2:
        out = np.zeros((3, 1))
        for pos, (i, j) in enumerate(BASIS[2]):
            # d(w^i ^ w^j) = dw^i ^ w^j - w^i ^ dw^j
            for p2, q1, p3, sign in _product_table(2, 1):
                if q1 == j:
                    out[pos, p3] += sign * dw[i][p2]
            for q1, p2, p3, sign in _product_table(1, 2):
                if q1 == i:
                    out[pos, p3] -= sign * dw[j][p2]
        return out
    raise DegreeError("exterior derivative of a 3-form on a 3-manifold is zero")


def exterior_d(a: Form, spec) -> Form:
    """Exterior derivative ``d(f w^I) = df ^ w^I + f d(w^I)``.

    Coefficient derivatives come from :func:`frame_derivative` (exact, dual
    numbers); basis derivatives from the structure constants of ``spec``.
    """
    k = a.degree
    if k > 2:
        raise DegreeError(f"exterior_d expects degree <= 2, got {k}")
    n = len(BASIS[k + 1])
    terms: list[list] = [[] for _ in range(n)]
    dbasis = _basis_derivatives(
        np.ascontiguousarray(spec.structure_constants, dtype=float).tobytes(), k)
    for idx, f in enumerate(a.coeffs):
        if f.const == 0:
            continue
        if f.const is None:
            df = [frame_derivative(f, m + 1, spec) for m in range(3)]
            for m, j, pos, sign in _product_table(1, k):
                if j == idx:
                    terms[pos].append(df[m] if sign > 0 else -df[m])
        for pos in range(n):
            c = dbasis[idx, pos]
            if c != 0:
                terms[pos].append(f * float(c))
    return Form(k + 1, _accumulate(terms, n))


def hodge_star(a: Form, spec=None) -> Form:
    """Hodge star for the coframe metric; ``*(w1^w2^w3) = orientation``."""
    k = a.degree
    orientation = 1 if spec is None else spec.orientation
    out = [sc.ZERO] * len(BASIS[3 - k])
    for i, f in enumerate(a.coeffs):
        for j in range(len(BASIS[3 - k])):
            sign, _ = _canonical(BASIS[k][i] + BASIS[3 - k][j])
            if sign:
                out[j] = out[j] + f * float(sign * orientation)
    return Form(3 - k, tuple(out))


def interior_product(v, a: Form) -> Form:
    """Contraction ``i_v a`` with ``v`` given by its components on the frame."""
    k = a.degree
    if k < 1:
        raise DegreeError("interior product needs a form of degree >= 1")
    v = [as_field(x) for x in v]
    n = len(BASIS[k - 1])
    terms: list[list] = [[] for _ in range(n)]
    for idx, f in enumerate(a.coeffs):
        if f.const == 0:
            continue
        elem = BASIS[k][idx]
        for m, i in enumerate(elem):
            rest = elem[:m] + elem[m + 1:]
            sign, pos = _canonical(rest)
            sign *= (-1) ** m
            t = v[i] * f
            terms[pos].append(t if sign > 0 else -t)
    return Form(k - 1, _accumulate(terms, n))


def pullback_top(a: Form, spec) -> ScalarField:
    """Density of a 3-form against ``dphi dtheta dpsi`` on the oriented sphere.

    Equals the ``w1^w2^w3`` coefficient times ``sin(nu theta)``; the sign of
    the chart orientation is absorbed because the sphere is oriented by the
    coframe.
    """
    if a.degree != 3:
        raise DegreeError(f"pullback_top expects a 3-form, got degree {a.degree}")
    return a.coeffs[0] * spec.jacobian


def form_norm(a: Form) -> ScalarField:
    """Pointwise norm; the coframe is orthonormal so this is Euclidean."""
    total = sc.ZERO
    for c in a.coeffs:
        total = total + c * c
    return sc.sqrt(total)


def inner(a: Form, b: Form) -> ScalarField:
    """Pointwise inner product of two forms of equal degree."""
    if a.degree != b.degree:
        raise DegreeError("inner product needs forms of equal degree")
    total = sc.ZERO
    for x, y in zip(a.coeffs, b.coeffs):
        total = total + x * y
    return total


def max_abs(a: Form | ScalarField, points) -> float:
    """Largest absolute coefficient value over a point set."""
    vals = a.evaluate(points) if isinstance(a, Form) else a.values(points)
    return float(np.max(np.abs(vals))) if np.size(vals) else 0.0
