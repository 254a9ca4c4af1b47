"""Points, lines and conics of the projective plane.

The *canonical conic* is ``x1^2 - 4*x0*x2``, the discriminant locus of the
point quadric ``x0*u^2 + x1*u*v + x2*v^2``. Its tangent line with parameter
``(u:v)`` has coefficients ``(u^2, u*v, v^2)`` and touches it at
``(v^2 : -2*u*v : u^2)``. Arbitrary smooth conics are moved into this frame with
:func:`canonical_frame`.
"""

from __future__ import annotations

import functools
import itertools
import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from poncelet_bundles.const import (
    DEFAULT_SEED,
    PARAMETRIZE_MAX_LINES,
    RANDOM_TRANSFORM_MAX_COND,
    RATIONAL_POINT_SEARCH_BOUND,
)
from poncelet_bundles.exceptions import (
    DegenerateConicError,
    DegenerateTransformError,
    RationalPointNotFoundError,
    UnsupportedOperationError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    P1Point,
    PlaneCurve,
    TernaryForm,
    solve_binary_quadratic,
)
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Matrix,
    Rows3,
    Scalar,
    Tolerance,
    Vector,
    adjugate3,
    backend_of,
    chordal_distance,
    coerce_all,
    cross3,
    det3,
    dot,
    magnitude,
    matmul3,
    matvec3,
    norm_inf,
    normalize_projective,
    proportional,
    rank,
    transpose3,
)

_LOGGER = logging.getLogger(__name__)


def _unit(index: int) -> Vector:
    return coerce_all([1 if j == index else 0 for j in range(3)])


def _homogeneous(values: Sequence[Any], what: str) -> Vector:
    if len(values) != 3:
        raise ValueError(f"{what} needs 3 homogeneous coordinates, got {len(values)}")
    coords = coerce_all(values)
    if all(c == 0 for c in coords):
        raise ValueError(f"{what} coordinates must not all vanish")
    return normalize_projective(coords)


# =============================================================================
# Points and lines
# =============================================================================


@dataclass(frozen=True)
class ProjPoint:
    """A point of the projective plane, stored normalized."""

    coords: Vector

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", _homogeneous(self.coords, "point"))

    @classmethod
    def of(cls, x0: Any, x1: Any, x2: Any) -> ProjPoint:
        return cls((x0, x1, x2))

    @classmethod
    def from_affine(cls, x: Any, y: Any) -> ProjPoint:
        """The point ``(1 : x : y)`` of the chart ``x0 != 0``."""
        return cls((1, x, y))

    @property
    def backend(self) -> Backend:
        return backend_of(*self.coords)

    def affine(
        self, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> tuple[Scalar, Scalar] | None:
        """Chart coordinates ``(x1/x0, x2/x0)``; None at infinity."""
        x0, x1, x2 = self.coords
        if self.backend is Backend.EXACT:
            at_infinity = x0 == 0
        else:
            at_infinity = magnitude(x0) <= tol.threshold(norm_inf(self.coords))
        if at_infinity:
            return None
        return (x1 / x0, x2 / x0)

    def is_real(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        if self.backend is Backend.EXACT:
            return True
        return all(abs(complex(c).imag) <= tol.certify for c in self.coords)

    def distance(self, other: ProjPoint) -> float:
        return chordal_distance(self.coords, other.coords)

    def proportional_to(
        self, other: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        return proportional(self.coords, other.coords, tol)


@dataclass(frozen=True)
class ProjLine:
    """A line ``a0*x0 + a1*x1 + a2*x2 = 0``, stored normalized."""

    coefficients: Vector

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "coefficients", _homogeneous(self.coefficients, "line")
        )

    @classmethod
    def of(cls, a0: Any, a1: Any, a2: Any) -> ProjLine:
        return cls((a0, a1, a2))

    @classmethod
    def through(cls, p: ProjPoint, q: ProjPoint) -> ProjLine:
        return cls(cross3(p.coords, q.coords))

    @property
    def backend(self) -> Backend:
        return backend_of(*self.coefficients)

    def meet(self, other: ProjLine) -> ProjPoint:
        return ProjPoint(cross3(self.coefficients, other.coefficients))

    def residual(self, point: ProjPoint) -> float:
        """Scale-free incidence residual ``|a.x| / (|a| |x|)``."""
        value = dot(self.coefficients, point.coords)
        return magnitude(value) / (norm_inf(self.coefficients) * norm_inf(point.coords))

    def contains(self, point: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        if backend_of(*self.coefficients, *point.coords) is Backend.EXACT:
            return dot(self.coefficients, point.coords) == 0
        return self.residual(point) <= tol.certify

    def distance(self, other: ProjLine) -> float:
        return chordal_distance(self.coefficients, other.coefficients)

    def proportional_to(
        self, other: ProjLine, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        return proportional(self.coefficients, other.coefficients, tol)

    def spanning_points(self) -> tuple[Vector, Vector]:
        """Two independent points on the line.

        Cross products with the two coordinate vectors other than the one
        of largest coefficient.
        """
        k = max(range(3), key=lambda i: magnitude(self.coefficients[i]))
        basis = [_unit(i) for i in range(3) if i != k]
        return (
            cross3(self.coefficients, basis[0]),
            cross3(self.coefficients, basis[1]),
        )


# =============================================================================
# Conics
# =============================================================================


@dataclass(frozen=True)
class Conic:
    """A conic ``x^T A x = 0`` given by a symmetric 3x3 matrix up to scale."""

    matrix: Rows3
    smooth: bool = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.matrix) != 3 or any(len(row) != 3 for row in self.matrix):
            raise ValueError("a conic needs a 3x3 matrix")
        flat = coerce_all([v for row in self.matrix for v in row])
        if all(v == 0 for v in flat):
            raise ValueError("the zero matrix does not define a conic")
        scale = norm_inf(flat)
        exact = backend_of(*flat) is Backend.EXACT
        limit = 0.0 if exact else DEFAULT_TOLERANCE.threshold(scale)
        for i, j in itertools.combinations(range(3), 2):
            if magnitude(flat[3 * i + j] - flat[3 * j + i]) > limit:
                raise ValueError(f"conic matrix is not symmetric at ({i}, {j})")
        flat = normalize_projective(flat)
        rows = (flat[0:3], flat[3:6], flat[6:9])
        object.__setattr__(self, "matrix", rows)
        det = det3(rows)
        smooth = det != 0 if exact else magnitude(det) > DEFAULT_TOLERANCE.rel_eps
        object.__setattr__(self, "smooth", smooth)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Any]]) -> Conic:
        return cls(tuple(tuple(row) for row in rows))  # type: ignore[arg-type]

    @classmethod
    def from_form(cls, form: TernaryForm) -> Conic:
        """Conic of a quadratic ternary form."""
        if form.degree != 2:
            raise ValueError(f"a conic needs a degree 2 form, got {form.degree}")
        c = form.coefficient
        a01 = c((1, 1, 0)) / 2
        a02 = c((1, 0, 1)) / 2
        a12 = c((0, 1, 1)) / 2
        return cls(
            (
                (c((2, 0, 0)), a01, a02),
                (a01, c((0, 2, 0)), a12),
                (a02, a12, c((0, 0, 2))),
            )
        )

    @property
    def backend(self) -> Backend:
        return backend_of(*self.matrix)

    def to_form(self) -> TernaryForm:
        a = self.matrix
        return TernaryForm.from_dict(
            2,
            {
                (2, 0, 0): a[0][0],
                (0, 2, 0): a[1][1],
                (0, 0, 2): a[2][2],
                (1, 1, 0): 2 * a[0][1],
                (1, 0, 1): 2 * a[0][2],
                (0, 1, 1): 2 * a[1][2],
            },
            self.backend,
        )

    def require_smooth(self) -> None:
        if not self.smooth:
            raise DegenerateConicError(f"conic {self.matrix} has zero determinant")

    def bilinear(self, p: Sequence[Scalar], q: Sequence[Scalar]) -> Scalar:
        return dot(p, matvec3(self.matrix, q))

    def evaluate(self, point: Sequence[Scalar]) -> Scalar:
        return self.bilinear(point, point)

    def residual(self, point: ProjPoint) -> float:
        """``|x^T A x|`` relative to ``|A| |x|^2``."""
        coords = point.coords
        return magnitude(self.evaluate(coords)) / (
            norm_inf([v for row in self.matrix for v in row]) * norm_inf(coords) ** 2
        )

    def contains(self, point: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        if backend_of(*self.matrix, *point.coords) is Backend.EXACT:
            return self.evaluate(point.coords) == 0
        return self.residual(point) <= tol.certify

    def polar(self, point: ProjPoint) -> ProjLine:
        """Polar line; the tangent line when the point is on the conic."""
        return ProjLine(matvec3(self.matrix, point.coords))

    def proportional_to(self, other: Conic, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        flat = [v for row in self.matrix for v in row]
        other_flat = [v for row in other.matrix for v in row]
        return proportional(flat, other_flat, tol)


CANONICAL_CONIC = Conic.from_rows([[0, 0, -2], [0, 1, 0], [-2, 0, 0]])


@dataclass(frozen=True)
class ConicParam:
    """A degree-2 map ``t -> (p0(t) : p1(t) : p2(t))`` onto a conic."""

    p0: BinaryForm
    p1: BinaryForm
    p2: BinaryForm
    seed: ProjPoint | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        forms = (self.p0, self.p1, self.p2)
        if any(p.degree != 2 for p in forms):
            raise ValueError("a conic parametrization needs three quadratic forms")
        if rank(Matrix.from_rows([p.coefficients for p in forms])) != 3:
            raise ValueError("parametrizing quadratics are linearly dependent")

    @property
    def forms(self) -> tuple[BinaryForm, BinaryForm, BinaryForm]:
        return (self.p0, self.p1, self.p2)

    @property
    def backend(self) -> Backend:
        return backend_of(*(p.coefficients for p in self.forms))

    def coefficient_rows(self) -> Rows3:
        """Rows are the p_i over the monomials ``(u^2, u*v, v^2)``."""
        return tuple(p.coefficients for p in self.forms)  # type: ignore[return-value]

    def point_at(self, t: P1Point) -> ProjPoint:
        return ProjPoint(tuple(p.at(t) for p in self.forms))

    def parameter_of(
        self, point: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> P1Point:
        """The parameter t with ``point_at(t)`` proportional to ``point``.

        The 2x2 minors ``x_i*p_j(t) - x_j*p_i(t)`` vanish exactly at that t;
        the largest of them is solved and the candidate matching the point
        is kept.
        """
        x = point.coords
        minors = [
            self.forms[j] * x[i] - self.forms[i] * x[j]
            for i, j in itertools.combinations(range(3), 2)
        ]
        best = max(minors, key=lambda m: m.norm())
        solved = solve_binary_quadratic(*best.coefficients, tol=tol)
        candidates = [root for root, _ in solved]
        return min(candidates, key=lambda t: self.point_at(t).distance(point))


# =============================================================================
# Duality, tangency and intersection
# =============================================================================


def dual_conic(c: Conic) -> Conic:
    """Adjugate conic; a line is tangent to ``c`` iff it lies on the result."""
    c.require_smooth()
    return Conic(adjugate3(c.matrix))


def tangent_line_at_parameter(t: P1Point) -> ProjLine:
    """Tangent line ``(u^2, u*v, v^2)`` to the canonical conic."""
    u, v = t.coords
    return ProjLine((u * u, u * v, v * v))


def point_at_parameter(t: P1Point) -> ProjPoint:
    """Point of tangency ``(v^2 : -2*u*v : u^2)`` on the canonical conic."""
    u, v = t.coords
    return ProjPoint((v * v, -2 * u * v, u * u))


def line_conic_intersection(
    line: ProjLine, c: Conic, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[tuple[ProjPoint, int]]:
    """Intersection points with multiplicities summing to 2.

    Raises:
        DegenerateConicError: The conic is singular.
        UnsupportedOperationError: Exact data with irrational intersections.

    """
    c.require_smooth()
    first, second = line.spanning_points()
    a = c.bilinear(first, first)
    b = 2 * c.bilinear(first, second)
    d = c.bilinear(second, second)
    result = []
    for root, multiplicity in solve_binary_quadratic(a, b, d, tol):
        u, v = root.coords
        point = tuple(u * p + v * q for p, q in zip(first, second, strict=True))
        result.append((ProjPoint(point), multiplicity))
    return result


def tangents_through_point(
    p: ProjPoint, c: Conic, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[tuple[ProjLine, int]]:
    """Tangent lines to ``c`` through ``p``.

    The lines through p form the dual line with coefficients p; it meets the
    dual conic in the tangents. A point on ``c`` yields its single tangent with
    multiplicity 2.
    """
    pencil = ProjLine(p.coords)
    found = line_conic_intersection(pencil, dual_conic(c), tol)
    if len(found) == 1:
        _LOGGER.debug("point %s lies on the conic: single tangent", p.coords)
    return [(ProjLine(q.coords), mult) for q, mult in found]


# =============================================================================
# Parametrization
# =============================================================================


def _small_lines(bound: int) -> list[Vector]:
    lines = []
    for height in range(1, bound + 1):
        for coeffs in itertools.product(range(-height, height + 1), repeat=3):
            if max(abs(v) for v in coeffs) == height:
                lines.append(coerce_all(coeffs, Backend.EXACT))
    return lines


def find_rational_point(
    c: Conic, bound: int = RATIONAL_POINT_SEARCH_BOUND
) -> ProjPoint:
    """Search small integer lines for a rational intersection with ``c``.

    Raises:
        RationalPointNotFoundError: Nothing found within ``bound``.

    """
    for coeffs in _small_lines(bound):
        try:
            found = line_conic_intersection(ProjLine(coeffs), c)
        except UnsupportedOperationError:
            continue
        _LOGGER.debug("rational point found on line %s", coeffs)
        return found[0][0]
    raise RationalPointNotFoundError


def _float_seed(c: Conic, rng: np.random.Generator, tol: Tolerance) -> ProjPoint:
    fallback: ProjPoint | None = None
    for _ in range(PARAMETRIZE_MAX_LINES):
        line = ProjLine(tuple(complex(v) for v in rng.normal(size=3)))
        for point, _mult in line_conic_intersection(line, c, tol):
            if point.is_real(tol):
                return point
            fallback = fallback or point
    if fallback is None:
        raise ValueError("no seed point found on the conic")
    _LOGGER.warning("conic has no real point on %d random lines; using a complex seed",
                    PARAMETRIZE_MAX_LINES)
    return fallback


def parametrize_conic(
    c: Conic,
    seed: ProjPoint | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
    rng: np.random.Generator | None = None,
) -> ConicParam:
    """Parametrize a smooth conic by the pencil of lines through a seed point.

    With ``L = s0*a + s1*b`` spanning a complement of the seed p, the second
    intersection of the line pL is ``Q(L)*p - 2*B(p, L)*L``.

    Raises:
        DegenerateConicError: ``c`` is singular.
        RationalPointNotFoundError: Exact conic, no seed given and none found.
        ValueError: The seed is not on the conic.

    """
    c.require_smooth()
    if seed is None:
        if c.backend is Backend.EXACT:
            seed = find_rational_point(c)
        else:
            seed = _float_seed(c, rng or np.random.default_rng(DEFAULT_SEED), tol)
    if not c.contains(seed, tol):
        raise ValueError(f"seed {seed.coords} is not on the conic")
    p = seed.coords
    k = max(range(3), key=lambda i: magnitude(p[i]))
    a, b = (_unit(i) for i in range(3) if i != k)
    quadric = BinaryForm((c.bilinear(a, a), 2 * c.bilinear(a, b), c.bilinear(b, b)))
    polar = BinaryForm((c.bilinear(p, a), c.bilinear(p, b)))
    forms = [
        quadric * p[i] - polar * BinaryForm((a[i], b[i])) * 2 for i in range(3)
    ]
    return ConicParam(forms[0], forms[1], forms[2], seed=seed)


# =============================================================================
# Projective transformations
# =============================================================================


@dataclass(frozen=True)
class ProjTransform:
    """An invertible 3x3 matrix acting on points by ``x -> T x``."""

    matrix: Rows3

    def __post_init__(self) -> None:
        flat = coerce_all([v for row in self.matrix for v in row])
        rows = (flat[0:3], flat[3:6], flat[6:9])
        object.__setattr__(self, "matrix", rows)
        det = det3(rows)
        if backend_of(*flat) is Backend.EXACT:
            singular = det == 0
        else:
            singular = magnitude(det) <= DEFAULT_TOLERANCE.rel_eps * norm_inf(flat) ** 3
        if singular:
            raise DegenerateTransformError(f"transform {rows} is singular")

    @classmethod
    def identity(cls, backend: Backend = Backend.EXACT) -> ProjTransform:
        rows = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
        return cls.from_rows(rows, backend)

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Any]], backend: Backend | None = None
    ) -> ProjTransform:
        flat = coerce_all([v for row in rows for v in row], backend)
        return cls((flat[0:3], flat[3:6], flat[6:9]))

    @classmethod
    def random(
        cls,
        rng: np.random.Generator,
        backend: Backend = Backend.FLOAT,
        max_cond: float = RANDOM_TRANSFORM_MAX_COND,
    ) -> ProjTransform:
        """A random well-conditioned transform (integer entries when exact)."""
        while True:
            if backend is Backend.EXACT:
                array = rng.integers(-4, 5, size=(3, 3))
            else:
                array = rng.normal(size=(3, 3))
            if np.linalg.cond(array) <= max_cond:
                return cls.from_rows(array.tolist(), backend)

    @property
    def backend(self) -> Backend:
        return backend_of(*self.matrix)

    def inverse(self) -> ProjTransform:
        """Inverse up to scale (the adjugate)."""
        return ProjTransform(adjugate3(self.matrix))

    def compose(self, other: ProjTransform) -> ProjTransform:
        """``self`` after ``other``."""
        return ProjTransform(matmul3(self.matrix, other.matrix))

    def __call__(self, obj: Any) -> Any:
        return apply_transform(self, obj)


@functools.singledispatch
def _transform(obj: Any, transform: ProjTransform) -> Any:
    raise TypeError(f"cannot transform objects of type {type(obj).__name__}")


@_transform.register
def _(obj: ProjPoint, transform: ProjTransform) -> ProjPoint:
    return ProjPoint(matvec3(transform.matrix, obj.coords))


@_transform.register
def _(obj: ProjLine, transform: ProjTransform) -> ProjLine:
    cofactor = transpose3(adjugate3(transform.matrix))
    return ProjLine(matvec3(cofactor, obj.coefficients))


@_transform.register
def _(obj: Conic, transform: ProjTransform) -> Conic:
    inverse = adjugate3(transform.matrix)
    return Conic(matmul3(transpose3(inverse), matmul3(obj.matrix, inverse)))


@_transform.register
def _(obj: TernaryForm, transform: ProjTransform) -> TernaryForm:
    return obj.substitute(adjugate3(transform.matrix))


@_transform.register
def _(obj: PlaneCurve, transform: ProjTransform) -> PlaneCurve:
    return PlaneCurve(_transform(obj.form, transform))


@_transform.register
def _(obj: ConicParam, transform: ProjTransform) -> ConicParam:
    m = transform.matrix
    forms = [
        obj.p0 * m[i][0] + obj.p1 * m[i][1] + obj.p2 * m[i][2] for i in range(3)
    ]
    seed = None if obj.seed is None else _transform(obj.seed, transform)
    return ConicParam(forms[0], forms[1], forms[2], seed=seed)


@_transform.register(list)
@_transform.register(tuple)
def _(obj: Sequence[Any], transform: ProjTransform) -> list[Any]:
    return [_transform(item, transform) for item in obj]


register_transform = _transform.register


def apply_transform(transform: ProjTransform, obj: Any) -> Any:
    """Move a geometric object by a projective transformation.

    Points map by T, lines by the inverse transpose, conics by inverse
    congruence and curves by pull-back along the inverse, so incidence and
    tangency are preserved.
    """
    return _transform(obj, transform)


# =============================================================================
# The canonical frame
# =============================================================================

# monomials (u^2, u*v, v^2) -> point of tangency (v^2 : -2*u*v : u^2)
_CANONICAL_PARAM_ROWS: Rows3 = (
    coerce_all([0, 0, 1]),
    coerce_all([0, -2, 0]),
    coerce_all([1, 0, 0]),
)


def canonical_frame(
    c: Conic, tol: Tolerance = DEFAULT_TOLERANCE, seed: ProjPoint | None = None
) -> ProjTransform:
    """A transform taking ``c`` to the canonical conic.

    The identity when ``c`` already is canonical; otherwise it carries the
    parametrization of ``c`` to ``t -> (v^2 : -2*u*v : u^2)``.
    """
    c.require_smooth()
    if c.proportional_to(CANONICAL_CONIC, tol):
        return ProjTransform.identity(c.backend)
    param = parametrize_conic(c, seed, tol)
    inverse = adjugate3(param.coefficient_rows())
    frame = ProjTransform(matmul3(_CANONICAL_PARAM_ROWS, inverse))
    _LOGGER.debug("canonical frame for conic %s: %s", c.matrix, frame.matrix)
    return frame


def tangency_parameter(
    line: ProjLine,
    frame: ProjTransform | None = None,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> P1Point:
    """Parameter of a line tangent to the conic that ``frame`` makes canonical.

    Raises:
        ValueError: The line is not tangent.

    """
    mapped = line if frame is None else apply_transform(frame, line)
    l0, l1, l2 = mapped.coefficients
    gap = l1 * l1 - l0 * l2
    if gap != 0 and (
        mapped.backend is Backend.EXACT
        or magnitude(gap) > tol.certify * norm_inf(mapped.coefficients) ** 2
    ):
        raise ValueError(f"line {line.coefficients} is not tangent to the conic")
    if magnitude(l0) >= magnitude(l2):
        return P1Point(l0, l1)
    return P1Point(l1, l2)


def line_at_parameter(t: P1Point, frame: ProjTransform | None = None) -> ProjLine:
    """Tangent line with parameter t, mapped back out of the canonical frame."""
    line = tangent_line_at_parameter(t)
    return line if frame is None else apply_transform(frame.inverse(), line)
