"""Sections of the Schwarzenberger bundle of the canonical conic.

A section is a binary form f of degree n. It vanishes at a plane point x iff
the point quadric q_x divides f, i.e. iff f lies in the column space of the
banded matrix M(x). The zero locus of a squarefree f is the set of vertices of
the complete n-gon of tangent lines at its roots, and a pencil of sections
sweeps out a determinant curve of degree n - 1.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal, NamedTuple

from poncelet_bundles.exceptions import (
    DegenerateGonError,
    DependentSectionsError,
    InconsistentResultError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    P1Point,
    PlaneCurve,
    TernaryForm,
    from_roots,
    is_squarefree,
    pseudo_remainder,
    pseudo_remainder_at,
    pseudo_remainder_scale,
    rational_roots,
    roots,
)
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Matrix,
    Scalar,
    Tolerance,
    backend_of,
    coerce_all,
    magnitude,
    norm_inf,
    normalize_projective,
    rank,
)
from poncelet_bundles.projective import (
    ProjLine,
    ProjPoint,
    ProjTransform,
    apply_transform,
    line_at_parameter,
    register_transform,
)

_LOGGER = logging.getLogger(__name__)

VanishingMethod = Literal["both", "division", "rank"]

_VARIABLES = ("x0", "x1", "x2")
_CHART_SHIFTS = (1, -1, 2)


# =============================================================================
# The presentation matrix
# =============================================================================


@dataclass(frozen=True)
class SchwMatrix:
    """The (n+1) x (n-1) banded matrix of linear forms.

    Column j carries x0, x1, x2 in rows j, j+1, j+2; its columns span the
    degree-n multiples of the point quadric.
    """

    n: int

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n + 1, self.n - 1)

    def variable_at(self, row: int, col: int) -> int | None:
        """Index of the variable in entry (row, col), or None for zero."""
        offset = row - col
        return offset if 0 <= offset <= 2 else None

    def symbolic(self) -> list[list[str]]:
        rows, cols = self.shape
        return [
            [
                "0" if (k := self.variable_at(i, j)) is None else _VARIABLES[k]
                for j in range(cols)
            ]
            for i in range(rows)
        ]

    def evaluate(self, x: ProjPoint | Sequence[Any]) -> Matrix:
        coords = x.coords if isinstance(x, ProjPoint) else coerce_all(x)
        backend = backend_of(*coords)
        rows, cols = self.shape
        zero = coerce_all([0], backend)[0]
        entries = [
            [
                zero if (k := self.variable_at(i, j)) is None else coords[k]
                for j in range(cols)
            ]
            for i in range(rows)
        ]
        return Matrix.from_rows(entries, backend)

    def __str__(self) -> str:
        grid = self.symbolic()
        width = max(len(cell) for row in grid for cell in row)
        return "\n".join(
            "[ " + "  ".join(cell.rjust(width) for cell in row) + " ]" for row in grid
        )


def build_matrix(n: int) -> SchwMatrix:
    """The presentation matrix for sections of degree n."""
    return SchwMatrix(n)


# =============================================================================
# Fiber evaluation
# =============================================================================


class FiberValue(NamedTuple):
    """Remainder pair of a section at a point, and the chart it was taken in.

    ``shift`` is the s of the chart ``v -> v + s*u``; 0 means the pair is
    ``(r1(x), r0(x))`` of f itself.
    """

    r1: Scalar
    r0: Scalar
    shift: int


_Chart = tuple[BinaryForm, tuple[Scalar, ...], int]


def _shifted(f: BinaryForm, coords: Sequence[Scalar], s: int) -> _Chart:
    """Change of chart ``v -> v + s*u``; divisibility by q_x is preserved."""
    x0, x1, x2 = coords
    moved = (x0 + s * x1 + s * s * x2, x1 + 2 * s * x2, x2)
    return f.substitute_linear(((1, 0), (s, 1))), moved, s


def _fiber_chart(f: BinaryForm, coords: Sequence[Scalar]) -> _Chart:
    if magnitude(coords[0]) >= norm_inf(coords) / 2:
        return f, tuple(coords), 0
    best = max(
        (_shifted(f, coords, s) for s in _CHART_SHIFTS),
        key=lambda item: magnitude(item[1][0]),
    )
    _LOGGER.debug("fiber evaluated in the chart shifted by %d at %s", best[2], coords)
    return best


def evaluate_section_fiber(
    f: BinaryForm, x: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE
) -> FiberValue:
    """Remainder pair of f modulo the point quadric, with its chart shift.

    The pair vanishes exactly when the section vanishes at x. Away from
    ``x0 = 0`` it is ``(r1(x), r0(x))`` and ``shift`` is 0. Near ``x0 = 0`` the
    pair is taken in a shifted chart ``v -> v + s*u`` where the leading
    coefficient of q_x is large, so the common factor ``x0^(n-1)`` never hides
    a nonzero remainder; ``shift`` then reports s. Two sections evaluated at
    the same x always share the chart.
    """
    if f.is_zero(tol):
        raise ValueError("the zero form is not a section")
    if f.degree < 2:
        raise ValueError(f"n must be >= 2, got {f.degree}")
    chart_form, chart_point, shift = _fiber_chart(f, x.coords)
    r1, r0 = pseudo_remainder_at(chart_form, chart_point)
    return FiberValue(r1, r0, shift)


def _fiber_vanishes(f: BinaryForm, x: ProjPoint, tol: Tolerance) -> bool:
    chart_form, chart_point, _ = _fiber_chart(f, x.coords)
    r1, r0 = pseudo_remainder_at(chart_form, chart_point)
    if backend_of(r1, r0) is Backend.EXACT:
        return r1 == 0 and r0 == 0
    s1, s0 = pseudo_remainder_scale(chart_form, chart_point)
    return magnitude(r1) <= tol.threshold(s1) and magnitude(r0) <= tol.threshold(s0)


def _in_column_space(f: BinaryForm, x: ProjPoint, tol: Tolerance) -> bool:
    m = build_matrix(f.degree).evaluate(x)
    augmented = m.hstack(normalize_projective(f.coefficients))
    return rank(augmented, tol) == rank(m, tol)


def section_vanishes_at(
    f: BinaryForm,
    x: ProjPoint,
    tol: Tolerance = DEFAULT_TOLERANCE,
    method: VanishingMethod = "both",
) -> bool:
    """Whether the section f vanishes at x.

    ``"division"`` tests q_x | f through the remainder pair, ``"rank"`` tests
    f against the column space of M(x); ``"both"`` runs the two and insists
    they agree.

    Raises:
        InconsistentResultError: The two tests disagree.

    """
    if f.is_zero(tol):
        raise ValueError("the zero form is not a section")
    if method == "division":
        return _fiber_vanishes(f, x, tol)
    if method == "rank":
        return _in_column_space(f, x, tol)
    by_division = _fiber_vanishes(f, x, tol)
    by_rank = _in_column_space(f, x, tol)
    if by_division != by_rank:
        raise InconsistentResultError(
            f"divisibility ({by_division}) and rank ({by_rank}) tests disagree "
            f"at {x.coords}"
        )
    return by_division


# =============================================================================
# Gons
# =============================================================================


def vertex_of(a: P1Point, b: P1Point) -> ProjPoint:
    """Meet of the canonical tangent lines at parameters a and b."""
    a0, a1 = a.coords
    b0, b1 = b.coords
    return ProjPoint((a1 * b1, -(a1 * b0 + a0 * b1), a0 * b0))


@dataclass(frozen=True)
class Gon:
    """Tangent lines to a conic with their vertices.

    ``parameters`` are tangency parameters in the canonical frame of the
    conic; ``frame`` maps the scene into that frame (None when the scene is
    already canonical). A complete gon lists every pairwise vertex; an ordered
    gon only the vertices of consecutive lines, keyed ``(i, i+1 mod n)``.
    """

    parameters: tuple[P1Point, ...]
    lines: tuple[ProjLine, ...]
    vertices: tuple[tuple[tuple[int, int], ProjPoint], ...]
    complete: bool = True
    frame: ProjTransform | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if len(self.parameters) != len(self.lines):
            raise ValueError("a gon needs one line per tangency parameter")
        if len(self.lines) < 2:
            raise ValueError(f"a gon needs at least 2 lines, got {len(self.lines)}")

    @classmethod
    def from_parameters(
        cls,
        parameters: Sequence[P1Point],
        frame: ProjTransform | None = None,
        *,
        complete: bool = True,
    ) -> Gon:
        """Build the tangent lines and vertices from tangency parameters."""
        n = len(parameters)
        lines = tuple(line_at_parameter(t, frame) for t in parameters)
        if complete:
            pairs = list(itertools.combinations(range(n), 2))
        else:
            pairs = [(i, (i + 1) % n) for i in range(n)]
        back = None if frame is None else frame.inverse()
        vertices = []
        for i, j in pairs:
            vertex = vertex_of(parameters[i], parameters[j])
            if back is not None:
                vertex = apply_transform(back, vertex)
            vertices.append(((i, j), vertex))
        return cls(tuple(parameters), lines, tuple(vertices), complete, frame)

    @property
    def n(self) -> int:
        return len(self.lines)

    @property
    def vertex_map(self) -> dict[tuple[int, int], ProjPoint]:
        return dict(self.vertices)

    def vertex_points(self) -> list[ProjPoint]:
        return [v for _, v in self.vertices]

    def vertices_on_line(self, index: int) -> list[ProjPoint]:
        return [v for pair, v in self.vertices if index in pair]

    def binary_form(self) -> BinaryForm:
        """The section whose roots are the tangency parameters."""
        return from_roots(self.parameters)

    def violations(self, tol: Tolerance = DEFAULT_TOLERANCE) -> list[dict[str, Any]]:
        """Broken incidences: each vertex must lie on exactly its two lines."""
        problems: list[dict[str, Any]] = []
        for (i, j), vertex in self.vertices:
            for k, line in enumerate(self.lines):
                on_line = line.contains(vertex, tol)
                if on_line != (k in (i, j)):
                    problems.append(
                        {
                            "message": "vertex/line incidence broken",
                            "where": f"vertex {i},{j} line {k}",
                            "residual": line.residual(vertex),
                        }
                    )
        for (i, a), (j, b) in itertools.combinations(enumerate(self.lines), 2):
            if a.proportional_to(b, tol):
                problems.append(
                    {"message": "repeated line", "where": f"lines {i},{j}"}
                )
        return problems


def zero_locus(f: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE) -> Gon:
    """The complete n-gon cut out by a squarefree section.

    Raises:
        DegenerateGonError: f has a repeated root.
        UnsupportedOperationError: Exact f that does not split over QQ.

    """
    if f.degree < 2:
        raise ValueError(f"n must be >= 2, got {f.degree}")
    if not is_squarefree(f, tol):
        raise DegenerateGonError
    found = rational_roots(f) if f.backend is Backend.EXACT else roots(f, tol)
    gon = Gon.from_parameters(found)
    _LOGGER.debug(
        "zero locus of degree %d section: %d vertices", f.degree, len(gon.vertices)
    )
    return gon


# =============================================================================
# Pencils and determinant curves
# =============================================================================


@dataclass(frozen=True)
class Pencil:
    """Two independent sections of the same degree."""

    f: BinaryForm
    g: BinaryForm
    frame: ProjTransform | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.f.degree != self.g.degree:
            raise ValueError(
                f"pencil members must share a degree, got {self.f.degree} "
                f"and {self.g.degree}"
            )
        coefficients = Matrix.from_rows([self.f.coefficients, self.g.coefficients])
        if rank(coefficients) < 2:
            raise DependentSectionsError

    @property
    def degree(self) -> int:
        return self.f.degree

    def member(self, lam: Any, mu: Any) -> BinaryForm:
        return self.f * lam + self.g * mu

    def members(self, weights: Sequence[tuple[Any, Any]]) -> Iterator[BinaryForm]:
        for lam, mu in weights:
            yield self.member(lam, mu)


def determinant_form(
    f: BinaryForm, g: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> TernaryForm:
    """``(r1f*r0g - r0f*r1g) / x0^(n-1)``, possibly the zero form."""
    if f.degree != g.degree:
        raise ValueError(f"degrees differ: {f.degree} and {g.degree}")
    n = f.degree
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    r1f, r0f = pseudo_remainder(f)
    r1g, r0g = pseudo_remainder(g)
    det = r1f * r0g - r0f * r1g
    return det.divide_by_x0_power(n - 1, tol)


def determinant_curve(
    f: BinaryForm, g: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> PlaneCurve:
    """Curve of degree n-1 through every vertex of every member of the pencil.

    Raises:
        DependentSectionsError: f and g are proportional (zero determinant).
        InexactDivisionError: The x0 power does not divide out.

    """
    form = determinant_form(f, g, tol)
    scale = f.norm() * g.norm()
    if form.is_zero(tol, scale):
        raise DependentSectionsError
    _LOGGER.debug(
        "determinant curve of degree %d with %d terms", form.degree, len(form.terms)
    )
    return PlaneCurve(form)


def pencil_curve(pencil: Pencil, tol: Tolerance = DEFAULT_TOLERANCE) -> PlaneCurve:
    """Determinant curve of a pencil, in the scene frame of the pencil."""
    curve = determinant_curve(pencil.f, pencil.g, tol)
    if pencil.frame is None:
        return curve
    return apply_transform(pencil.frame.inverse(), curve)


def vertex_curve_space(
    f: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[PlaneCurve]:
    """Basis of the curves ``determinant_curve(f, t)`` as t varies.

    The map t -> det(f, t) kills exactly the multiples of f, so the span has
    dimension n.
    """
    n = f.degree
    basis: list[TernaryForm] = []
    for k in range(n + 1):
        unit = BinaryForm.from_coefficients(
            [1 if i == k else 0 for i in range(n + 1)], f.backend
        )
        candidate = determinant_form(f, unit, tol)
        if not candidate.terms:
            continue
        vectors = [b.coefficient_vector() for b in (*basis, candidate)]
        if rank(Matrix.from_rows(vectors), tol) == len(vectors):
            basis.append(candidate)
    return [PlaneCurve(form) for form in basis]


def pencil_member_through(
    pencil: Pencil, x: ProjPoint, tol: Tolerance = DEFAULT_TOLERANCE
) -> BinaryForm:
    """The member of the pencil having x among its vertices.

    Raises:
        ValueError: x is a base point of the pencil or off its curve.

    """
    r1f, r0f, _ = evaluate_section_fiber(pencil.f, x, tol)
    r1g, r0g, _ = evaluate_section_fiber(pencil.g, x, tol)
    if max(magnitude(r1f), magnitude(r1g)) >= max(magnitude(r0f), magnitude(r0g)):
        lam, mu = r1g, -r1f
    else:
        lam, mu = r0g, -r0f
    if lam == 0 and mu == 0:
        raise ValueError(f"{x.coords} is a vertex of every member of the pencil")
    member = pencil.member(lam, mu).normalized()
    if not section_vanishes_at(member, x, tol, method="division"):
        raise ValueError(f"{x.coords} is not on the determinant curve of the pencil")
    return member


@dataclass(frozen=True)
class BezoutReport:
    """How one side line of a gon meets a curve."""

    line_index: int
    degree: int
    vertex_count: int
    residual: float
    exhausted: bool


def _line_coordinates(
    point: Sequence[Scalar], first: Sequence[Scalar], second: Sequence[Scalar]
) -> P1Point:
    """(alpha:beta) with ``point = alpha*first + beta*second``."""
    def minor(ij: tuple[int, int]) -> Scalar:
        a, b = ij
        return first[a] * second[b] - first[b] * second[a]

    i, j = max(itertools.combinations(range(3), 2), key=lambda ij: magnitude(minor(ij)))
    det = minor((i, j))
    alpha = (point[i] * second[j] - point[j] * second[i]) / det
    beta = (first[i] * point[j] - first[j] * point[i]) / det
    return P1Point(alpha, beta)


def bezout_exhaustion(
    gon: Gon, curve: PlaneCurve, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[BezoutReport]:
    """Check that each side's vertices are all of its intersections with the curve.

    The curve restricted to a side is a nonzero form of degree n-1; it is
    exhausted when it is proportional to the product over the n-1 vertices
    on that side.
    """
    reports = []
    for index, line in enumerate(gon.lines):
        first, second = line.spanning_points()
        restricted = curve.form.restrict_to_line(first, second)
        on_line = gon.vertices_on_line(index)
        params = [_line_coordinates(v.coords, first, second) for v in on_line]
        weight = sum(magnitude(c) for c in restricted.coefficients) or 1.0
        residual = max(
            (magnitude(restricted.at(t)) / weight for t in params), default=0.0
        )
        exhausted = (
            not restricted.is_zero(tol, max(curve.form.norm(), 1.0))
            and len(params) == restricted.degree
            and restricted.proportional_to(from_roots(params), tol)
        )
        reports.append(
            BezoutReport(index, restricted.degree, len(params), residual, exhausted)
        )
    return reports


# =============================================================================
# Frame bookkeeping
# =============================================================================


def _moved_frame(
    frame: ProjTransform | None, transform: ProjTransform
) -> ProjTransform:
    back = transform.inverse()
    return back if frame is None else frame.compose(back)


@register_transform
def _(obj: Gon, transform: ProjTransform) -> Gon:
    return Gon(
        obj.parameters,
        tuple(apply_transform(transform, line) for line in obj.lines),
        tuple((pair, apply_transform(transform, v)) for pair, v in obj.vertices),
        obj.complete,
        _moved_frame(obj.frame, transform),
    )


@register_transform
def _(obj: Pencil, transform: ProjTransform) -> Pencil:
    return Pencil(obj.f, obj.g, _moved_frame(obj.frame, transform))
