"""Closure pipelines: the tangent-chord oracle and the porism construction.

Two independent routes lead to polygons inscribed in D and circumscribed
around C:

- :func:`trace_gon` iterates the classical step (other intersection with D,
  then other tangent to C) and measures how far the polygon is from closing.
- :func:`porism_pencil` starts from one closed polygon and solves a linear
  system for every section whose determinant curve contains D. Sampling that
  pencil produces further closed polygons without any iteration.

Tests cross-check one route against the other.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from poncelet_bundles.capabilities import BackendCapabilities
from poncelet_bundles.exceptions import (
    CertificateError,
    DegenerateGonError,
    DegenerateStepError,
    InexactDivisionError,
    UnsupportedOperationError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    PlaneCurve,
    compose_with_parametrization,
    from_roots,
    is_squarefree,
    roots,
)
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Matrix,
    Tolerance,
    backend_of,
    chordal_distance,
    magnitude,
    nullspace,
)
from poncelet_bundles.projective import (
    Conic,
    ProjLine,
    ProjPoint,
    ProjTransform,
    apply_transform,
    canonical_frame,
    dual_conic,
    line_conic_intersection,
    parametrize_conic,
    tangency_parameter,
    tangents_through_point,
)
from poncelet_bundles.schwarzenberger import (
    Gon,
    Pencil,
    determinant_curve,
    determinant_form,
    zero_locus,
)

_LOGGER = logging.getLogger(__name__)


# =============================================================================
# The tangent-chord iteration
# =============================================================================


@dataclass(frozen=True)
class PonceletFlag:
    """A point on D together with a tangent line to C through it."""

    point: ProjPoint
    line: ProjLine
    c: Conic
    d: Conic

    @property
    def backend(self) -> Backend:
        return backend_of(
            *self.point.coords, *self.line.coefficients, *self.c.matrix, *self.d.matrix
        )

    def violations(self, tol: Tolerance = DEFAULT_TOLERANCE) -> list[dict[str, Any]]:
        problems = []
        if not self.d.contains(self.point, tol):
            residual = self.d.residual(self.point)
            problems.append({"message": "point is not on D", "residual": residual})
        tangency = dual_conic(self.c).residual(ProjPoint(self.line.coefficients))
        if tangency > tol.certify:
            problems.append(
                {"message": "line is not tangent to C", "residual": tangency}
            )
        if not self.line.contains(self.point, tol):
            problems.append(
                {
                    "message": "point is not on the line",
                    "residual": self.line.residual(self.point),
                }
            )
        return problems


def flag_distance(a: PonceletFlag, b: PonceletFlag) -> float:
    """Chordal distance of the points plus chordal distance of the lines."""
    return a.point.distance(b.point) + a.line.distance(b.line)


def _ordering_key(line: ProjLine) -> tuple[float, ...]:
    return tuple(
        part for v in line.coefficients for part in (complex(v).real, complex(v).imag)
    )


def start_flag(
    c: Conic,
    d: Conic,
    point: ProjPoint,
    branch: int = 0,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> PonceletFlag:
    """Flag at a point of D, choosing one of its two tangents to C.

    Tangents are ordered by their normalized coefficients so ``branch`` 0 and
    1 pick them deterministically; a point on C has only one tangent.

    Raises:
        ValueError: The point is not on D, or ``branch`` is not 0 or 1.

    """
    if branch not in (0, 1):
        raise ValueError(f"branch must be 0 or 1, got {branch}")
    if not d.contains(point, tol):
        raise ValueError(f"start point {point.coords} is not on D")
    tangents = sorted(
        (line for line, _ in tangents_through_point(point, c, tol)), key=_ordering_key
    )
    if len(tangents) == 1:
        _LOGGER.warning("start point %s lies on C: single tangent", point.coords)
        return PonceletFlag(point, tangents[0], c, d)
    return PonceletFlag(point, tangents[branch], c, d)


def _other(candidates: Sequence[Any], incoming: Any, kind: str, tol: Tolerance) -> Any:
    """Exclusion rule: keep the candidate farther from the incoming object."""
    if len(candidates) == 1:
        raise DegenerateStepError(kind)
    distances = [incoming.distance(item) for item in candidates]
    if max(distances) <= tol.match:
        raise DegenerateStepError(kind)
    return candidates[int(np.argmax(distances))]


def _next_point(
    line: ProjLine, d: Conic, incoming: ProjPoint, tol: Tolerance
) -> ProjPoint:
    found = [p for p, _ in line_conic_intersection(line, d, tol)]
    point: ProjPoint = _other(found, incoming, "double intersection", tol)
    return point


def _next_line(
    point: ProjPoint, c: Conic, incoming: ProjLine, tol: Tolerance
) -> ProjLine:
    found = [line for line, _ in tangents_through_point(point, c, tol)]
    line: ProjLine = _other(found, incoming, "double tangency", tol)
    return line


def poncelet_step(
    flag: PonceletFlag, tol: Tolerance = DEFAULT_TOLERANCE
) -> PonceletFlag:
    """One tangent-chord step: other point of D on the line, then other tangent.

    Raises:
        UnsupportedOperationError: Exact data.
        DegenerateStepError: The line touches D, or the new point is on C.

    """
    BackendCapabilities.for_backend(flag.backend).require("closure.poncelet_step")
    point = _next_point(flag.line, flag.d, flag.point, tol)
    line = _next_line(point, flag.c, flag.line, tol)
    return PonceletFlag(point, line, flag.c, flag.d)


def poncelet_step_reverse(
    flag: PonceletFlag, tol: Tolerance = DEFAULT_TOLERANCE
) -> PonceletFlag:
    """Inverse of :func:`poncelet_step`: other tangent first, then other point."""
    BackendCapabilities.for_backend(flag.backend).require("closure.poncelet_step")
    line = _next_line(flag.point, flag.c, flag.line, tol)
    point = _next_point(line, flag.d, flag.point, tol)
    return PonceletFlag(point, line, flag.c, flag.d)


@dataclass(frozen=True)
class ClosureReport:
    """Outcome of n tangent-chord steps.

    ``vertices[i]`` and ``lines[i]`` form the i-th flag; ``lines[i]`` joins
    ``vertices[i]`` to ``vertices[i+1]``.
    """

    n: int
    vertices: tuple[ProjPoint, ...]
    lines: tuple[ProjLine, ...]
    residual: float
    closed: bool
    gon: Gon | None = None
    form: BinaryForm | None = None


def trace_gon(
    start: PonceletFlag, n: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> ClosureReport:
    """Iterate n steps and report the closure residual.

    A closed polygon also comes back as an ordered Gon with its
    tangency-parameter form in the canonical frame of C.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    BackendCapabilities.for_backend(start.backend).require("closure.trace_gon")
    flags = [start]
    for _ in range(n):
        flags.append(poncelet_step(flags[-1], tol))
    residual = flag_distance(start, flags[-1])
    closed = residual <= tol.certify
    vertices = tuple(f.point for f in flags[:n])
    lines = tuple(f.line for f in flags[:n])
    _LOGGER.debug("traced %d steps, closure residual %.3e", n, residual)
    if not closed:
        return ClosureReport(n, vertices, lines, residual, closed)
    frame = canonical_frame(start.c, tol)
    parameters = tuple(tangency_parameter(line, frame, tol) for line in lines)
    gon = Gon(
        parameters,
        lines,
        tuple(((i, (i + 1) % n), vertices[(i + 1) % n]) for i in range(n)),
        complete=False,
        frame=frame,
    )
    form = from_roots(parameters)
    return ClosureReport(n, vertices, lines, residual, closed, gon, form)


def retrace(
    gon: Gon, c: Conic, d: Conic, tol: Tolerance = DEFAULT_TOLERANCE
) -> ClosureReport:
    """Run the iteration oracle from a vertex of ``gon`` lying on D.

    Raises:
        CertificateError: No vertex of the gon lies on D.

    """
    for (i, _), vertex in gon.vertices:
        if d.contains(vertex, tol):
            return trace_gon(PonceletFlag(vertex, gon.lines[i], c, d), gon.n, tol)
    raise CertificateError("no vertex of the polygon lies on D")


# =============================================================================
# The porism pencil
# =============================================================================


def _unit_section(k: int, n: int, backend: Backend) -> BinaryForm:
    coefficients = [1 if i == k else 0 for i in range(n + 1)]
    return BinaryForm.from_coefficients(coefficients, backend)


def _in_frame(obj: Any, frame: ProjTransform | None) -> Any:
    return obj if frame is None else apply_transform(frame, obj)


def porism_sections(
    c: Conic, d: Conic, f_closed: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[BinaryForm]:
    """Basis of the sections g whose determinant curve with f_closed contains D.

    Column k of the linear system is the pull-back of ``det(f_closed, e_k)``
    to a parametrization of D (in the canonical frame of C); the kernel always
    contains f_closed itself.
    """
    frame = canonical_frame(c, tol)
    param = parametrize_conic(_in_frame(d, frame), tol=tol)
    n = f_closed.degree
    backend = backend_of(*f_closed.coefficients, *param.coefficient_rows())
    columns = []
    for k in range(n + 1):
        form = determinant_form(f_closed, _unit_section(k, n, backend), tol)
        columns.append(compose_with_parametrization(form, param).coefficients)
    kernel = nullspace(Matrix.from_columns(columns, backend), tol)
    _LOGGER.debug(
        "porism system %dx%d: kernel dimension %d", 2 * n - 1, n + 1, len(kernel)
    )
    return [BinaryForm(vector) for vector in kernel]


def porism_pencil(
    c: Conic, d: Conic, f_closed: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> Pencil:
    """Pencil through ``f_closed`` of sections whose gons close on D.

    Raises:
        CertificateError: The solution space has dimension below 2.

    """
    kernel = porism_sections(c, d, f_closed, tol)
    if len(kernel) < 2:
        raise CertificateError(
            "porism certificate failed",
            [{"message": f"solution space has dimension {len(kernel)}, need 2"}],
        )
    other = max(
        kernel, key=lambda g: chordal_distance(g.coefficients, f_closed.coefficients)
    )
    return Pencil(f_closed, other, frame=canonical_frame(c, tol))


def split_gamma(
    pencil: Pencil, d: Conic, tol: Tolerance = DEFAULT_TOLERANCE
) -> tuple[PlaneCurve, PlaneCurve]:
    """Split the determinant curve of a porism pencil as D times a residual curve.

    Both curves come back in the scene frame.

    Raises:
        CertificateError: D does not divide the determinant curve.

    """
    gamma = determinant_curve(pencil.f, pencil.g, tol)
    d_form = _in_frame(d, pencil.frame).to_form()
    try:
        residual = gamma.form.exact_divide(d_form, tol)
    except InexactDivisionError as err:
        raise CertificateError(
            "porism certificate failed: D does not divide the determinant curve",
            err.details,
        ) from err
    back = None if pencil.frame is None else pencil.frame.inverse()
    curves = (gamma, PlaneCurve(residual))
    if back is None:
        return curves
    return (apply_transform(back, curves[0]), apply_transform(back, curves[1]))


@dataclass(frozen=True)
class IncidenceCertificate:
    """Which vertices of a complete gon lie on D, and how each side meets D."""

    n: int
    vertices_on_d: tuple[tuple[int, int], ...]
    line_counts: tuple[int, ...]
    problems: tuple[dict[str, Any], ...] = field(default=())

    @property
    def passed(self) -> bool:
        return not self.problems

    def raise_for_failure(self) -> None:
        if self.problems:
            raise CertificateError("incidence certificate failed", list(self.problems))


def incidence_count_on_D(  # noqa: N802
    gon: Gon, d: Conic, tol: Tolerance = DEFAULT_TOLERANCE
) -> IncidenceCertificate:
    """Certify that exactly n vertices lie on D, two on each side.

    Each side meets D in two points; both have to be vertices of the gon,
    so the n vertices on D exhaust all 2n side/D intersections.
    """
    if not gon.complete:
        raise ValueError("incidence_count_on_D needs a complete gon")
    on_d = tuple(pair for pair, vertex in gon.vertices if d.contains(vertex, tol))
    problems: list[dict[str, Any]] = []
    if len(on_d) != gon.n:
        problems.append(
            {
                "message": f"{len(on_d)} vertices on D, expected {gon.n}",
                "where": ", ".join(f"{i}{j}" for i, j in on_d) or "none",
            }
        )
    vertex_map = gon.vertex_map
    counts = []
    for index, line in enumerate(gon.lines):
        mine = [vertex_map[pair] for pair in on_d if index in pair]
        counts.append(len(mine))
        if len(mine) != 2:
            problems.append(
                {"message": f"{len(mine)} vertices on D", "where": f"line {index}"}
            )
            continue
        for point, multiplicity in line_conic_intersection(line, d, tol):
            gap = min(point.distance(v) for v in mine)
            if multiplicity != 1 or gap > tol.match:
                problems.append(
                    {
                        "message": "intersection with D is not a vertex",
                        "where": f"line {index}",
                        "residual": gap,
                    }
                )
    return IncidenceCertificate(gon.n, on_d, tuple(counts), tuple(problems))


# =============================================================================
# Darboux completion
# =============================================================================


def darboux_complete(
    c: Conic, s: PlaneCurve, f: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
) -> BinaryForm:
    """A second section t with ``determinant_curve(f, t)`` proportional to S.

    Solves ``det(f, t) - k*S = 0`` for (t, k) and keeps a solution with
    k != 0, so every member of the pencil (f, t) has its vertices on S.

    Raises:
        ValueError: S does not have degree n - 1.
        CertificateError: No solution with k != 0; the details carry the
            vertex residuals when the vertices of f can be computed.

    """
    n = f.degree
    if s.degree != n - 1:
        raise ValueError(f"S must have degree {n - 1}, got {s.degree}")
    frame = canonical_frame(c, tol)
    target = _in_frame(s, frame).form
    backend = backend_of(*f.coefficients, *(v for _, v in target.terms))
    columns = [
        determinant_form(f, _unit_section(k, n, backend), tol).coefficient_vector()
        for k in range(n + 1)
    ]
    columns.append(tuple(-v for v in target.coefficient_vector()))
    kernel = nullspace(Matrix.from_columns(columns, backend), tol)
    floor = 0.0 if backend is Backend.EXACT else tol.null_rel
    best = max(kernel, key=lambda v: magnitude(v[-1]), default=None)
    if best is None or magnitude(best[-1]) <= floor:
        raise CertificateError(
            "no section completes the pencil: vertices are not on S",
            _vertex_residuals(f, PlaneCurve(target), tol),
        )
    return BinaryForm(best[:-1]).normalized()


def _vertex_residuals(
    f: BinaryForm, s: PlaneCurve, tol: Tolerance
) -> list[dict[str, Any]]:
    try:
        gon = zero_locus(f, tol)
    except (UnsupportedOperationError, DegenerateGonError):
        return []
    return [
        {
            "message": "vertex residual",
            "where": f"vertex {i},{j}",
            "residual": s.residual(v.coords),
        }
        for (i, j), v in gon.vertices
    ]


# =============================================================================
# Porism family
# =============================================================================


def porism_family(
    c: Conic,
    d: Conic,
    pencil: Pencil,
    count: int,
    rng: np.random.Generator,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> list[Gon]:
    """Sample ``count`` complete gons from a porism pencil, in the scene frame.

    Members are drawn with random complex weights, so an exact pencil is
    sampled on the float backend. Every sample is certified against D before
    it is returned.

    Raises:
        CertificateError: A sampled gon fails its incidence certificate, or
            too few members are squarefree.

    """
    frame = pencil.frame if pencil.frame is not None else canonical_frame(c, tol)
    gons: list[Gon] = []
    attempts = 0
    while len(gons) < count:
        attempts += 1
        if attempts > 10 * count:
            raise CertificateError(
                f"only {len(gons)} of {count} members are squarefree"
            )
        lam, mu = rng.normal(size=2)
        member = pencil.member(complex(lam), complex(mu))
        if not is_squarefree(member, tol):
            continue
        gon = Gon.from_parameters(roots(member, tol), frame=frame)
        incidence_count_on_D(gon, d, tol).raise_for_failure()
        gons.append(gon)
    _LOGGER.debug("sampled %d porism members in %d attempts", count, attempts)
    return gons
