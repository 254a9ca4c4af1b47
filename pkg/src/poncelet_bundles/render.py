"""SVG figures of the real slice of a scene.

The chart is ``x = x1/x0``, ``y = x2/x0``. Conics and curves are drawn as the
zero-level contour of their equation on a regular grid; gon sides are clipped
to the viewport; vertices are circle markers. Rendering is illustrative only:
nothing here feeds a certificate.
"""

from __future__ import annotations

import functools
import logging
import xml.etree.ElementTree as ET
from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import contourpy
import numpy as np

from poncelet_bundles.closure import ClosureReport
from poncelet_bundles.const import DEFAULT_VIEWPORT, RENDER_GRID, RENDER_SIZE
from poncelet_bundles.forms import PlaneCurve, TernaryForm
from poncelet_bundles.numeric import DEFAULT_TOLERANCE, Tolerance, norm_inf
from poncelet_bundles.projective import Conic, ProjLine, ProjPoint
from poncelet_bundles.schwarzenberger import Gon

_LOGGER = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"

_STYLE = """
.axis { stroke: #bbbbbb; stroke-width: 1; }
.conic { fill: none; stroke: #1f77b4; stroke-width: 2; }
.curve { fill: none; stroke: #d62728; stroke-width: 2; }
.side { stroke: #2ca02c; stroke-width: 1.5; }
.line { stroke: #7f7f7f; stroke-width: 1; stroke-dasharray: 4 3; }
.vertex { fill: #000000; }
.point { fill: #ff7f0e; }
"""

ELEMENT_CLASSES = ("axis", "conic", "curve", "side", "line", "vertex", "point")


@dataclass(frozen=True)
class Viewport:
    """Affine window ``[xmin, xmax] x [ymin, ymax]`` of the chart x0 = 1."""

    xmin: float = DEFAULT_VIEWPORT[0]
    xmax: float = DEFAULT_VIEWPORT[1]
    ymin: float = DEFAULT_VIEWPORT[2]
    ymax: float = DEFAULT_VIEWPORT[3]

    def __post_init__(self) -> None:
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError(f"empty viewport {self.bounds}")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.xmin, self.xmax, self.ymin, self.ymax)

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax


@dataclass
class RenderResult:
    """The SVG document, its element counts and the skipped objects."""

    svg: str
    counts: dict[str, int]
    warnings: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        """True when nothing but axes was drawn."""
        return not any(v for k, v in self.counts.items() if k != "axis")


class _Canvas:
    def __init__(
        self, viewport: Viewport, size: int, grid: int, tol: Tolerance
    ) -> None:
        self.viewport = viewport
        self.size = size
        self.grid = grid
        self.tol = tol
        self.warnings: list[str] = []
        self.root = ET.Element(
            "svg",
            {
                "xmlns": SVG_NAMESPACE,
                "version": "1.1",
                "width": str(size),
                "height": str(size),
                "viewBox": f"0 0 {size} {size}",
            },
        )
        ET.SubElement(self.root, "style").text = _STYLE
        self.groups = {
            name: ET.SubElement(self.root, "g", {"id": f"{name}s"})
            for name in ELEMENT_CLASSES
        }

    def px(self, x: float, y: float) -> tuple[str, str]:
        vp = self.viewport
        sx = (x - vp.xmin) / (vp.xmax - vp.xmin) * self.size
        sy = (vp.ymax - y) / (vp.ymax - vp.ymin) * self.size
        return f"{sx:.3f}", f"{sy:.3f}"

    def warn(self, message: str) -> None:
        _LOGGER.warning("render: %s", message)
        self.warnings.append(message)

    def add(self, css_class: str, tag: str, attributes: dict[str, str]) -> None:
        ET.SubElement(self.groups[css_class], tag, {"class": css_class, **attributes})

    def counts(self) -> dict[str, int]:
        return {name: len(group) for name, group in self.groups.items()}


def _real_parts(values: Sequence[Any], tol: Tolerance) -> list[float] | None:
    scale = norm_inf(values)
    if any(abs(complex(v).imag) > tol.certify * max(scale, 1.0) for v in values):
        return None
    return [complex(v).real for v in values]


def _draw_axes(canvas: _Canvas) -> None:
    vp = canvas.viewport
    if vp.ymin <= 0 <= vp.ymax:
        x1, y1 = canvas.px(vp.xmin, 0)
        x2, y2 = canvas.px(vp.xmax, 0)
        canvas.add("axis", "line", {"x1": x1, "y1": y1, "x2": x2, "y2": y2})
    if vp.xmin <= 0 <= vp.xmax:
        x1, y1 = canvas.px(0, vp.ymin)
        x2, y2 = canvas.px(0, vp.ymax)
        canvas.add("axis", "line", {"x1": x1, "y1": y1, "x2": x2, "y2": y2})


def _evaluate_grid(
    form: TernaryForm, xs: np.ndarray, ys: np.ndarray, coefficients: list[float]
) -> np.ndarray:
    grid_x, grid_y = np.meshgrid(xs, ys)
    z = np.zeros_like(grid_x)
    for (mono, _), value in zip(form.terms, coefficients, strict=True):
        z += value * grid_x ** mono[1] * grid_y ** mono[2]
    return z


def _draw_zero_set(canvas: _Canvas, form: TernaryForm, css_class: str) -> None:
    coefficients = _real_parts([v for _, v in form.terms], canvas.tol)
    if coefficients is None:
        canvas.warn(f"{css_class} of degree {form.degree} has complex coefficients")
        return
    vp = canvas.viewport
    xs = np.linspace(vp.xmin, vp.xmax, canvas.grid)
    ys = np.linspace(vp.ymin, vp.ymax, canvas.grid)
    z = _evaluate_grid(form, xs, ys, coefficients)
    generator = contourpy.contour_generator(
        x=xs, y=ys, z=z, line_type=contourpy.LineType.Separate
    )
    segments = [s for s in generator.lines(0.0) if len(s) >= 2]
    if not segments:
        canvas.warn(f"{css_class} of degree {form.degree} has no real points in view")
        return
    parts = []
    for segment in segments:
        coords = [" ".join(canvas.px(x, y)) for x, y in segment]
        parts.append("M " + " L ".join(coords))
    canvas.add(css_class, "path", {"d": " ".join(parts)})


def _clip(
    a: tuple[float, float, float], viewport: Viewport
) -> tuple[tuple[float, float], tuple[float, float]] | None:
    a0, a1, a2 = a
    hits: list[tuple[float, float]] = []
    if a2 != 0:
        for x in (viewport.xmin, viewport.xmax):
            hits.append((x, -(a0 + a1 * x) / a2))
    if a1 != 0:
        for y in (viewport.ymin, viewport.ymax):
            hits.append((-(a0 + a2 * y) / a1, y))
    inside = [h for h in hits if viewport.contains(*h)]
    if len(inside) < 2:
        return None
    return max(
        ((p, q) for p in inside for q in inside),
        key=lambda pq: (pq[0][0] - pq[1][0]) ** 2 + (pq[0][1] - pq[1][1]) ** 2,
    )


def _draw_line(canvas: _Canvas, line: ProjLine, css_class: str) -> None:
    values = _real_parts(line.coefficients, canvas.tol)
    if values is None:
        canvas.warn(f"{css_class} {line.coefficients} is not real")
        return
    scale = max(abs(v) for v in values)
    if scale <= canvas.tol.abs_floor:
        canvas.warn(f"{css_class} {line.coefficients} has no real part")
        return
    a0, a1, a2 = (v / scale for v in values)
    # x0 = 0 is the line at infinity of the chart
    if abs(a1) <= canvas.tol.abs_floor and abs(a2) <= canvas.tol.abs_floor:
        canvas.warn(f"{css_class} is the line at infinity")
        return
    ends = _clip((a0, a1, a2), canvas.viewport)
    if ends is None:
        canvas.warn(f"{css_class} {line.coefficients} misses the viewport")
        return
    (x1, y1), (x2, y2) = canvas.px(*ends[0]), canvas.px(*ends[1])
    canvas.add(css_class, "line", {"x1": x1, "y1": y1, "x2": x2, "y2": y2})


def _draw_point(canvas: _Canvas, point: ProjPoint, css_class: str) -> None:
    if not point.is_real(canvas.tol):
        canvas.warn(f"{css_class} {point.coords} is not real")
        return
    chart = point.affine(canvas.tol)
    if chart is None:
        canvas.warn(f"{css_class} {point.coords} is at infinity")
        return
    cx, cy = canvas.px(complex(chart[0]).real, complex(chart[1]).real)
    canvas.add(css_class, "circle", {"cx": cx, "cy": cy, "r": "4"})


@functools.singledispatch
def _draw(obj: Any, canvas: _Canvas) -> None:
    raise TypeError(f"cannot render {type(obj).__name__}")


@_draw.register
def _(obj: Conic, canvas: _Canvas) -> None:
    _draw_zero_set(canvas, obj.to_form(), "conic")


@_draw.register
def _(obj: PlaneCurve, canvas: _Canvas) -> None:
    _draw_zero_set(canvas, obj.form, "curve")


@_draw.register
def _(obj: ProjLine, canvas: _Canvas) -> None:
    _draw_line(canvas, obj, "line")


@_draw.register
def _(obj: ProjPoint, canvas: _Canvas) -> None:
    _draw_point(canvas, obj, "point")


@_draw.register
def _(obj: Gon, canvas: _Canvas) -> None:
    for line in obj.lines:
        _draw_line(canvas, line, "side")
    for vertex in obj.vertex_points():
        _draw_point(canvas, vertex, "vertex")


@_draw.register
def _(obj: ClosureReport, canvas: _Canvas) -> None:
    for line in obj.lines:
        _draw_line(canvas, line, "side")
    for vertex in obj.vertices:
        _draw_point(canvas, vertex, "vertex")


@_draw.register(list)
@_draw.register(tuple)
def _(obj: Sequence[Any], canvas: _Canvas) -> None:
    for item in obj:
        _draw(item, canvas)


def render_svg(
    objects: Sequence[Any],
    viewport: Viewport | None = None,
    *,
    grid: int = RENDER_GRID,
    size: int = RENDER_SIZE,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> RenderResult:
    """Draw conics, curves, gons, traced polygons, lines and points.

    Objects with no real trace in the viewport are skipped with a warning;
    an empty object list yields a document with axes only.
    """
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    canvas = _Canvas(viewport or Viewport(), size, grid, tol)
    _draw_axes(canvas)
    for obj in objects:
        _draw(obj, canvas)
    ET.indent(canvas.root)
    svg = ET.tostring(canvas.root, encoding="unicode", xml_declaration=True)
    counts = canvas.counts()
    _LOGGER.debug("rendered %s", counts)
    return RenderResult(svg + "\n", counts, canvas.warnings)
