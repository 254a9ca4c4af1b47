"""Command-line pipelines over scene files.

Every subcommand except ``matrix`` reads a scene, runs one pipeline and prints
a JSON certificate on standard output. The exit code is 0 when the
certificate passes, 1 when it fails and 2 for usage or scene errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from poncelet_bundles._version import __version__
from poncelet_bundles.closure import (
    ClosureReport,
    darboux_complete,
    incidence_count_on_D,
    porism_family,
    porism_pencil,
    porism_sections,
    retrace,
    split_gamma,
    start_flag,
    trace_gon,
)
from poncelet_bundles.const import (
    DEFAULT_SEED,
    DEFAULT_VIEWPORT,
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    RENDER_GRID,
)
from poncelet_bundles.exceptions import (
    CertificateError,
    DegenerateGonError,
    PonceletError,
    SceneError,
    UnsupportedOperationError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    PlaneCurve,
    TernaryForm,
    parameter_set_distance,
)
from poncelet_bundles.models import Certificate, Residual, Scene, load_scene
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Scalar,
    Tolerance,
    backend_of,
    chordal_distance,
    proportional,
    to_display,
)
from poncelet_bundles.projective import (
    CANONICAL_CONIC,
    Conic,
    ProjTransform,
    apply_transform,
    canonical_frame,
)
from poncelet_bundles.render import Viewport, render_svg
from poncelet_bundles.schwarzenberger import (
    Gon,
    Pencil,
    build_matrix,
    determinant_curve,
    pencil_curve,
    section_vanishes_at,
    zero_locus,
)

_LOGGER = logging.getLogger(__name__)

# Members sampled when a pipeline certifies a whole pencil.
_SAMPLE_WEIGHTS = ((1, 0), (0, 1), (1, 1), (1, -1), (2, 1))

_EPILOG = """\
examples:
  %(prog)s matrix 3
  %(prog)s zero-locus tests/fixtures/canonical_triangle.json
  %(prog)s trace tests/fixtures/chapple.json --n 3
  %(prog)s porism-pencil tests/fixtures/chapple.json --seed 7
  %(prog)s render-svg tests/fixtures/chapple.json --out chapple.svg
"""


# =============================================================================
# Run context
# =============================================================================


@dataclass
class _Run:
    """A parsed invocation: scene, tolerance policy and randomness."""

    args: argparse.Namespace
    scene: Scene
    tol: Tolerance
    rng: np.random.Generator

    @property
    def limit(self) -> float:
        """Residual tolerance: zero on the exact backend."""
        return 0.0 if self.scene.backend is Backend.EXACT else self.tol.certify

    def inputs(self, **names: str | None) -> dict[str, str]:
        found = {
            "scene": Path(self.args.scene).name,
            "backend": str(self.scene.backend),
        }
        found.update({k: v for k, v in names.items() if v is not None})
        return found

    def optional_name(self, option: str, role: str) -> str | None:
        value = getattr(self.args, option, None) or getattr(self.scene.roles, role)
        return None if value is None else str(value)

    def name(self, option: str, role: str) -> str:
        value = self.optional_name(option, role)
        if value is None:
            raise SceneError(f"no {role} given: pass --{option} or set roles.{role}")
        return value

    def inner(self) -> Conic:
        name = self.optional_name("inner", "inner")
        return CANONICAL_CONIC if name is None else self.scene.conic(name)

    def frame(self) -> ProjTransform | None:
        """Map from the scene into the canonical frame of the inner conic."""
        if self.optional_name("inner", "inner") is None:
            return None
        return canonical_frame(self.inner(), self.tol)

    def polygon_size(self) -> int:
        n = self.args.n if self.args.n is not None else self.scene.roles.n
        if n is None:
            raise SceneError("no polygon size given: pass --n or set roles.n")
        return int(n)


def _to_scene(obj: Any, frame: ProjTransform | None) -> Any:
    return obj if frame is None else apply_transform(frame.inverse(), obj)


def _coords(values: Sequence[Scalar]) -> list[Any]:
    return [to_display(v) for v in values]


def _vertex_evidence(gon: Gon) -> dict[str, list[Any]]:
    return {f"{i}{j}": _coords(v.coords) for (i, j), v in gon.vertices}


def _terms(form: TernaryForm) -> list[dict[str, Any]]:
    return [
        {"monomial": list(mono), "coefficient": to_display(value)}
        for mono, value in form.terms
    ]


def _proportionality(
    a: Sequence[Scalar], b: Sequence[Scalar], tol: Tolerance
) -> float:
    """0 for exactly proportional vectors, else their chordal distance."""
    if backend_of(*a, *b) is Backend.EXACT and proportional(a, b, tol):
        return 0.0
    return chordal_distance(a, b)


def _failure(operation: str, inputs: dict[str, str], err: PonceletError) -> Certificate:
    problems = [{"message": err.message}, *err.details]
    return Certificate.decide(operation, inputs, problems=problems)


# =============================================================================
# Pipelines
# =============================================================================


def _run_zero_locus(run: _Run) -> Certificate:
    section = run.name("form", "section")
    f = run.scene.form(section)
    gon = zero_locus(f, run.tol)
    problems = gon.violations(run.tol)
    for (i, j), vertex in gon.vertices:
        if not section_vanishes_at(f, vertex, run.tol):
            problems.append(
                {"message": "section does not vanish", "where": f"vertex {i},{j}"}
            )
    incidence = max(
        (gon.lines[k].residual(v) for (i, j), v in gon.vertices for k in (i, j)),
        default=0.0,
    )
    return Certificate.decide(
        "zero-locus",
        run.inputs(section=section),
        residuals={"incidence": Residual(value=incidence, tolerance=run.limit)},
        evidence={
            "n": gon.n,
            "vertex_count": len(gon.vertices),
            "parameters": [_coords(t.coords) for t in gon.parameters],
            "vertices": _vertex_evidence(_to_scene(gon, run.frame())),
        },
        problems=problems,
    )


def _member_residuals(
    run: _Run, pencil: Pencil, curve: PlaneCurve
) -> tuple[float, int, list[str]]:
    """Worst curve residual over the vertices of sampled pencil members.

    Members that do not split into distinct lines on the current backend
    are skipped and reported.
    """
    worst = 0.0
    checked = 0
    skipped = []
    for lam, mu in _SAMPLE_WEIGHTS:
        try:
            gon = zero_locus(pencil.member(lam, mu), run.tol)
        except (UnsupportedOperationError, DegenerateGonError) as err:
            skipped.append(f"{lam}:{mu} {err.message}")
            continue
        checked += 1
        worst = max([worst, *(curve.residual(v.coords) for v in gon.vertex_points())])
    return worst, checked, skipped


def _run_det_curve(run: _Run) -> Certificate:
    if run.args.pencil:
        first, second = run.args.pencil
    elif len(run.scene.forms) >= 2:
        first, second = list(run.scene.forms)[:2]
    else:
        raise SceneError("det-curve needs two forms: pass --pencil F G")
    f, g = run.scene.form(first), run.scene.form(second)
    curve = determinant_curve(f, g, run.tol)
    pencil = Pencil(f, g, run.frame())
    worst, checked, skipped = _member_residuals(run, pencil, curve)
    problems = []
    if curve.degree != f.degree - 1:
        problems.append({"message": f"curve has degree {curve.degree}"})
    if checked == 0:
        problems.append({"message": "no sampled member splits into lines"})
    return Certificate.decide(
        "det-curve",
        run.inputs(f=first, g=second),
        residuals={"vertices": Residual(value=worst, tolerance=run.limit)},
        evidence={
            "degree": curve.degree,
            "curve": _terms(pencil_curve(pencil, run.tol).form),
            "members_checked": checked,
            "members_skipped": skipped,
        },
        problems=problems,
    )


def _run_darboux(run: _Run) -> Certificate:
    section = run.name("form", "section")
    curve_name = run.name("curve", "curve")
    f = run.scene.form(section)
    s = run.scene.curve(curve_name)
    t = darboux_complete(run.inner(), s, f, run.tol)
    frame = run.frame()
    target = s if frame is None else apply_transform(frame, s)
    det = determinant_curve(f, t, run.tol)
    agreement = _proportionality(
        det.form.coefficient_vector(), target.form.coefficient_vector(), run.tol
    )
    worst, checked, skipped = _member_residuals(run, Pencil(f, t), target)
    problems = []
    if checked == 0:
        problems.append({"message": "no sampled member splits into lines"})
    return Certificate.decide(
        "darboux",
        run.inputs(
            section=section,
            curve=curve_name,
            inner=run.optional_name("inner", "inner"),
        ),
        residuals={
            "curve": Residual(value=agreement, tolerance=run.limit),
            "vertices": Residual(value=worst, tolerance=run.limit),
        },
        evidence={
            "completion": _coords(t.coefficients),
            "members_checked": checked,
            "members_skipped": skipped,
        },
        problems=problems,
    )


def _trace(run: _Run) -> tuple[ClosureReport, Conic, Conic]:
    """Run the iteration oracle on the float copy of the scene."""
    scene = run.scene.with_backend(Backend.FLOAT)
    c = scene.conic(run.name("inner", "inner"))
    d = scene.conic(run.name("outer", "outer"))
    point = scene.point(run.name("start", "start"))
    branch = run.args.branch if run.args.branch is not None else scene.roles.branch
    flag = start_flag(c, d, point, branch, run.tol)
    return trace_gon(flag, run.polygon_size(), run.tol), c, d


def _run_trace(run: _Run) -> Certificate:
    inputs = run.inputs(
        inner=run.name("inner", "inner"),
        outer=run.name("outer", "outer"),
        start=run.name("start", "start"),
    )
    report, _, _ = _trace(run)
    evidence: dict[str, Any] = {
        "n": report.n,
        "closed": report.closed,
        "vertices": [_coords(v.coords) for v in report.vertices],
    }
    if report.form is not None:
        evidence["section"] = _coords(report.form.coefficients)
    return Certificate.decide(
        "trace",
        inputs,
        residuals={
            "closure": Residual(value=report.residual, tolerance=run.tol.certify)
        },
        evidence=evidence,
    )


def _closed_gon(run: _Run) -> tuple[Gon, Conic, Conic]:
    """Ordered gon of a traced polygon that closes."""
    report, c, d = _trace(run)
    if report.gon is None:
        raise CertificateError(
            "the traced polygon does not close",
            [{"message": "closure residual", "residual": report.residual}],
        )
    return report.gon, c, d


def _closed_section(run: _Run) -> tuple[Conic, Conic, BinaryForm]:
    """Inner conic, outer conic and a closed section in one frame.

    A named section is read in the frame of the scene's own backend; without
    one, the section of a traced closed polygon is used with the float conics
    it was traced on.
    """
    section = run.optional_name("form", "section")
    if section is not None:
        d = run.scene.conic(run.name("outer", "outer"))
        return run.inner(), d, run.scene.form(section)
    gon, c, d = _closed_gon(run)
    return c, d, gon.binary_form()


def _porism_inputs(run: _Run) -> dict[str, str]:
    return run.inputs(
        inner=run.optional_name("inner", "inner"),
        outer=run.name("outer", "outer"),
        section=run.optional_name("form", "section"),
        start=run.optional_name("start", "start"),
    )


def _run_porism_pencil(run: _Run) -> Certificate:
    inputs = _porism_inputs(run)
    c, d, f_closed = _closed_section(run)
    kernel = porism_sections(c, d, f_closed, run.tol)
    evidence: dict[str, Any] = {"dimension": len(kernel), "n": f_closed.degree}
    try:
        pencil = porism_pencil(c, d, f_closed, run.tol)
    except CertificateError as err:
        failed = _failure("porism-pencil", inputs, err)
        return failed.model_copy(update={"evidence": evidence})
    evidence["pencil"] = [_coords(p.coefficients) for p in (pencil.f, pencil.g)]
    retraced = 0.0
    agreement = 0.0
    gons = porism_family(c, d, pencil, run.args.samples, run.rng, run.tol)
    for gon in gons:
        report = retrace(gon, c, d, run.tol)
        retraced = max(retraced, report.residual)
        if report.gon is None:
            agreement = max(agreement, 1.0)
            continue
        # both parameter sets live in the canonical frame of C
        distance = parameter_set_distance(report.gon.parameters, gon.parameters)
        agreement = max(agreement, distance)
    evidence["samples"] = len(gons)
    return Certificate.decide(
        "porism-pencil",
        inputs,
        residuals={
            "retrace": Residual(value=retraced, tolerance=run.tol.certify),
            "parameters": Residual(value=agreement, tolerance=run.tol.certify),
        },
        evidence=evidence,
    )


def _run_split_gamma(run: _Run) -> Certificate:
    inputs = _porism_inputs(run)
    c, d, f_closed = _closed_section(run)
    pencil = porism_pencil(c, d, f_closed, run.tol)
    gamma2, gamma1 = split_gamma(pencil, d, run.tol)
    product = d.to_form() * gamma1.form
    residual = _proportionality(
        product.coefficient_vector(), gamma2.form.coefficient_vector(), run.tol
    )
    exact = backend_of(*pencil.f.coefficients, *pencil.g.coefficients, *d.matrix)
    problems = []
    if gamma1.degree != f_closed.degree - 3:
        problems.append({"message": f"residual curve has degree {gamma1.degree}"})
    return Certificate.decide(
        "split-gamma",
        inputs,
        residuals={
            "division": Residual(
                value=residual,
                tolerance=0.0 if exact is Backend.EXACT else run.tol.certify,
            )
        },
        evidence={
            "gamma2_degree": gamma2.degree,
            "gamma1_degree": gamma1.degree,
            "gamma1": _terms(gamma1.form),
        },
        problems=problems,
    )


def _complete_gon(run: _Run) -> Gon:
    """Complete gon of the scene section, or of a traced closed polygon."""
    section = run.optional_name("form", "section")
    if section is None:
        traced, _, _ = _closed_gon(run)
        return Gon.from_parameters(traced.parameters, frame=traced.frame)
    f = run.scene.form(section)
    try:
        gon = zero_locus(f, run.tol)
    except UnsupportedOperationError:
        _LOGGER.debug("section %s does not split over QQ, using float roots", section)
        floated = BinaryForm.from_coefficients(f.coefficients, Backend.FLOAT)
        gon = zero_locus(floated, run.tol)
    return _to_scene(gon, run.frame())  # type: ignore[no-any-return]


def _run_incidence(run: _Run) -> Certificate:
    outer = run.name("outer", "outer")
    gon = _complete_gon(run)
    report = incidence_count_on_D(gon, run.scene.conic(outer), run.tol)
    return Certificate.decide(
        "incidence",
        run.inputs(
            outer=outer,
            section=run.optional_name("form", "section"),
            start=run.optional_name("start", "start"),
        ),
        evidence={
            "n": report.n,
            "vertices_on_d": [f"{i}{j}" for i, j in report.vertices_on_d],
            "line_counts": list(report.line_counts),
        },
        problems=report.problems,
    )


def _render_objects(run: _Run) -> list[Any]:
    scene = run.scene
    objects: list[Any] = [scene.conic(name) for name in scene.conics]
    objects += [scene.curve(name) for name in scene.curves]
    mode = run.args.gon
    if mode == "auto":
        if run.optional_name("form", "section") is not None:
            mode = "complete"
        elif scene.roles.start is not None and (run.args.n or scene.roles.n):
            mode = "traced"
        else:
            mode = "none"
    if mode == "complete":
        objects.append(_complete_gon(run))
    elif mode == "traced":
        objects.append(_trace(run)[0])
    objects += [scene.line(name) for name in scene.lines]
    objects += [scene.point(name) for name in scene.points]
    return objects


def _run_render(run: _Run) -> Certificate:
    viewport = Viewport(*run.args.viewport)
    result = render_svg(
        _render_objects(run), viewport, grid=run.args.grid, tol=run.tol
    )
    if run.args.out:
        Path(run.args.out).write_text(result.svg, encoding="utf-8")
    else:
        sys.stdout.write(result.svg)
    return Certificate.decide(
        "render-svg",
        run.inputs(),
        evidence={
            "counts": result.counts,
            "empty": result.empty,
            "warnings": result.warnings,
        },
    )


_PIPELINES: dict[str, Callable[[_Run], Certificate]] = {
    "zero-locus": _run_zero_locus,
    "det-curve": _run_det_curve,
    "darboux": _run_darboux,
    "trace": _run_trace,
    "porism-pencil": _run_porism_pencil,
    "split-gamma": _run_split_gamma,
    "incidence": _run_incidence,
    "render-svg": _run_render,
}


# =============================================================================
# Argument parsing
# =============================================================================


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--backend",
        choices=[b.value for b in Backend],
        help="Convert the scene to this backend before running",
    )
    parent.add_argument(
        "--tol", type=float, help="Relative tolerance (overrides the scene's rel_eps)"
    )
    parent.add_argument(
        "--seed", type=int, default=DEFAULT_SEED, help="Seed for random sampling"
    )
    parent.add_argument("--out", help="Also write the output to this path")
    parent.add_argument(
        "-v", "--verbose", action="store_true", help="Enable debug logging"
    )
    return parent


def _scene_parser(
    subparsers: Any, name: str, help_text: str, parent: argparse.ArgumentParser
) -> argparse.ArgumentParser:
    parser: argparse.ArgumentParser = subparsers.add_parser(
        name, help=help_text, parents=[parent]
    )
    parser.add_argument("scene", help="Scene JSON file")
    parser.add_argument("--inner", help="Name of the inscribed conic C")
    parser.add_argument("--outer", help="Name of the circumscribed conic D")
    parser.add_argument("--form", help="Name of the section f")
    parser.add_argument("--start", help="Name of the start point on D")
    parser.add_argument("--n", type=int, help="Polygon size")
    parser.add_argument("--branch", type=int, choices=[0, 1], help="Start tangent")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """The ``poncelet-bundles`` argument parser."""
    parser = argparse.ArgumentParser(
        prog="poncelet-bundles",
        description="Vector-bundle pipelines for Poncelet's closure theorem",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=_EPILOG,
    )
    parser.add_argument("--version", action="version", version=__version__)
    parent = _common_options()
    subparsers = parser.add_subparsers(dest="command", required=True)

    matrix = subparsers.add_parser(
        "matrix", help="Print the banded matrix M for degree n", parents=[parent]
    )
    matrix.add_argument("n", type=int)

    _scene_parser(subparsers, "zero-locus", "Vertices cut out by a section", parent)
    det = _scene_parser(
        subparsers, "det-curve", "Determinant curve of a pencil", parent
    )
    det.add_argument("--pencil", nargs=2, metavar=("F", "G"), help="Two form names")
    darboux = _scene_parser(
        subparsers, "darboux", "Complete a section to a pencil on a curve", parent
    )
    darboux.add_argument("--curve", help="Name of the curve S")
    _scene_parser(subparsers, "trace", "Tangent-chord iteration", parent)
    porism = _scene_parser(
        subparsers, "porism-pencil", "Pencil of closed polygons", parent
    )
    porism.add_argument(
        "--samples", type=int, default=10, help="Pencil members to re-trace"
    )
    _scene_parser(
        subparsers, "split-gamma", "Split the determinant curve by D", parent
    )
    _scene_parser(subparsers, "incidence", "Vertices of a complete gon on D", parent)
    render = _scene_parser(subparsers, "render-svg", "SVG of the real slice", parent)
    render.add_argument(
        "--gon",
        choices=["auto", "complete", "traced", "none"],
        default="auto",
        help="Which polygon to draw",
    )
    render.add_argument(
        "--viewport",
        nargs=4,
        type=float,
        default=list(DEFAULT_VIEWPORT),
        metavar=("XMIN", "XMAX", "YMIN", "YMAX"),
    )
    render.add_argument("--grid", type=int, default=RENDER_GRID)
    return parser


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _prepare(args: argparse.Namespace) -> _Run:
    scene = load_scene(args.scene)
    if args.backend is not None:
        scene = scene.with_backend(Backend(args.backend))
    tol = scene.tolerance_policy(DEFAULT_TOLERANCE)
    if args.tol is not None:
        tol = tol.with_overrides(rel_eps=args.tol)
    return _Run(args, scene, tol, np.random.default_rng(args.seed))


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text + "\n")
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``poncelet-bundles`` console script."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)

    if args.command == "matrix":
        if args.n < 2:
            print(f"error: n must be >= 2, got {args.n}", file=sys.stderr)
            return EXIT_USAGE
        _emit(str(build_matrix(args.n)), args.out)
        return EXIT_PASS

    try:
        run = _prepare(args)
    except (SceneError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"error: cannot read scene: {err}", file=sys.stderr)
        return EXIT_USAGE

    operation = args.command
    try:
        certificate = _PIPELINES[operation](run)
    except (SceneError, UnsupportedOperationError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except PonceletError as err:
        certificate = _failure(operation, run.inputs(), err)

    if operation == "render-svg":
        # --out holds the SVG; without it the SVG already went to stdout
        stream = sys.stdout if args.out else sys.stderr
        stream.write(certificate.to_json() + "\n")
    else:
        _emit(certificate.to_json(), args.out)
    _LOGGER.debug("%s verdict: %s", operation, certificate.verdict)
    return EXIT_PASS if certificate.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
