"""Tests for the presentation matrix, zero loci and determinant curves."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from poncelet_bundles.exceptions import (
    DegenerateGonError,
    DependentSectionsError,
    UnsupportedOperationError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    P1Point,
    PlaneCurve,
    TernaryForm,
    from_roots,
)
from poncelet_bundles.numeric import Backend, rank
from poncelet_bundles.projective import (
    CANONICAL_CONIC,
    ProjPoint,
    ProjTransform,
    apply_transform,
    tangent_line_at_parameter,
)
from poncelet_bundles.schwarzenberger import (
    Gon,
    Pencil,
    bezout_exhaustion,
    build_matrix,
    determinant_curve,
    evaluate_section_fiber,
    pencil_curve,
    pencil_member_through,
    section_vanishes_at,
    vertex_curve_space,
    vertex_of,
    zero_locus,
)


def _random_parameters(rng: np.random.Generator, n: int) -> list[P1Point]:
    return [P1Point(complex(*rng.normal(size=2)), 1.0) for _ in range(n)]


def _random_section(rng: np.random.Generator, n: int) -> BinaryForm:
    return from_roots(_random_parameters(rng, n))


def _random_point(rng: np.random.Generator) -> ProjPoint:
    return ProjPoint(tuple(complex(*rng.normal(size=2)) for _ in range(3)))


def _random_exact_section(rng: np.random.Generator, n: int) -> BinaryForm:
    """Product of n distinct rational linear factors."""
    ratios: set[Fraction] = set()
    while len(ratios) < n:
        ratios.add(Fraction(int(rng.integers(-12, 13)), int(rng.integers(1, 5))))
    return from_roots([P1Point(r, 1) for r in sorted(ratios)])


def _random_exact_point(rng: np.random.Generator) -> ProjPoint:
    while True:
        coords = rng.integers(-20, 21, size=3)
        if coords.any():
            return ProjPoint(tuple(Fraction(int(v)) for v in coords))


class TestSchwMatrix:
    """Tests for the banded presentation matrix."""

    def test_matrix_three(self) -> None:
        """Test the printed 4x2 band for n = 3."""
        m = build_matrix(3)

        assert m.shape == (4, 2)
        assert m.symbolic() == [
            ["x0", "0"],
            ["x1", "x0"],
            ["x2", "x1"],
            ["0", "x2"],
        ]
        assert str(m).splitlines()[0] == "[ x0   0 ]"

    def test_band_pattern(self) -> None:
        """Test the band layout for n = 2..8."""
        for n in range(2, 9):
            grid = build_matrix(n).symbolic()

            assert len(grid) == n + 1
            for i, j in itertools.product(range(n + 1), range(n - 1)):
                expected = {0: "x0", 1: "x1", 2: "x2"}.get(i - j, "0")
                assert grid[i][j] == expected

    def test_n_below_two_rejected(self) -> None:
        """Test that n must be at least 2."""
        with pytest.raises(ValueError, match="n must be >= 2, got 1"):
            build_matrix(1)

    def test_rank_at_random_points(self, rng: np.random.Generator) -> None:
        """Test that M(x) has full column rank n - 1 away from x = 0."""
        for n in range(2, 9):
            m = build_matrix(n)
            for _ in range(100):
                assert rank(m.evaluate(_random_point(rng))) == n - 1
                assert rank(m.evaluate(_random_exact_point(rng))) == n - 1

    def test_columns_are_quadric_multiples(self) -> None:
        """Test that each column is u^j v^(n-2-j) times the point quadric."""
        x = ProjPoint.of(1, -1, 3)
        m = build_matrix(4).evaluate(x)

        assert m.column(0) == (1, -1, 3, 0, 0)
        assert m.column(2) == (0, 0, 1, -1, 3)


class TestVanishing:
    """Tests for the fiber test of a section at a point."""

    def test_section_vanishes_at_vertices(self, triangle_section: BinaryForm) -> None:
        """Test the three vertices of u^3 - u*v^2."""
        vertices = (
            ProjPoint.of(1, -1, 0),
            ProjPoint.of(1, 1, 0),
            ProjPoint.of(1, 0, -1),
        )
        for vertex in vertices:
            assert section_vanishes_at(triangle_section, vertex)
            assert evaluate_section_fiber(triangle_section, vertex) == (0, 0, 0)

    def test_section_does_not_vanish_elsewhere(
        self, triangle_section: BinaryForm
    ) -> None:
        """Test a point off the vertex set."""
        assert not section_vanishes_at(triangle_section, ProjPoint.of(1, 2, 3))
        assert not section_vanishes_at(
            triangle_section, ProjPoint.of(1, 2, 3), method="rank"
        )

    def test_vertex_at_infinity(self) -> None:
        """Test the shifted chart for vertices on x0 = 0."""
        f = from_roots([P1Point(0, 1), P1Point(1, 0), P1Point(1, 1)])
        vertex = vertex_of(P1Point(0, 1), P1Point(1, 0))

        assert vertex.coords[0] == 0
        assert section_vanishes_at(f, vertex)
        assert section_vanishes_at(f, vertex, method="division")

    def test_fiber_in_the_plain_chart(self) -> None:
        """Test that the pair is (r1(x), r0(x)) with no shift when x0 is large."""
        fiber = evaluate_section_fiber(
            BinaryForm.from_coefficients([1, 0, -1]), ProjPoint.of(1, 0, 1)
        )

        assert fiber == (0, -2, 0)
        assert fiber.shift == 0

    def test_fiber_reports_its_chart_shift(self) -> None:
        """Test that a point on x0 = 0 is evaluated in a shifted chart."""
        # uv becomes 2u^2 + uv and (0:0:1) becomes (4:4:1) under v -> v + 2u
        fiber = evaluate_section_fiber(
            BinaryForm.from_coefficients([0, 1, 0]), ProjPoint.of(0, 0, 1)
        )

        assert fiber.shift == 2
        assert (fiber.r1, fiber.r0) == (-4, -2)

    def test_zero_form_rejected(self) -> None:
        """Test that the zero form is not a section."""
        with pytest.raises(ValueError, match="zero form"):
            section_vanishes_at(BinaryForm.zero(3), ProjPoint.of(1, 0, 0))

    def test_three_tests_agree_on_random_sections(
        self, rng: np.random.Generator
    ) -> None:
        """Test divisibility, rank and vertex membership on float sections."""
        for n in range(2, 7):
            for _ in range(5):
                params = _random_parameters(rng, n)
                f = from_roots(params)
                gon = zero_locus(f)

                assert len(gon.vertices) == math.comb(n, 2)
                for vertex in gon.vertex_points():
                    assert section_vanishes_at(f, vertex)
                for _ in range(10):
                    assert not section_vanishes_at(f, _random_point(rng))

    @pytest.mark.slow
    @pytest.mark.parametrize("backend", [Backend.EXACT, Backend.FLOAT])
    def test_three_tests_agree_at_scale(
        self, backend: Backend, rng: np.random.Generator
    ) -> None:
        """Test 50 sections per degree at 100 points each on one backend."""
        for n in range(2, 7):
            for _ in range(50):
                if backend is Backend.EXACT:
                    f = _random_exact_section(rng, n)
                    points = [_random_exact_point(rng) for _ in range(100)]
                else:
                    f = _random_section(rng, n)
                    points = [_random_point(rng) for _ in range(100)]
                gon = zero_locus(f)

                assert f.backend is backend
                for vertex in gon.vertex_points():
                    assert section_vanishes_at(f, vertex)
                for x in points:
                    on_gon = any(x.proportional_to(v) for v in gon.vertex_points())
                    assert section_vanishes_at(f, x) == on_gon


class TestZeroLocus:
    """Tests for complete gons cut out by sections."""

    def test_exact_triangle(self, triangle_section: BinaryForm) -> None:
        """Test the zero locus of u^3 - u*v^2."""
        gon = zero_locus(triangle_section)

        assert gon.n == 3
        assert set(gon.vertex_points()) == {
            ProjPoint.of(1, -1, 0),
            ProjPoint.of(1, 1, 0),
            ProjPoint.of(1, 0, -1),
        }
        assert gon.violations() == []
        assert not any(CANONICAL_CONIC.contains(v) for v in gon.vertex_points())

    def test_lines_are_tangent(self, triangle_section: BinaryForm) -> None:
        """Test that every side is a tangent line of the canonical conic."""
        gon = zero_locus(triangle_section)

        for t, line in zip(gon.parameters, gon.lines, strict=True):
            assert line == tangent_line_at_parameter(t)

    def test_repeated_root_rejected(self) -> None:
        """Test that a square factor gives no gon."""
        with pytest.raises(DegenerateGonError):
            zero_locus(BinaryForm.from_coefficients([1, -2, 1, 0]))

    def test_irrational_exact_refused(self) -> None:
        """Test that an exact section must split over QQ."""
        with pytest.raises(UnsupportedOperationError):
            zero_locus(BinaryForm.from_coefficients([1, 0, -2]))

    def test_vertices_on_lines(self, rng: np.random.Generator) -> None:
        """Test the incidence structure of a random complete pentagon."""
        gon = zero_locus(_random_section(rng, 5))

        assert gon.violations() == []
        for index in range(5):
            assert len(gon.vertices_on_line(index)) == 4

    def test_gon_transform_keeps_incidence(self, rng: np.random.Generator) -> None:
        """Test that a moved gon keeps its incidences and tracks its frame."""
        transform = ProjTransform.random(rng)
        gon = apply_transform(transform, zero_locus(_random_section(rng, 4)))

        assert gon.violations() == []
        assert gon.frame is not None
        back = Gon.from_parameters(gon.parameters, gon.frame)
        for a, b in zip(back.lines, gon.lines, strict=True):
            assert a.distance(b) < 1e-9


class TestDeterminantCurve:
    """Tests for determinant curves of pencils of sections."""

    def test_worked_example(self) -> None:
        """Test the pencil (uv, u^2 - v^2), whose curve is x0 + x2."""
        f = BinaryForm.from_coefficients([0, 1, 0])
        g = BinaryForm.from_coefficients([1, 0, -1])
        curve = determinant_curve(f, g)

        assert curve.degree == 1
        assert curve.form.proportional_to(TernaryForm.linear([1, 0, 1]))

    def test_dependent_sections(self, triangle_section: BinaryForm) -> None:
        """Test that proportional sections have no curve."""
        with pytest.raises(DependentSectionsError):
            determinant_curve(triangle_section, triangle_section * 3)
        with pytest.raises(DependentSectionsError):
            Pencil(triangle_section, triangle_section * Fraction(1, 2))

    def test_degree_mismatch(self, triangle_section: BinaryForm) -> None:
        """Test that a pencil needs one degree."""
        with pytest.raises(ValueError, match="degrees differ"):
            determinant_curve(
                triangle_section, BinaryForm.from_coefficients([1, 0, 1])
            )

    def test_exact_curve_through_member_vertices(
        self, triangle_section: BinaryForm
    ) -> None:
        """Test exact vanishing on the vertices of split members."""
        g = from_roots([P1Point(2, 1), P1Point(-2, 1), P1Point(1, 0)])
        curve = determinant_curve(triangle_section, g)

        assert curve.degree == 2
        for member in (triangle_section, g, triangle_section - g):
            try:
                gon = zero_locus(member)
            except UnsupportedOperationError:
                continue
            assert all(curve.contains(v.coords) for v in gon.vertex_points())

    @pytest.mark.slow
    def test_pencil_sweep(self, rng: np.random.Generator) -> None:
        """Test the determinant curve over random pencils for n = 2..5."""
        for n in range(2, 6):
            for _ in range(10):
                pencil = Pencil(_random_section(rng, n), _random_section(rng, n))
                curve = determinant_curve(pencil.f, pencil.g)

                assert curve.degree == n - 1
                for lam, mu in rng.normal(size=(5, 2)):
                    member = pencil.member(complex(lam), complex(mu))
                    for vertex in zero_locus(member).vertex_points():
                        assert curve.residual(vertex.coords) < 1e-9

    def test_pencil_curve_follows_frame(self, rng: np.random.Generator) -> None:
        """Test that a moved pencil reports its curve in the moved frame."""
        transform = ProjTransform.random(rng)
        pencil = apply_transform(
            transform, Pencil(_random_section(rng, 3), _random_section(rng, 3))
        )
        curve = pencil_curve(pencil)
        gon = apply_transform(transform, zero_locus(pencil.member(1.0, 2.0)))

        assert all(curve.residual(v.coords) < 1e-9 for v in gon.vertex_points())

    def test_vertex_curve_space_dimension(self, rng: np.random.Generator) -> None:
        """Test that the curves through a gon's vertices form an n-space."""
        for n in range(2, 6):
            f = _random_section(rng, n)
            space = vertex_curve_space(f)
            vertices = zero_locus(f).vertex_points()

            assert len(space) == n
            for curve in space:
                assert all(curve.residual(v.coords) < 1e-9 for v in vertices)

    def test_member_through_curve_point(self, rng: np.random.Generator) -> None:
        """Test that a curve point is a vertex of some member."""
        pencil = Pencil(_random_section(rng, 3), _random_section(rng, 3))
        vertex = zero_locus(pencil.member(0.7, -1.3)).vertex_points()[0]
        member = pencil_member_through(pencil, vertex)

        assert section_vanishes_at(member, vertex)
        assert member.proportional_to(pencil.member(0.7, -1.3))

    def test_bezout_exhaustion(self, triangle_section: BinaryForm) -> None:
        """Test that a side meets a curve only at the gon's vertices."""
        g = from_roots([P1Point(2, 1), P1Point(-2, 1), P1Point(1, 0)])
        gon = zero_locus(triangle_section)
        reports = bezout_exhaustion(gon, determinant_curve(triangle_section, g))

        assert [r.vertex_count for r in reports] == [2, 2, 2]
        assert all(r.exhausted for r in reports)
        assert all(r.residual == 0 for r in reports)

    def test_bezout_exhaustion_fails_for_foreign_curve(
        self, triangle_section: BinaryForm
    ) -> None:
        """Test that a curve missing the vertices is not exhausted."""
        gon = zero_locus(triangle_section)
        curve = PlaneCurve(CANONICAL_CONIC.to_form())

        assert not any(r.exhausted for r in bezout_exhaustion(gon, curve))


def test_float_and_exact_zero_loci_agree(triangle_section: BinaryForm) -> None:
    """Test that the two backends find the same vertices."""
    exact = zero_locus(triangle_section)
    floating = zero_locus(
        BinaryForm.from_coefficients(triangle_section.coefficients, Backend.FLOAT)
    )

    for vertex in exact.vertex_points():
        assert min(vertex.distance(v) for v in floating.vertex_points()) < 1e-12
