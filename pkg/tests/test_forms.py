"""Tests for binary and ternary forms."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as npoly
import pytest

from poncelet_bundles.exceptions import InexactDivisionError, UnsupportedOperationError
from poncelet_bundles.forms import (
    BinaryForm,
    P1Point,
    PlaneCurve,
    TernaryForm,
    compose_with_parametrization,
    from_roots,
    interpolate_curve,
    is_squarefree,
    monomials,
    parameter_set_distance,
    pseudo_remainder,
    pseudo_remainder_at,
    quadric_of_point,
    rational_roots,
    roots,
    solve_binary_quadratic,
)
from poncelet_bundles.numeric import Backend
from poncelet_bundles.projective import (
    CANONICAL_CONIC,
    Conic,
    ProjPoint,
    parametrize_conic,
)


def _random_form(rng: np.random.Generator, degree: int) -> BinaryForm:
    return BinaryForm.from_coefficients(
        [complex(*rng.normal(size=2)) for _ in range(degree + 1)]
    )


class TestP1Point:
    """Tests for points of the projective line."""

    def test_normalized_on_construction(self) -> None:
        """Test that equal classes compare equal."""
        assert P1Point(2, 4) == P1Point(1, 2)
        assert P1Point(Fraction(0), Fraction(3)) == P1Point(0, 1)

    def test_origin_rejected(self) -> None:
        """Test that (0:0) is not a point."""
        with pytest.raises(ValueError, match="projective line"):
            P1Point(0, 0)

    def test_set_distance_is_order_free(self) -> None:
        """Test multiset matching of parameters."""
        a = [P1Point(1.0, 0.0), P1Point(0.0, 1.0), P1Point(1.0, 1.0)]
        b = [P1Point(1.0, 1.0), P1Point(1.0, 0.0), P1Point(0.0, 1.0)]

        assert parameter_set_distance(a, b) == pytest.approx(0.0, abs=1e-15)
        assert parameter_set_distance(a, b[:2]) == float("inf")


class TestBinaryForm:
    """Tests for binary form arithmetic."""

    def test_degree_and_evaluation(self) -> None:
        """Test u-descending coefficient order."""
        f = BinaryForm.from_coefficients([1, 0, -1, 0])

        assert f.degree == 3
        assert f.evaluate(Fraction(2), Fraction(1)) == 6
        assert f.backend is Backend.EXACT

    def test_product_and_power(self) -> None:
        """Test multiplication of forms."""
        u_minus_v = BinaryForm.from_coefficients([1, -1])
        u_plus_v = BinaryForm.from_coefficients([1, 1])

        assert u_minus_v * u_plus_v == BinaryForm.from_coefficients([1, 0, -1])
        assert u_plus_v**2 == BinaryForm.from_coefficients([1, 2, 1])

    def test_mixed_degree_sum_rejected(self) -> None:
        """Test that only forms of one degree can be added."""
        with pytest.raises(ValueError, match="degrees"):
            BinaryForm.from_coefficients([1, 0]) + BinaryForm.from_coefficients([1])

    def test_float_contaminates(self) -> None:
        """Test that a float scalar moves the form to the float backend."""
        f = BinaryForm.from_coefficients([1, 2]) * 0.5

        assert f.backend is Backend.FLOAT

    def test_substitute_linear(self) -> None:
        """Test the change of variables v -> v + u."""
        f = BinaryForm.from_coefficients([0, 0, 1])
        moved = f.substitute_linear(((1, 0), (1, 1)))

        assert moved == BinaryForm.from_coefficients([1, 2, 1])

    def test_string(self) -> None:
        """Test the human-readable rendering."""
        assert str(BinaryForm.from_coefficients([1, 0, -1, 0])) == "1*u^3 + -1*u*v^2"


class TestRoots:
    """Tests for root finding on both backends."""

    def test_from_roots_factor_convention(self) -> None:
        """Test that (a:b) contributes the factor b*u - a*v."""
        f = from_roots([P1Point(0, 1), P1Point(1, 1), P1Point(-1, 1)])

        assert f.proportional_to(BinaryForm.from_coefficients([1, 0, -1, 0]))

    def test_rational_roots(self, triangle_section: BinaryForm) -> None:
        """Test exact factorisation over QQ."""
        found = rational_roots(triangle_section)

        assert len(found) == 3
        assert set(found) == {P1Point(-1, 1), P1Point(0, 1), P1Point(1, 1)}

    def test_rational_roots_at_infinity(self) -> None:
        """Test that vanishing leading coefficients give the root (1:0)."""
        found = rational_roots(BinaryForm.from_coefficients([0, 1, 0]))

        assert set(found) == {P1Point(1, 0), P1Point(0, 1)}

    def test_rational_roots_are_ordered(self) -> None:
        """Test that finite roots ascend in u/v and infinity comes last."""
        # v * (u - 2v) * u * (u + v)
        f = BinaryForm.from_coefficients([0, 1, -1, -2, 0])

        found = rational_roots(f)

        assert found == [P1Point(-1, 1), P1Point(0, 1), P1Point(2, 1), P1Point(1, 0)]

    @pytest.mark.parametrize("degree", range(2, 9))
    def test_roots_up_to_degree_eight(self, degree: int) -> None:
        """Test float root finding against known roots for n = 2..8."""
        angles = np.linspace(0.0, 2 * np.pi, degree, endpoint=False) + 0.1
        expected = [
            P1Point(complex((1 + 0.1 * k) * np.exp(1j * a)), 1.0)
            for k, a in enumerate(angles)
        ]

        found = roots(from_roots(expected))

        assert parameter_set_distance(found, expected) < 1e-7

    def test_rational_roots_refuses_irrational(self) -> None:
        """Test that an irreducible quadratic factor is reported."""
        with pytest.raises(UnsupportedOperationError, match="no rational roots"):
            rational_roots(BinaryForm.from_coefficients([1, 0, -2]))

    def test_float_roots_refused_on_exact(self, triangle_section: BinaryForm) -> None:
        """Test the capability gate of numeric root finding."""
        with pytest.raises(UnsupportedOperationError):
            roots(triangle_section)

    def test_float_roots_recover_parameters(self, rng: np.random.Generator) -> None:
        """Test that from_roots and roots are inverse up to order."""
        for degree in range(2, 7):
            params = [
                P1Point(complex(*rng.normal(size=2)), 1.0) for _ in range(degree)
            ]
            found = roots(from_roots(params))

            assert parameter_set_distance(found, params) < 1e-9

    def test_float_roots_include_infinity(self) -> None:
        """Test roots at both ends of the chart."""
        found = roots(BinaryForm.from_coefficients([0.0, 1.0, 0.0]))

        assert parameter_set_distance(found, [P1Point(1, 0), P1Point(0, 1)]) == 0

    def test_quadratic_double_root(self) -> None:
        """Test that a square is reported once with multiplicity 2."""
        found = solve_binary_quadratic(Fraction(1), Fraction(-2), Fraction(1))

        assert found == [(P1Point(1, 1), 2)]

    def test_quadratic_irrational_exact(self) -> None:
        """Test that exact irrational roots are refused."""
        with pytest.raises(UnsupportedOperationError, match="rational square"):
            solve_binary_quadratic(Fraction(1), Fraction(0), Fraction(-3))

    def test_squarefree(self, rng: np.random.Generator) -> None:
        """Test squarefreeness on both backends."""
        assert is_squarefree(BinaryForm.from_coefficients([1, 0, -1, 0]))
        assert not is_squarefree(BinaryForm.from_coefficients([1, -2, 1]))
        assert not is_squarefree(BinaryForm.from_coefficients([0, 0, 0, 1]))
        assert is_squarefree(_random_form(rng, 5))
        assert not is_squarefree(BinaryForm.from_coefficients([1.0, -2.0, 1.0]))


class TestTernaryForm:
    """Tests for ternary forms and plane curves."""

    def test_monomial_order(self) -> None:
        """Test the lex-descending monomial basis."""
        assert monomials(2) == [
            (2, 0, 0),
            (1, 1, 0),
            (1, 0, 1),
            (0, 2, 0),
            (0, 1, 1),
            (0, 0, 2),
        ]
        assert len(monomials(4)) == 15

    def test_degree_checked(self) -> None:
        """Test that terms must share the total degree."""
        with pytest.raises(ValueError, match="total degree"):
            TernaryForm.from_dict(2, {(1, 0, 0): 1})

    def test_arithmetic_and_evaluation(self) -> None:
        """Test products and evaluation at a point."""
        x0, x1, x2 = (TernaryForm.variable(i) for i in range(3))
        conic = x1 * x1 - x0 * x2 * 4

        assert conic.evaluate((1, 2, 1)) == 0
        assert conic.evaluate((1, 0, 1)) == -4
        assert conic.degree == 2

    def test_exact_divide(self) -> None:
        """Test exact polynomial division and its failure mode."""
        x0, x1, x2 = (TernaryForm.variable(i) for i in range(3))
        a = x0 + x1
        b = x1 * x1 - x0 * x2
        product = a * b

        assert product.exact_divide(b) == a
        with pytest.raises(InexactDivisionError) as exc_info:
            (product + x2 * x2 * x2).exact_divide(b)
        assert exc_info.value.residual > 0

    def test_float_exact_divide(self) -> None:
        """Test division with a float divisor of awkward leading term."""
        x0, x1, x2 = (TernaryForm.variable(i, Backend.FLOAT) for i in range(3))
        divisor = x0 * x2 * 1e-3 + x1 * x1 - x2 * x2
        quotient = x0 * 2.0 - x2

        assert (divisor * quotient).exact_divide(divisor).proportional_to(quotient)

    def test_divide_by_x0_power(self) -> None:
        """Test the asserted x0 division."""
        x0, x1, _ = (TernaryForm.variable(i) for i in range(3))

        assert (x0 * x0 * x1).divide_by_x0_power(2) == x1
        with pytest.raises(InexactDivisionError):
            (x0 * x1 + x1 * x1).divide_by_x0_power(1)

    def test_restrict_to_line(self) -> None:
        """Test restriction of x1^2 - 4*x0*x2 to the tangent line x2 = 0."""
        restricted = CANONICAL_CONIC.to_form().restrict_to_line((1, 0, 0), (0, 1, 0))

        assert restricted.proportional_to(BinaryForm.from_coefficients([0, 0, 1]))

    def test_plane_curve_requires_terms(self) -> None:
        """Test that the zero form is not a curve."""
        with pytest.raises(ValueError, match="nonzero"):
            PlaneCurve(TernaryForm.zero(2))

    def test_interpolate_curve(self) -> None:
        """Test that a conic through five points is recovered."""
        conic = CANONICAL_CONIC.to_form()
        points = [(1, 2 * t, t * t) for t in range(5)]
        curve = interpolate_curve(points, 2)

        assert curve.form.proportional_to(conic)


class TestPseudoDivision:
    """Tests for the point-quadric remainder."""

    def test_quadric_of_point(self) -> None:
        """Test the point quadric coefficients."""
        q = quadric_of_point(ProjPoint.of(1, 3, 2))

        assert q == BinaryForm.from_coefficients([1, 3, 2])

    def test_multiple_of_quadric_has_zero_remainder(self) -> None:
        """Test that q_x * h reduces to zero at x."""
        x = ProjPoint.of(1, 3, 2)
        h = BinaryForm.from_coefficients([2, -1, 5])
        r1, r0 = pseudo_remainder_at(quadric_of_point(x) * h, x.coords)

        assert (r1, r0) == (0, 0)

    def test_symbolic_matches_numeric(self) -> None:
        """Test that the symbolic remainder evaluates to the numeric one."""
        f = BinaryForm.from_coefficients([1, -2, 0, 3, 1])
        r1, r0 = pseudo_remainder(f)
        point = (Fraction(2), Fraction(-1, 3), Fraction(5))

        assert (r1.evaluate(point), r0.evaluate(point)) == pseudo_remainder_at(
            f, point
        )
        assert r1.degree == r0.degree == 3

    def test_degree_below_two_rejected(self) -> None:
        """Test that linear forms are not sections."""
        with pytest.raises(ValueError, match="degree >= 2"):
            pseudo_remainder(BinaryForm.from_coefficients([1, 1]))

    def test_compose_with_parametrization(self, triangle_outer: Conic) -> None:
        """Test that a conic's own form pulls back to zero."""
        param = parametrize_conic(triangle_outer)
        pulled = compose_with_parametrization(triangle_outer.to_form(), param)
        other = compose_with_parametrization(CANONICAL_CONIC.to_form(), param)

        assert pulled.is_zero()
        assert pulled.degree == 4
        assert not other.is_zero()

    @pytest.mark.parametrize("degree", range(2, 7))
    def test_remainder_matches_numeric_division(
        self, degree: int, rng: np.random.Generator
    ) -> None:
        """Test (r1(x), r0(x)) against dividing f(u, 1) by q_x(u, 1)."""
        f = _random_form(rng, degree)
        x = ProjPoint(
            (1.0 + abs(rng.normal()), complex(*rng.normal(size=2)), rng.normal())
        )
        x0, x1, x2 = x.coords
        _, rest = npoly.polydiv(f.coefficients[::-1], [x2, x1, x0])
        rest = np.pad(rest, (0, 2 - len(rest)))
        scale = x0 ** (degree - 1)

        r1, r0 = pseudo_remainder(f)

        assert r1.evaluate(x.coords) == pytest.approx(
            scale * rest[1], rel=1e-8, abs=1e-10
        )
        assert r0.evaluate(x.coords) == pytest.approx(
            scale * rest[0], rel=1e-8, abs=1e-10
        )

    def test_compose_is_multiplicative(
        self, triangle_outer: Conic, rng: np.random.Generator
    ) -> None:
        """Test that pulling back a product gives the product of pull-backs."""
        param = parametrize_conic(triangle_outer)
        first, second = (
            TernaryForm.from_dict(
                degree,
                {m: int(rng.integers(-5, 6)) for m in monomials(degree)},
                Backend.EXACT,
            )
            for degree in (2, 3)
        )

        product = compose_with_parametrization(first * second, param)

        assert product == compose_with_parametrization(
            first, param
        ) * compose_with_parametrization(second, param)
        assert product.degree == 10
