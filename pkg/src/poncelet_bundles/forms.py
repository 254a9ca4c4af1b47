"""Binary forms in (u, v) and ternary forms in (x0, x1, x2).

Conventions fixed project-wide:

- A binary form of degree n stores its coefficients u-descending: index k is
  the coefficient of ``u^(n-k) v^k``.
- A root ``(a:b)`` of a binary form is a point of the projective line with
  ``f(a, b) = 0``; it contributes the linear factor ``b*u - a*v``.
- The point quadric of a plane point x is ``x0*u^2 + x1*u*v + x2*v^2``.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, TypeAlias, TypeVar

import numpy as np
import sympy
from scipy.optimize import linear_sum_assignment

from poncelet_bundles.capabilities import BackendCapabilities
from poncelet_bundles.const import NEWTON_MAX_ITER
from poncelet_bundles.exceptions import (
    ConvergenceError,
    InexactDivisionError,
    UnsupportedOperationError,
)
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Matrix,
    Scalar,
    Tolerance,
    Vector,
    backend_of,
    chordal_distance,
    coerce,
    coerce_all,
    magnitude,
    norm_inf,
    normalize_projective,
    nullspace,
    one,
    proportional,
    zero,
)

if TYPE_CHECKING:
    from poncelet_bundles.projective import ConicParam, ProjPoint

_LOGGER = logging.getLogger(__name__)

Monomial: TypeAlias = tuple[int, int, int]
_R = TypeVar("_R")


# =============================================================================
# Points of the projective line
# =============================================================================


@dataclass(frozen=True)
class P1Point:
    """A point ``(a:b)`` of the projective line, stored normalized."""

    a: Scalar
    b: Scalar

    def __post_init__(self) -> None:
        coords = coerce_all((self.a, self.b))
        if all(c == 0 for c in coords):
            raise ValueError("(0:0) is not a point of the projective line")
        a, b = normalize_projective(coords)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def coords(self) -> Vector:
        return (self.a, self.b)

    @property
    def backend(self) -> Backend:
        return backend_of(self.a, self.b)

    def distance(self, other: P1Point) -> float:
        """Chordal distance on the projective line."""
        return chordal_distance(self.coords, other.coords)


def parameter_set_distance(a: Sequence[P1Point], b: Sequence[P1Point]) -> float:
    """Largest chordal distance under the optimal matching of two multisets."""
    if len(a) != len(b):
        return float("inf")
    if not a:
        return 0.0
    cost = np.array([[p.distance(q) for q in b] for p in a])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


# =============================================================================
# Binary forms
# =============================================================================


def _join(*backends: Backend) -> Backend:
    return Backend.FLOAT if Backend.FLOAT in backends else Backend.EXACT


def _convolve(a: Sequence[Scalar], b: Sequence[Scalar], backend: Backend) -> Vector:
    out = [zero(backend)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            out[i + j] = out[i + j] + ai * bj
    return tuple(out)


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous form of degree n in (u, v), coefficients u-descending."""

    coefficients: Vector
    backend: Backend = field(default=Backend.EXACT, compare=False)

    def __post_init__(self) -> None:
        if not self.coefficients:
            raise ValueError("a binary form needs at least one coefficient")
        backend = backend_of(*self.coefficients)
        object.__setattr__(self, "backend", backend)
        coefficients = coerce_all(self.coefficients, backend)
        object.__setattr__(self, "coefficients", coefficients)

    @classmethod
    def from_coefficients(
        cls, coefficients: Sequence[Any], backend: Backend | None = None
    ) -> BinaryForm:
        return cls(coerce_all(coefficients, backend))

    @classmethod
    def zero(cls, degree: int, backend: Backend = Backend.EXACT) -> BinaryForm:
        return cls((zero(backend),) * (degree + 1))

    @classmethod
    def constant(cls, value: Any, backend: Backend | None = None) -> BinaryForm:
        return cls.from_coefficients([value], backend)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def norm(self) -> float:
        return norm_inf(self.coefficients)

    def is_zero(self, tol: Tolerance = DEFAULT_TOLERANCE, scale: float = 1.0) -> bool:
        if self.backend is Backend.EXACT:
            return all(c == 0 for c in self.coefficients)
        return self.norm() <= tol.threshold(scale)

    def evaluate(self, a: Scalar, b: Scalar) -> Scalar:
        n = self.degree
        total = zero(backend_of(a, b, *self.coefficients))
        for k, c in enumerate(self.coefficients):
            total = total + c * a ** (n - k) * b**k
        return total

    def at(self, point: P1Point) -> Scalar:
        return self.evaluate(point.a, point.b)

    def ascending_u(self) -> Vector:
        """Coefficients indexed by the power of u."""
        return self.coefficients[::-1]

    def proportional_to(
        self, other: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        return proportional(self.coefficients, other.coefficients, tol)

    def normalized(self) -> BinaryForm:
        return BinaryForm(normalize_projective(self.coefficients))

    def substitute_linear(
        self, matrix: Sequence[Sequence[Scalar]]
    ) -> BinaryForm:
        """``f(m00*u + m01*v, m10*u + m11*v)``."""
        first = BinaryForm((matrix[0][0], matrix[0][1]))
        second = BinaryForm((matrix[1][0], matrix[1][1]))
        unit = BinaryForm.constant(1, self.backend)
        total = BinaryForm.zero(self.degree, self.backend)
        n = self.degree
        for k, c in enumerate(self.coefficients):
            total = total + c * (first ** (n - k) if n - k else unit) * (
                second**k if k else unit
            )
        return total

    def __add__(self, other: BinaryForm) -> BinaryForm:
        if not isinstance(other, BinaryForm):
            return NotImplemented
        if other.degree != self.degree:
            raise ValueError(
                f"cannot add forms of degrees {self.degree} and {other.degree}"
            )
        pairs = zip(self.coefficients, other.coefficients, strict=True)
        return BinaryForm(tuple(a + b for a, b in pairs))

    def __neg__(self) -> BinaryForm:
        return BinaryForm(tuple(-c for c in self.coefficients))

    def __sub__(self, other: BinaryForm) -> BinaryForm:
        return self + (-other)

    def __mul__(self, other: object) -> BinaryForm:
        if isinstance(other, BinaryForm):
            backend = backend_of(*self.coefficients, *other.coefficients)
            return BinaryForm(_convolve(self.coefficients, other.coefficients, backend))
        if isinstance(other, Fraction | complex | float | int):
            backend = backend_of(other, *self.coefficients)
            factor = coerce(other, backend)
            return BinaryForm(tuple(factor * c for c in self.coefficients))
        return NotImplemented

    def __rmul__(self, other: object) -> BinaryForm:
        return self.__mul__(other)

    def __pow__(self, exponent: int) -> BinaryForm:
        if exponent < 0:
            raise ValueError("negative powers of forms are not forms")
        result = BinaryForm.constant(1, self.backend)
        for _ in range(exponent):
            result = result * self
        return result

    def __str__(self) -> str:
        return _format_terms(
            (c, _binary_monomial(self.degree - k, k))
            for k, c in enumerate(self.coefficients)
        )


def _binary_monomial(p: int, q: int) -> str:
    parts = []
    if p:
        parts.append("u" if p == 1 else f"u^{p}")
    if q:
        parts.append("v" if q == 1 else f"v^{q}")
    return "*".join(parts)


def _format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return str(value)
    number = complex(value)
    if number.imag == 0:
        return f"{number.real:.12g}"
    return f"({number.real:.12g}{number.imag:+.12g}j)"


def _format_terms(terms: Any) -> str:
    rendered = []
    for coef, mono in terms:
        if coef == 0:
            continue
        text = _format_scalar(coef)
        rendered.append(f"{text}*{mono}" if mono else text)
    return " + ".join(rendered) if rendered else "0"


# =============================================================================
# Roots
# =============================================================================


def from_roots(roots: Sequence[P1Point]) -> BinaryForm:
    """Product of the linear forms ``b*u - a*v`` over the roots ``(a:b)``."""
    if not roots:
        raise ValueError("from_roots needs at least one root")
    result: BinaryForm | None = None
    for root in roots:
        linear = BinaryForm((root.b, -root.a))
        result = linear if result is None else result * linear
    assert result is not None
    return result


def solve_binary_quadratic(
    a: Scalar, b: Scalar, c: Scalar, tol: Tolerance = DEFAULT_TOLERANCE
) -> list[tuple[P1Point, int]]:
    """Roots of ``a*u^2 + b*u*v + c*v^2`` with multiplicities.

    A vanishing discriminant (exactly, or within ``tol`` relative to the
    coefficient scale) is reported as one root of multiplicity 2.

    Raises:
        UnsupportedOperationError: Exact coefficients with an irrational
            discriminant square root.
        ValueError: The zero form.

    """
    backend = backend_of(a, b, c)
    a, b, c = coerce_all((a, b, c), backend)
    if all(v == 0 for v in (a, b, c)):
        raise ValueError("the zero quadratic has no well-defined roots")
    disc = b * b - 4 * a * c
    if backend is Backend.EXACT:
        assert isinstance(disc, Fraction)
        if disc == 0:
            double = _double_root(a, b, c)
            return [(double, 2)]
        root = _rational_sqrt(disc)
        if root is None:
            raise UnsupportedOperationError(
                f"discriminant {disc} is not a rational square"
            )
        s: Scalar = root
    else:
        scale = max(magnitude(b) ** 2, 4 * magnitude(a) * magnitude(c))
        if magnitude(disc) <= tol.threshold(scale):
            return [(_double_root(a, b, c), 2)]
        s = complex(np.sqrt(complex(disc)))
    # stable form: q = -(b + sign*s)/2 with the sign that avoids cancellation
    plus = b + s
    minus = b - s
    q = -(plus if magnitude(plus) >= magnitude(minus) else minus) / 2
    first = P1Point(q, a) if a != 0 else P1Point(1, 0)
    second = P1Point(c, q)
    return [(first, 1), (second, 1)]


def _double_root(a: Scalar, b: Scalar, c: Scalar) -> P1Point:
    if magnitude(a) >= magnitude(c):
        return P1Point(-b, 2 * a)
    return P1Point(2 * c, -b)


def _rational_sqrt(value: Fraction) -> Fraction | None:
    if value < 0:
        return None
    num = sympy.integer_nthroot(value.numerator, 2)
    den = sympy.integer_nthroot(value.denominator, 2)
    if num[1] and den[1]:
        return Fraction(int(num[0]), int(den[0]))
    return None


def _newton_polish(
    poly: np.ndarray, z: complex, tol: Tolerance
) -> tuple[complex, float, float]:
    deriv = np.polyder(poly)
    magnitudes = np.abs(poly)

    def residual(point: complex) -> float:
        return float(abs(np.polyval(poly, point)))

    current = residual(z)
    for _ in range(NEWTON_MAX_ITER):
        scale = float(np.polyval(magnitudes, abs(z)))
        if current <= tol.rel_eps * scale:
            break
        slope = np.polyval(deriv, z)
        if slope == 0:
            break
        candidate = complex(z - np.polyval(poly, z) / slope)
        trial = residual(candidate)
        if trial >= current:
            break
        z, current = candidate, trial
    return z, current, float(np.polyval(magnitudes, abs(z)))


def roots(f: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE) -> list[P1Point]:
    """The n roots of a nonzero binary form, with multiplicity.

    Companion-matrix eigenvalues (``numpy.roots``) in the better-conditioned
    affine chart, then Newton polish. Roots at ``(1:0)`` and ``(0:1)`` come
    from vanishing end coefficients.

    Raises:
        UnsupportedOperationError: On the exact backend.
        ConvergenceError: A polished root keeps a residual above tolerance.

    """
    BackendCapabilities.for_backend(f.backend).require("forms.roots")
    if f.is_zero(tol):
        raise ValueError("the zero form has no well-defined roots")
    coeffs = np.array([complex(c) for c in f.coefficients])
    coeffs = coeffs / np.max(np.abs(coeffs))
    small = np.abs(coeffs) <= tol.abs_floor
    lead = int(np.argmin(small)) if not small.all() else 0
    trail = int(np.argmin(small[::-1]))
    result = [P1Point(1, 0)] * lead + [P1Point(0, 1)] * trail
    core = coeffs[lead : len(coeffs) - trail]
    if len(core) > 1:
        u_chart = abs(core[0]) >= abs(core[-1])
        poly = core if u_chart else core[::-1]
        _LOGGER.debug(
            "root finding in the %s chart, degree %d", "u/v" if u_chart else "v/u",
            len(core) - 1,
        )
        for z0 in np.roots(poly):
            z, res, scale = _newton_polish(poly, complex(z0), tol)
            if res > tol.rel_eps * max(scale, 1.0):
                raise ConvergenceError(
                    f"root {z!r} kept residual {res:.3e} after Newton polish"
                )
            result.append(P1Point(z, 1) if u_chart else P1Point(1, z))
    return result


def _to_sympy_poly(coefficients: Sequence[Scalar]) -> sympy.Poly:
    z = sympy.Symbol("z")
    values = [
        sympy.Rational(c.numerator, c.denominator)  # type: ignore[union-attr]
        for c in coefficients
    ]
    return sympy.Poly(values, z, domain="QQ")


def _leading_zero_count(f: BinaryForm) -> int:
    count = 0
    for c in f.coefficients:
        if c != 0:
            break
        count += 1
    return count


def rational_roots(f: BinaryForm) -> list[P1Point]:
    """Exact roots of a binary form that splits over the rationals.

    Finite roots come in increasing order of u/v, followed by any roots at
    infinity.

    Raises:
        UnsupportedOperationError: The form is not exact, or an irreducible
            factor of degree > 1 remains (its roots are algebraic numbers).

    """
    if f.backend is not Backend.EXACT:
        raise UnsupportedOperationError("rational_roots needs exact coefficients")
    if f.is_zero():
        raise ValueError("the zero form has no well-defined roots")
    at_infinity = _leading_zero_count(f)
    tail = [P1Point(1, 0)] * at_infinity
    core = f.coefficients[at_infinity:]
    if len(core) == 1:
        return tail
    result: list[P1Point] = []
    _, factors = _to_sympy_poly(core).factor_list()
    for factor, multiplicity in factors:
        if factor.degree() > 1:
            raise UnsupportedOperationError(
                f"factor {factor.as_expr()} of degree {factor.degree()} has "
                "no rational roots"
            )
        slope, offset = factor.all_coeffs()
        root = P1Point(
            -Fraction(int(offset.p), int(offset.q)),
            Fraction(int(slope.p), int(slope.q)),
        )
        result.extend([root] * int(multiplicity))
    result.sort(key=lambda p: p.a / p.b)
    return result + tail


def is_squarefree(f: BinaryForm, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """No repeated roots: exact gcd test, or float root separation."""
    if f.backend is Backend.EXACT:
        at_infinity = _leading_zero_count(f)
        if at_infinity > 1:
            return False
        core = f.coefficients[at_infinity:]
        return len(core) <= 2 or bool(_to_sympy_poly(core).is_sqf)
    found = roots(f, tol)
    return all(
        p.distance(q) >= tol.root_separation
        for p, q in itertools.combinations(found, 2)
    )


# =============================================================================
# Ternary forms
# =============================================================================


def monomials(degree: int) -> list[Monomial]:
    """Monomials of total degree ``degree`` in lex-descending order."""
    return [
        (a, b, degree - a - b)
        for a in range(degree, -1, -1)
        for b in range(degree - a, -1, -1)
    ]


@dataclass(frozen=True)
class TernaryForm:
    """Homogeneous polynomial in (x0, x1, x2), stored as sorted terms."""

    degree: int
    terms: tuple[tuple[Monomial, Scalar], ...]
    backend: Backend = Backend.EXACT

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"degree must be >= 0, got {self.degree}")
        for mono, _ in self.terms:
            if len(mono) != 3 or sum(mono) != self.degree or min(mono) < 0:
                raise ValueError(
                    f"monomial {mono} does not have total degree {self.degree}"
                )

    @classmethod
    def from_dict(
        cls,
        degree: int,
        mapping: dict[Monomial, Any],
        backend: Backend | None = None,
    ) -> TernaryForm:
        resolved = backend or backend_of(*mapping.values())
        terms = tuple(
            sorted(
                (
                    (tuple(mono), coerce(value, resolved))
                    for mono, value in mapping.items()
                ),
                reverse=True,
            )
        )
        nonzero = tuple((m, c) for m, c in terms if c != 0)
        return cls(degree, nonzero, resolved)  # type: ignore[arg-type]

    @classmethod
    def zero(cls, degree: int, backend: Backend = Backend.EXACT) -> TernaryForm:
        return cls(degree, (), backend)

    @classmethod
    def constant(cls, value: Any, backend: Backend | None = None) -> TernaryForm:
        return cls.from_dict(0, {(0, 0, 0): value}, backend)

    @classmethod
    def variable(cls, index: int, backend: Backend = Backend.EXACT) -> TernaryForm:
        mono = tuple(1 if i == index else 0 for i in range(3))
        return cls.from_dict(1, {mono: 1}, backend)  # type: ignore[dict-item]

    @classmethod
    def linear(cls, coefficients: Sequence[Any]) -> TernaryForm:
        return cls.from_dict(1, dict(zip(monomials(1), coefficients, strict=True)))

    @classmethod
    def from_vector(
        cls, degree: int, vector: Sequence[Any], backend: Backend | None = None
    ) -> TernaryForm:
        """Inverse of :meth:`coefficient_vector`."""
        mapping = dict(zip(monomials(degree), vector, strict=True))
        return cls.from_dict(degree, mapping, backend)

    def as_dict(self) -> dict[Monomial, Scalar]:
        return dict(self.terms)

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.as_dict().get(mono, zero(self.backend))

    def coefficient_vector(self) -> Vector:
        """Coefficients in :func:`monomials` order."""
        mapping = self.as_dict()
        return tuple(mapping.get(m, zero(self.backend)) for m in monomials(self.degree))

    def norm(self) -> float:
        return norm_inf([c for _, c in self.terms])

    def is_zero(self, tol: Tolerance = DEFAULT_TOLERANCE, scale: float = 1.0) -> bool:
        if self.backend is Backend.EXACT:
            return not self.terms
        return self.norm() <= tol.threshold(scale)

    def proportional_to(
        self, other: TernaryForm, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        if self.degree != other.degree:
            return False
        return proportional(self.coefficient_vector(), other.coefficient_vector(), tol)

    def _combine(self, other: TernaryForm, sign: int) -> TernaryForm:
        if other.degree != self.degree and self.terms and other.terms:
            raise ValueError(
                f"cannot add forms of degrees {self.degree} and {other.degree}"
            )
        backend = _join(self.backend, other.backend)
        merged: dict[Monomial, Scalar] = dict(self.terms)
        for mono, value in other.terms:
            merged[mono] = merged.get(mono, zero(backend)) + sign * value
        degree = self.degree if self.terms else other.degree
        return TernaryForm.from_dict(degree, merged, backend)

    def __add__(self, other: TernaryForm) -> TernaryForm:
        if not isinstance(other, TernaryForm):
            return NotImplemented
        return self._combine(other, 1)

    def __sub__(self, other: TernaryForm) -> TernaryForm:
        if not isinstance(other, TernaryForm):
            return NotImplemented
        return self._combine(other, -1)

    def __neg__(self) -> TernaryForm:
        negated = tuple((m, -c) for m, c in self.terms)
        return TernaryForm(self.degree, negated, self.backend)

    def __mul__(self, other: object) -> TernaryForm:
        if isinstance(other, TernaryForm):
            backend = _join(self.backend, other.backend)
            product: dict[Monomial, Scalar] = {}
            for (ma, ca), (mb, cb) in itertools.product(self.terms, other.terms):
                mono = (ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2])
                product[mono] = product.get(mono, zero(backend)) + ca * cb
            return TernaryForm.from_dict(self.degree + other.degree, product, backend)
        if isinstance(other, Fraction | complex | float | int):
            backend = backend_of(other, *(c for _, c in self.terms))
            factor = coerce(other, backend)
            return TernaryForm.from_dict(
                self.degree, {m: factor * c for m, c in self.terms}, backend
            )
        return NotImplemented

    def __rmul__(self, other: object) -> TernaryForm:
        return self.__mul__(other)

    def __pow__(self, exponent: int) -> TernaryForm:
        result = TernaryForm.constant(1, self.backend)
        for _ in range(exponent):
            result = result * self
        return result

    def evaluate_in(self, values: Sequence[_R], unit: _R) -> _R | None:
        """Substitute ring elements for the variables.

        Works for scalars, binary forms and ternary forms alike; returns
        None for the zero form.
        """
        cache: dict[tuple[int, int], Any] = {}

        def power(index: int, exp: int) -> Any:
            if exp == 0:
                return unit
            key = (index, exp)
            if key not in cache:
                cache[key] = power(index, exp - 1) * values[index]
            return cache[key]

        total: Any = None
        for (a, b, c), coef in self.terms:
            term = coef * (power(0, a) * power(1, b) * power(2, c))
            total = term if total is None else total + term
        return total  # type: ignore[no-any-return]

    def evaluate(self, point: Sequence[Any]) -> Scalar:
        coords = coerce_all(point)
        backend = backend_of(*coords, *(c for _, c in self.terms))
        value = self.evaluate_in(list(coords), one(backend))
        return zero(backend) if value is None else coerce(value, backend)

    def relative_residual(self, point: Sequence[Scalar]) -> float:
        """``|F(x)|`` over the coefficient 1-norm, x scaled to max-abs 1."""
        scaled = normalize_projective(coerce_all(point))
        total = sum(magnitude(c) for _, c in self.terms)
        if total == 0:
            return 0.0
        return magnitude(self.evaluate(scaled)) / total

    def substitute(self, matrix: Sequence[Sequence[Scalar]]) -> TernaryForm:
        """The pulled-back form ``F(M x)``."""
        linear = [TernaryForm.linear(row) for row in matrix]
        value = self.evaluate_in(linear, TernaryForm.constant(1, self.backend))
        return TernaryForm.zero(self.degree, self.backend) if value is None else value

    def restrict_to_line(
        self, first: Sequence[Scalar], second: Sequence[Scalar]
    ) -> BinaryForm:
        """``F(u*P + v*Q)`` for two points P, Q spanning a line."""
        values = [BinaryForm((first[i], second[i])) for i in range(3)]
        value = self.evaluate_in(values, BinaryForm.constant(1, self.backend))
        return BinaryForm.zero(self.degree, self.backend) if value is None else value

    def divide_by_x0_power(
        self, power: int, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> TernaryForm:
        """Exact quotient by ``x0**power``; the division is asserted, not assumed.

        Raises:
            InexactDivisionError: A monomial with a smaller x0 exponent carries
                a coefficient that is nonzero (exact) or above tolerance.

        """
        kept: dict[Monomial, Scalar] = {}
        leftover = 0.0
        for (a, b, c), coef in self.terms:
            if a >= power:
                kept[(a - power, b, c)] = coef
            else:
                leftover = max(leftover, magnitude(coef))
        limit = 0.0 if self.backend is Backend.EXACT else tol.threshold(self.norm())
        if leftover > limit:
            raise InexactDivisionError(
                f"form is not divisible by x0^{power}", residual=leftover
            )
        return TernaryForm.from_dict(self.degree - power, kept, self.backend)

    def exact_divide(
        self, divisor: TernaryForm, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> TernaryForm:
        """Exact polynomial quotient ``self / divisor``.

        Multivariate long division under the lex order (on a permutation of
        the variables chosen to make the divisor's leading coefficient as large
        as possible on the float backend).

        Raises:
            InexactDivisionError: The remainder is nonzero (exact) or exceeds
                ``tol`` relative to ``|self|`` (float), carrying its norm.

        """
        if not divisor.terms:
            raise ZeroDivisionError("division by the zero form")
        backend = _join(self.backend, divisor.backend)
        if not self.terms:
            return TernaryForm.zero(max(self.degree - divisor.degree, 0), backend)
        if divisor.degree > self.degree:
            raise InexactDivisionError(
                "divisor degree exceeds dividend degree", residual=self.norm()
            )
        exact = backend is Backend.EXACT
        order, lead_mono, lead_coef = _division_order(divisor, tol, exact)

        def key(mono: Monomial) -> tuple[int, ...]:
            return tuple(mono[p] for p in order)

        limit = 0.0 if exact else tol.threshold(self.norm())
        remainder: dict[Monomial, Scalar] = dict(self.terms)
        quotient: dict[Monomial, Scalar] = {}
        while True:
            live = [m for m, c in remainder.items() if magnitude(c) > limit]
            if not live:
                break
            lead = max(live, key=key)
            if any(lead[i] < lead_mono[i] for i in range(3)):
                break
            shift = (
                lead[0] - lead_mono[0],
                lead[1] - lead_mono[1],
                lead[2] - lead_mono[2],
            )
            factor = remainder[lead] / lead_coef
            quotient[shift] = quotient.get(shift, zero(backend)) + factor
            for mono, coef in divisor.terms:
                target = (shift[0] + mono[0], shift[1] + mono[1], shift[2] + mono[2])
                remainder[target] = remainder.get(target, zero(backend)) - factor * coef
            remainder.pop(lead)
        residual = max((magnitude(c) for c in remainder.values()), default=0.0)
        if residual > limit:
            raise InexactDivisionError(
                "polynomial division is inexact", residual=residual
            )
        return TernaryForm.from_dict(self.degree - divisor.degree, quotient, backend)

    def __str__(self) -> str:
        names = ("x0", "x1", "x2")

        def render(mono: Monomial) -> str:
            return "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(names, mono, strict=True)
                if e
            )

        return _format_terms((c, render(m)) for m, c in self.terms)


def _division_order(
    divisor: TernaryForm, tol: Tolerance, exact: bool
) -> tuple[tuple[int, ...], Monomial, Scalar]:
    limit = 0.0 if exact else tol.rel_eps * divisor.norm()
    best: tuple[float, tuple[int, ...], Monomial, Scalar] | None = None
    for order in itertools.permutations(range(3)):
        live = [(m, c) for m, c in divisor.terms if magnitude(c) > limit]
        mono, coef = max(live, key=lambda item: tuple(item[0][p] for p in order))
        weight = magnitude(coef)
        if best is None or weight > best[0]:
            best = (weight, order, mono, coef)
        if exact:
            break
    assert best is not None
    return best[1], best[2], best[3]


@dataclass(frozen=True)
class PlaneCurve:
    """A plane curve given by a nonzero ternary form."""

    form: TernaryForm

    def __post_init__(self) -> None:
        if not self.form.terms:
            raise ValueError("a plane curve needs a nonzero form")

    @property
    def degree(self) -> int:
        return self.form.degree

    @property
    def backend(self) -> Backend:
        return self.form.backend

    def residual(self, point: Sequence[Scalar]) -> float:
        return self.form.relative_residual(point)

    def contains(
        self, point: Sequence[Scalar], tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        if self.backend is Backend.EXACT and backend_of(*point) is Backend.EXACT:
            return self.form.evaluate(point) == 0
        return self.residual(point) <= tol.certify

    def proportional_to(
        self, other: PlaneCurve, tol: Tolerance = DEFAULT_TOLERANCE
    ) -> bool:
        return self.form.proportional_to(other.form, tol)

    def __str__(self) -> str:
        return str(self.form)


# =============================================================================
# The point quadric and pseudo-division
# =============================================================================


def quadric_of_point(x: ProjPoint) -> BinaryForm:
    """``q_x = x0*u^2 + x1*u*v + x2*v^2``."""
    return BinaryForm(tuple(x.coords))


def _pseudo_reduce(
    ascending: Sequence[_R],
    x0: _R,
    x1: _R,
    x2: _R,
    mul: Callable[[Any, Any], _R],
) -> tuple[_R, _R]:
    """Reduce a polynomial in u modulo ``x0*u^2 + x1*u + x2``.

    One factor of x0 is spent per reduction step, so a degree-n input
    returns the coefficients of ``x0^(n-1) * f`` reduced to ``r1*u + r0``.
    """
    coeffs = list(ascending)
    for top in range(len(coeffs) - 1, 1, -1):
        lead = coeffs[top]
        coeffs = [mul(x0, c) for c in coeffs[:top]]
        coeffs[top - 1] = coeffs[top - 1] - mul(lead, x1)  # type: ignore[operator]
        coeffs[top - 2] = coeffs[top - 2] - mul(lead, x2)  # type: ignore[operator]
    return coeffs[1], coeffs[0]


def _multiply(a: Any, b: Any) -> Any:
    return a * b


def pseudo_remainder(f: BinaryForm) -> tuple[TernaryForm, TernaryForm]:
    """Symbolic remainder pair ``(r1, r0)`` of ``x0^(n-1) * f`` modulo q_x.

    ``x0^(n-1)*f = r1*u*v^(n-1) + r0*v^n`` modulo the point quadric, with
    ``r1`` and ``r0`` homogeneous of degree n-1 in (x0, x1, x2).
    """
    if f.degree < 2:
        raise ValueError(f"pseudo_remainder needs degree >= 2, got {f.degree}")
    backend = f.backend
    ascending = [TernaryForm.constant(c, backend) for c in f.ascending_u()]
    x0, x1, x2 = (TernaryForm.variable(i, backend) for i in range(3))
    r1, r0 = _pseudo_reduce(ascending, x0, x1, x2, _multiply)
    _LOGGER.debug("pseudo-division of a degree %d form: %d + %d terms",
                  f.degree, len(r1.terms), len(r0.terms))
    return r1, r0


def pseudo_remainder_at(f: BinaryForm, point: Sequence[Any]) -> tuple[Scalar, Scalar]:
    """Numeric pseudo-division at a concrete point (same x0 bookkeeping)."""
    if f.degree < 2:
        raise ValueError(f"pseudo_remainder needs degree >= 2, got {f.degree}")
    coords = coerce_all(point)
    backend = backend_of(*coords, *f.coefficients)
    coords = coerce_all(coords, backend)
    ascending = list(coerce_all(f.ascending_u(), backend))
    return _pseudo_reduce(ascending, coords[0], coords[1], coords[2], _multiply)


def pseudo_remainder_scale(f: BinaryForm, point: Sequence[Any]) -> tuple[float, float]:
    """Magnitude bound of each entry of :func:`pseudo_remainder_at`.

    The same recursion on absolute values with every subtraction turned into
    an addition; used to make vanishing tests scale-aware.
    """
    coords = [magnitude(v) for v in coerce_all(point)]
    ascending = [magnitude(c) for c in f.ascending_u()]
    coeffs = list(ascending)
    for top in range(len(coeffs) - 1, 1, -1):
        lead = coeffs[top]
        coeffs = [coords[0] * c for c in coeffs[:top]]
        coeffs[top - 1] += lead * coords[1]
        coeffs[top - 2] += lead * coords[2]
    return coeffs[1], coeffs[0]


def compose_with_parametrization(form: TernaryForm, param: ConicParam) -> BinaryForm:
    """Pull a ternary form back along a conic parametrization.

    The result has degree ``2 * form.degree`` and is identically zero iff the
    conic divides the form.
    """
    quadrics = [param.p0, param.p1, param.p2]
    backend = _join(form.backend, *(q.backend for q in quadrics))
    value = form.evaluate_in(quadrics, BinaryForm.constant(1, backend))
    if value is None:
        return BinaryForm.zero(2 * form.degree, backend)
    return value


def interpolate_curve(
    points: Sequence[Sequence[Any]], degree: int, tol: Tolerance = DEFAULT_TOLERANCE
) -> PlaneCurve:
    """A curve of the given degree through all the points.

    Raises:
        ValueError: No such curve exists.

    """
    basis = monomials(degree)
    rows = []
    for point in points:
        coords = coerce_all(point)
        rows.append(
            [coords[0] ** a * coords[1] ** b * coords[2] ** c for a, b, c in basis]
        )
    kernel = nullspace(Matrix.from_rows(rows), tol)
    if not kernel:
        raise ValueError(
            f"no curve of degree {degree} passes through the {len(points)} points"
        )
    if len(kernel) > 1:
        _LOGGER.debug("interpolation leaves a %d-dimensional family", len(kernel))
    return PlaneCurve(TernaryForm.from_vector(degree, kernel[0]))
