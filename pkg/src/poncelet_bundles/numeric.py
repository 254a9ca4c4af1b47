"""Scalar backends, tolerance policy and small dense linear algebra.

Two backends share every geometric routine in the package:

- ``exact``: :class:`fractions.Fraction` scalars. Comparisons are exact and
  tolerances are ignored.
- ``float``: Python ``complex`` scalars. Comparisons go through a
  :class:`Tolerance`.

Values are stored as tuples so that every geometric object is immutable and
hashable. numpy is used for the float arithmetic and sympy for exact ranks and
kernels.
"""

from __future__ import annotations

import cmath
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import StrEnum
from fractions import Fraction
from typing import Any, TypeAlias

import numpy as np
import sympy
from pydantic import BaseModel, ConfigDict, PositiveFloat
from scipy import linalg

from poncelet_bundles.const import (
    DEFAULT_ABS_FLOOR,
    DEFAULT_CERTIFY_TOL,
    DEFAULT_MATCH_TOL,
    DEFAULT_NULL_REL,
    DEFAULT_REL_EPS,
    DEFAULT_ROOT_SEPARATION,
)
from poncelet_bundles.exceptions import (
    NonFiniteValueError,
    UnsupportedOperationError,
)

_LOGGER = logging.getLogger(__name__)

Scalar: TypeAlias = Fraction | complex
Vector: TypeAlias = tuple[Scalar, ...]


class Backend(StrEnum):
    """Arithmetic backend tag."""

    EXACT = "exact"
    FLOAT = "float"


class Tolerance(BaseModel):
    """Tolerance policy for the float backend.

    The exact backend ignores every field.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    rel_eps: PositiveFloat = DEFAULT_REL_EPS
    abs_floor: PositiveFloat = DEFAULT_ABS_FLOOR
    null_rel: PositiveFloat = DEFAULT_NULL_REL
    certify: PositiveFloat = DEFAULT_CERTIFY_TOL
    match: PositiveFloat = DEFAULT_MATCH_TOL
    root_separation: PositiveFloat = DEFAULT_ROOT_SEPARATION

    def with_overrides(self, **overrides: float) -> Tolerance:
        """Return a validated copy with some fields replaced."""
        return Tolerance.model_validate({**self.model_dump(), **overrides})

    def threshold(self, scale: float = 1.0) -> float:
        """Absolute zero threshold for a quantity of the given magnitude."""
        return max(self.abs_floor, self.rel_eps * scale)


DEFAULT_TOLERANCE = Tolerance()


# =============================================================================
# Scalars
# =============================================================================


def _is_inexact(value: Any) -> bool:
    return isinstance(value, float | complex | np.inexact)


def backend_of(*values: Any) -> Backend:
    """Infer the backend of a collection of scalars (float wins)."""
    for value in values:
        if isinstance(value, Sequence) and not isinstance(value, str):
            if backend_of(*value) is Backend.FLOAT:
                return Backend.FLOAT
        elif _is_inexact(value):
            return Backend.FLOAT
    return Backend.EXACT


def coerce(value: Any, backend: Backend) -> Scalar:
    """Convert a number to the scalar type of ``backend``.

    Raises:
        NonFiniteValueError: A float value is NaN or infinite.
        UnsupportedOperationError: A complex value with a nonzero imaginary
            part is requested on the exact backend.

    """
    if backend is Backend.EXACT:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, bool):
            raise TypeError("booleans are not scalars")
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, int | np.integer):
            return Fraction(int(value))
        if isinstance(value, complex | np.complexfloating):
            if value.imag != 0:
                raise UnsupportedOperationError(
                    f"Complex value {value!r} has no exact rational form"
                )
            value = value.real
        if isinstance(value, float | np.floating):
            if not np.isfinite(value):
                raise NonFiniteValueError(f"Non-finite scalar value {value!r}")
            return Fraction(float(value))
        raise TypeError(f"Cannot convert {type(value).__name__} to an exact scalar")
    if isinstance(value, str):
        value = Fraction(value)
    number = complex(value)
    if not cmath.isfinite(number):
        raise NonFiniteValueError(f"Non-finite scalar value {value!r}")
    return number


def coerce_all(values: Iterable[Any], backend: Backend | None = None) -> Vector:
    """Convert a sequence of numbers to one backend (inferred if omitted)."""
    items = list(values)
    resolved = backend or backend_of(*items)
    return tuple(coerce(v, resolved) for v in items)


def zero(backend: Backend) -> Scalar:
    return Fraction(0) if backend is Backend.EXACT else 0j


def one(backend: Backend) -> Scalar:
    return Fraction(1) if backend is Backend.EXACT else 1 + 0j


def magnitude(value: Scalar) -> float:
    """Absolute value as a Python float."""
    return float(abs(value))


def is_zero(
    value: Scalar, tol: Tolerance = DEFAULT_TOLERANCE, scale: float = 1.0
) -> bool:
    """Exact comparison on Fractions, thresholded comparison on floats."""
    if isinstance(value, Fraction):
        return value == 0
    return abs(value) <= tol.threshold(scale)


def to_display(value: Scalar) -> str | list[float]:
    """JSON-friendly rendering: ``"p/q"`` strings or ``[re, im]`` pairs."""
    if isinstance(value, Fraction):
        return str(value)
    number = complex(value)
    return [number.real, number.imag]


# =============================================================================
# Vectors
# =============================================================================


def norm_inf(vec: Sequence[Scalar]) -> float:
    return max((magnitude(v) for v in vec), default=0.0)


def normalize_max_abs(vec: Sequence[Scalar]) -> Vector:
    """Divide by the entry of largest absolute value (ties: lowest index)."""
    pivot = max(range(len(vec)), key=lambda i: magnitude(vec[i]))
    if magnitude(vec[pivot]) == 0:
        raise ValueError("cannot normalize the zero vector")
    scale = vec[pivot]
    return tuple(v / scale for v in vec)


def normalize_first_nonzero(vec: Sequence[Scalar]) -> Vector:
    """Divide by the first nonzero entry."""
    for v in vec:
        if v != 0:
            return tuple(w / v for w in vec)
    raise ValueError("cannot normalize the zero vector")


def normalize_projective(vec: Sequence[Scalar]) -> Vector:
    """Backend-appropriate representative of a homogeneous vector."""
    if backend_of(*vec) is Backend.EXACT:
        return normalize_first_nonzero(vec)
    return normalize_max_abs(vec)


def chordal_distance(p: Sequence[Scalar], q: Sequence[Scalar]) -> float:
    """Sine of the angle between two homogeneous vectors.

    Computed from the 2x2 minors so that it stays accurate near zero.
    """
    a = np.array([complex(v) for v in p])
    b = np.array([complex(v) for v in q])
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("chordal distance needs nonzero vectors")
    wedge = np.outer(a, b) - np.outer(b, a)
    return float(np.linalg.norm(wedge) / (np.sqrt(2.0) * na * nb))


def proportional(
    p: Sequence[Scalar], q: Sequence[Scalar], tol: Tolerance = DEFAULT_TOLERANCE
) -> bool:
    """Whether two vectors agree up to a nonzero scalar."""
    if len(p) != len(q):
        return False
    if backend_of(*p, *q) is Backend.EXACT:
        if all(v == 0 for v in p) or all(v == 0 for v in q):
            return False
        return all(
            p[i] * q[j] == p[j] * q[i]
            for i in range(len(p))
            for j in range(i + 1, len(p))
        )
    if norm_inf(p) == 0 or norm_inf(q) == 0:
        return False
    return chordal_distance(p, q) <= tol.certify


# =============================================================================
# 3x3 helpers
# =============================================================================

Rows3: TypeAlias = tuple[Vector, Vector, Vector]


def cross3(p: Sequence[Scalar], q: Sequence[Scalar]) -> Vector:
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def dot(p: Sequence[Scalar], q: Sequence[Scalar]) -> Scalar:
    total = p[0] * q[0]
    for a, b in zip(p[1:], q[1:], strict=True):
        total = total + a * b
    return total


def det3(m: Sequence[Sequence[Scalar]]) -> Scalar:
    return dot(m[0], cross3(m[1], m[2]))


def adjugate3(m: Sequence[Sequence[Scalar]]) -> Rows3:
    """Classical adjugate; columns of the adjugate are cross products of rows."""
    c0 = cross3(m[1], m[2])
    c1 = cross3(m[2], m[0])
    c2 = cross3(m[0], m[1])
    return (
        (c0[0], c1[0], c2[0]),
        (c0[1], c1[1], c2[1]),
        (c0[2], c1[2], c2[2]),
    )


def transpose3(m: Sequence[Sequence[Scalar]]) -> Rows3:
    return tuple(tuple(m[i][j] for i in range(3)) for j in range(3))  # type: ignore[return-value]


def matmul3(a: Sequence[Sequence[Scalar]], b: Sequence[Sequence[Scalar]]) -> Rows3:
    bt = transpose3(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)  # type: ignore[return-value]


def matvec3(m: Sequence[Sequence[Scalar]], v: Sequence[Scalar]) -> Vector:
    return tuple(dot(row, v) for row in m)


# =============================================================================
# Matrices
# =============================================================================


@dataclass(frozen=True)
class Matrix:
    """Dense row-major matrix over one backend."""

    rows: int
    cols: int
    entries: Vector
    backend: Backend

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise ValueError(
                f"matrix dimensions must be positive, got {self.rows}x{self.cols}"
            )
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}"
            )
        expected = Fraction if self.backend is Backend.EXACT else complex
        for value in self.entries:
            if not isinstance(value, expected):
                raise TypeError(
                    f"matrix entry {value!r} does not belong to the "
                    f"{self.backend} backend"
                )
            if expected is complex and not cmath.isfinite(value):
                raise NonFiniteValueError(f"Non-finite matrix entry {value!r}")

    @classmethod
    def from_rows(
        cls, rows: Sequence[Sequence[Any]], backend: Backend | None = None
    ) -> Matrix:
        """Build a matrix from nested sequences, coercing to one backend."""
        if not rows or not rows[0]:
            raise ValueError("matrix must be nonempty")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise ValueError("rows have unequal lengths")
        flat = [v for row in rows for v in row]
        resolved = backend or backend_of(*flat)
        return cls(len(rows), width, coerce_all(flat, resolved), resolved)

    @classmethod
    def from_columns(
        cls, columns: Sequence[Sequence[Any]], backend: Backend | None = None
    ) -> Matrix:
        return cls.from_rows(list(zip(*columns, strict=True)), backend)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols : (i + 1) * self.cols]

    def column(self, j: int) -> Vector:
        return self.entries[j :: self.cols]

    def to_lists(self) -> list[list[Scalar]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def to_numpy(self) -> np.ndarray:
        """complex128 array for the float backend, object array otherwise."""
        dtype = object if self.backend is Backend.EXACT else np.complex128
        return np.array(self.to_lists(), dtype=dtype)

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(
            self.rows,
            self.cols,
            [sympy.Rational(v.numerator, v.denominator) for v in self.entries],  # type: ignore[union-attr]
        )

    def hstack(self, column: Sequence[Any]) -> Matrix:
        """Append one column."""
        if len(column) != self.rows:
            raise ValueError("column length does not match the row count")
        rows = [[*self.row(i), column[i]] for i in range(self.rows)]
        return Matrix.from_rows(rows, backend_of(*self.entries, *column))

    def apply(self, vec: Sequence[Scalar]) -> Vector:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise ValueError("vector length does not match the column count")
        return tuple(dot(self.row(i), vec) for i in range(self.rows))


def _singular_values(m: Matrix) -> np.ndarray:
    return linalg.svd(m.to_numpy(), compute_uv=False)


def _float_rank(singular: np.ndarray, tol: Tolerance) -> int:
    if singular.size == 0 or singular[0] <= tol.abs_floor:
        return 0
    return int(np.sum(singular > singular[0] * tol.null_rel))


def rank(m: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Numerical rank.

    Exact matrices use sympy's fraction-free elimination; float matrices count
    singular values above ``tol.null_rel`` times the largest one.
    """
    if m.backend is Backend.EXACT:
        return int(m.to_sympy().rank())
    return _float_rank(_singular_values(m), tol)


def nullspace(m: Matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> list[Vector]:
    """Basis of the right kernel, each vector normalized to max-abs 1."""
    if m.backend is Backend.EXACT:
        basis = [
            tuple(Fraction(int(e.p), int(e.q)) for e in vec)
            for vec in m.to_sympy().nullspace()
        ]
    else:
        array = m.to_numpy()
        if _float_rank(_singular_values(m), tol) == 0:
            kernel = np.eye(m.cols, dtype=np.complex128)
        else:
            kernel = linalg.null_space(array, rcond=tol.null_rel)
        basis = [
            tuple(complex(v) for v in kernel[:, j]) for j in range(kernel.shape[1])
        ]
    _LOGGER.debug(
        "nullspace of %dx%d matrix has dimension %d", m.rows, m.cols, len(basis)
    )
    return [normalize_max_abs(vec) for vec in basis]


def kernel_residual(m: Matrix, vec: Sequence[Scalar]) -> float:
    """Max-abs of ``m @ vec``; exactly zero for exact kernel vectors."""
    return norm_inf(m.apply(vec))
