"""Custom exceptions for the Poncelet bundle machinery."""

from __future__ import annotations

from typing import Any


class PonceletError(Exception):
    """Base exception for poncelet-bundles errors."""

    def __init__(
        self,
        message: str,
        details: list[dict[str, Any]] | None = None,
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.
            details: Optional list of evidence records (offending objects,
                residuals) attached to the failure.

        """
        super().__init__(message)
        self.message = message
        self.details = details or []

    def __str__(self) -> str:
        """Return string representation."""
        if self.details:
            parts = []
            for detail in self.details:
                if isinstance(detail, dict):
                    text = detail.get("message", str(detail))
                    where = detail.get("where")
                    if where is not None:
                        text = f"{text} (at: {where})"
                    parts.append(text)
                else:
                    parts.append(str(detail))
            return f"{self.message}: {'; '.join(parts)}"
        return self.message


class NonFiniteValueError(PonceletError):
    """Exception raised when a float computation produces NaN or Inf."""

    def __init__(self, message: str = "Non-finite scalar value") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class UnsupportedOperationError(PonceletError):
    """Exception raised when an operation is not available on a backend.

    Root extraction and the tangent-chord iteration produce algebraic numbers
    and only run on the float backend.
    """

    def __init__(
        self, message: str = "Operation not supported on this backend"
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class ConvergenceError(PonceletError):
    """Exception raised when an iterative solver exhausts its budget."""

    def __init__(self, message: str = "Iteration did not converge") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class DegenerateConicError(PonceletError):
    """Exception raised when a smooth conic is required but det = 0."""

    def __init__(self, message: str = "Conic is degenerate") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class DegenerateTransformError(PonceletError):
    """Exception raised for a singular projective transformation."""

    def __init__(self, message: str = "Projective transform is singular") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class RationalPointNotFoundError(PonceletError):
    """Exception raised when no rational point is found on an exact conic."""

    def __init__(
        self,
        message: str = (
            "No rational point found within the search bound; "
            "supply a seed point on the conic"
        ),
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class InexactDivisionError(PonceletError):
    """Exception raised when a polynomial division leaves a remainder."""

    def __init__(
        self, message: str = "Polynomial division is inexact", residual: float = 0.0
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.
            residual: Norm of the remainder left by the division.

        """
        super().__init__(message, [{"message": f"residual norm {residual:.3e}"}])
        self.residual = residual


class DependentSectionsError(PonceletError):
    """Exception raised when two sections are proportional."""

    def __init__(
        self, message: str = "Sections are linearly dependent (zero curve)"
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class DegenerateGonError(PonceletError):
    """Exception raised when a binary form has repeated roots."""

    def __init__(
        self, message: str = "Binary form has repeated roots (degenerate gon)"
    ) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class DegenerateStepError(PonceletError):
    """Exception raised when a tangent-chord step hits a tangency.

    The ``kind`` attribute names the degeneracy: ``"double intersection"``
    when the side is tangent to D, ``"double tangency"`` when the new vertex
    lies on C.
    """

    def __init__(self, kind: str, message: str | None = None) -> None:
        """Initialize the exception.

        Args:
            kind: Which degeneracy was met.
            message: Optional override of the default message.

        """
        super().__init__(message or f"Degenerate Poncelet step: {kind}")
        self.kind = kind


class InconsistentResultError(PonceletError):
    """Exception raised when two independent algorithms disagree."""

    def __init__(self, message: str = "Independent computations disagree") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)


class CertificateError(PonceletError):
    """Exception raised when a runtime certificate fails."""


class SceneError(PonceletError):
    """Exception raised for an invalid scene."""


class SceneParseError(SceneError):
    """Exception raised when a scene file cannot be parsed or validated."""

    def __init__(self, message: str, line: int, column: int) -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.
            line: 1-based line of the failure.
            column: 1-based column of the failure.

        """
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class SceneVersionError(SceneError):
    """Exception raised when a scene file format version is unsupported."""

    def __init__(self, message: str = "Unsupported scene format version") -> None:
        """Initialize the exception.

        Args:
            message: Human-readable error message.

        """
        super().__init__(message)
