"""Tests for custom exceptions."""

from __future__ import annotations

import pytest

from poncelet_bundles.exceptions import (
    CertificateError,
    DegenerateConicError,
    DegenerateGonError,
    DegenerateStepError,
    InexactDivisionError,
    PonceletError,
    SceneError,
    SceneParseError,
    SceneVersionError,
    UnsupportedOperationError,
)


class TestPonceletError:
    """Tests for PonceletError."""

    def test_error_with_message_only(self) -> None:
        """Test error with message only."""
        error = PonceletError("Something went wrong")

        assert str(error) == "Something went wrong"
        assert error.message == "Something went wrong"
        assert error.details == []

    def test_error_with_details(self) -> None:
        """Test error with evidence records."""
        details = [
            {"message": "vertex residual", "where": "vertex 0,1", "residual": 0.5},
            {"message": "repeated line"},
        ]
        error = PonceletError("Certificate failed", details)

        assert "Certificate failed" in str(error)
        assert "vertex residual (at: vertex 0,1)" in str(error)
        assert "repeated line" in str(error)
        assert error.details == details

    def test_error_with_non_dict_details(self) -> None:
        """Test error with non-dict detail items."""
        error = PonceletError("Failed", ["plain text"])  # type: ignore[list-item]

        assert str(error) == "Failed: plain text"


class TestDefaultMessages:
    """Tests for exceptions with default messages."""

    @pytest.mark.parametrize(
        ("error_class", "text"),
        [
            (UnsupportedOperationError, "not supported on this backend"),
            (DegenerateConicError, "Conic is degenerate"),
            (DegenerateGonError, "repeated roots"),
            (SceneVersionError, "Unsupported scene format version"),
        ],
    )
    def test_default_message(self, error_class: type[PonceletError], text: str) -> None:
        """Test that each error carries a readable default."""
        error = error_class()  # type: ignore[call-arg]

        assert text in str(error)
        assert isinstance(error, PonceletError)

    def test_inexact_division_records_residual(self) -> None:
        """Test that the remainder norm is kept and reported."""
        error = InexactDivisionError(residual=0.25)

        assert error.residual == 0.25
        assert "residual norm 2.500e-01" in str(error)

    def test_degenerate_step_kind(self) -> None:
        """Test that the step degeneracy is named."""
        error = DegenerateStepError("double tangency")

        assert error.kind == "double tangency"
        assert str(error) == "Degenerate Poncelet step: double tangency"


class TestSceneErrors:
    """Tests for scene errors."""

    def test_parse_error_position(self) -> None:
        """Test that the parse position is kept and rendered."""
        error = SceneParseError("unexpected token", 3, 14)

        assert (error.line, error.column) == (3, 14)
        assert str(error) == "unexpected token (line 3, column 14)"
        assert isinstance(error, SceneError)

    def test_certificate_error_is_catchable(self) -> None:
        """Test that certificate failures share the base class."""
        with pytest.raises(PonceletError):
            raise CertificateError("porism certificate failed")
