"""Tests for backend capability checks."""

from __future__ import annotations

import pytest

from poncelet_bundles.capabilities import FLOAT_ONLY_OPERATIONS, BackendCapabilities
from poncelet_bundles.exceptions import UnsupportedOperationError
from poncelet_bundles.numeric import Backend


class TestBackendCapabilities:
    """Tests for BackendCapabilities."""

    def test_float_supports_everything(self) -> None:
        """Test that the float backend has no missing operations."""
        caps = BackendCapabilities.for_backend(Backend.FLOAT)

        assert caps.backend is Backend.FLOAT
        assert caps.has_all(*FLOAT_ONLY_OPERATIONS)
        assert caps.has("schwarzenberger.zero_locus")

    def test_exact_lacks_float_only_operations(self) -> None:
        """Test that root finding and iteration are float-only."""
        caps = BackendCapabilities.for_backend("exact")

        assert not caps.has("forms.roots")
        assert not caps.has("closure.trace_gon")
        assert caps.has("closure.porism_family")
        assert caps.has("closure.porism_pencil")
        assert not caps.has_all("closure.porism_pencil", "closure.poncelet_step")

    def test_require_raises(self) -> None:
        """Test that a missing operation raises with the backend name."""
        caps = BackendCapabilities.for_backend(Backend.EXACT)

        with pytest.raises(UnsupportedOperationError, match="exact backend"):
            caps.require("closure.trace_gon")
        caps.require("schwarzenberger.determinant_curve")

    def test_path_must_be_dotted(self) -> None:
        """Test that capability paths name module and operation."""
        with pytest.raises(ValueError, match="must be dotted"):
            BackendCapabilities.for_backend(Backend.FLOAT).has("roots")

    def test_unknown_backend(self) -> None:
        """Test that backend names are validated."""
        with pytest.raises(ValueError):
            BackendCapabilities.for_backend("interval")

    def test_custom_table(self) -> None:
        """Test an explicit table of missing operations."""
        caps = BackendCapabilities(
            Backend.FLOAT, {Backend.FLOAT: frozenset({"render.svg"})}
        )

        assert not caps.has("render.svg")
        assert caps.has("forms.roots")
