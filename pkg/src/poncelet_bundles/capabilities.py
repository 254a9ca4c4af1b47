"""Backend capability detection.

Root extraction and the tangent-chord iteration produce algebraic numbers, so
they only run on the float backend. Library entry points consult this table
before doing any work so that an exact-backend caller gets a clean
:class:`UnsupportedOperationError` instead of a half-finished computation.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from poncelet_bundles.exceptions import UnsupportedOperationError
from poncelet_bundles.numeric import Backend

if TYPE_CHECKING:
    from collections.abc import Mapping

FLOAT_ONLY_OPERATIONS: frozenset[str] = frozenset(
    {
        "forms.roots",
        "closure.poncelet_step",
        "closure.trace_gon",
    }
)


class BackendCapabilities:
    """Typed view over which operations a backend supports."""

    __slots__ = ("_backend", "_missing")

    def __init__(
        self,
        backend: Backend,
        missing: Mapping[Backend, frozenset[str]] | None = None,
    ) -> None:
        table = (
            missing if missing is not None else {Backend.EXACT: FLOAT_ONLY_OPERATIONS}
        )
        self._backend = backend
        self._missing: frozenset[str] = table.get(backend, frozenset())

    @property
    def backend(self) -> Backend:
        return self._backend

    @classmethod
    def for_backend(cls, backend: Backend | str) -> BackendCapabilities:
        return cls(Backend(backend))

    def has(self, path: str) -> bool:
        """Check whether a dotted path (`module.operation`) is supported."""
        if "." not in path:
            raise ValueError(
                f"Capability path must be dotted (module.operation), got {path!r}"
            )
        return path not in self._missing

    def has_all(self, *paths: str) -> bool:
        return all(self.has(p) for p in paths)

    def require(self, path: str) -> None:
        """Raise if the operation is unavailable on this backend."""
        if not self.has(path):
            raise UnsupportedOperationError(
                f"{path} is not available on the {self._backend} backend "
                "(its results are algebraic numbers)"
            )
