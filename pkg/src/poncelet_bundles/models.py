"""Pydantic models for scene files and certificates.

A scene is a JSON document naming the geometric inputs of a run: conics as
symmetric 3x3 matrices, sections as binary forms (coefficients u-descending),
plane curves as monomial/coefficient terms, points and lines. Scalars are
written as fraction strings (``"3/7"``) for the exact backend or as
``[re, im]`` pairs for the float backend.

Binary forms are sections over the canonical frame of the inner conic: their
roots are tangency parameters of that conic after :func:`canonical_frame`.
"""

from __future__ import annotations

import json
import logging
import re
from collections.abc import Sequence
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Literal

from packaging.version import InvalidVersion, Version
from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveFloat,
    ValidationError,
    field_validator,
    model_validator,
)

from poncelet_bundles.const import (
    COEFFICIENT_ORDER,
    MIN_SCENE_FORMAT_VERSION,
    SCENE_FORMAT,
    SCENE_FORMAT_VERSION,
    VERDICT_FAIL,
    VERDICT_PASS,
)
from poncelet_bundles.exceptions import SceneError, SceneParseError, SceneVersionError
from poncelet_bundles.forms import BinaryForm, PlaneCurve, TernaryForm
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Scalar,
    Tolerance,
    coerce,
    to_display,
)
from poncelet_bundles.projective import Conic, ProjLine, ProjPoint

_LOGGER = logging.getLogger(__name__)


def _parse_scalar(value: Any) -> str | tuple[float, float]:
    """Normalize a scalar literal.

    Args:
        value: A fraction string, an integer, a float, or an ``[re, im]`` pair.

    Returns:
        The canonical fraction string, or an ``(re, im)`` tuple of floats.

    """
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, str):
        try:
            return str(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError) as err:
            raise ValueError(f"invalid fraction literal {value!r}") from err
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return (value, 0.0)
    if isinstance(value, Sequence) and len(value) == 2:
        re_part, im_part = value
        if all(
            isinstance(part, int | float) and not isinstance(part, bool)
            for part in (re_part, im_part)
        ):
            return (float(re_part), float(im_part))
    raise ValueError(f"invalid scalar literal {value!r}")


# Reusable annotated type for scene scalars. Exact values are kept as their
# canonical fraction string so that serialization is bit-exact.
ScalarLiteral = Annotated[str | tuple[float, float], BeforeValidator(_parse_scalar)]


def _literal_value(literal: str | tuple[float, float], backend: Backend) -> Scalar:
    """Convert a normalized literal to a backend scalar.

    Args:
        literal: Output of :func:`_parse_scalar`.
        backend: Target backend.

    Returns:
        A Fraction or a complex number.

    """
    if isinstance(literal, str):
        return coerce(Fraction(literal), backend)
    return coerce(complex(*literal), backend)


def _literal_of(value: Scalar) -> str | tuple[float, float]:
    display = to_display(value)
    return display if isinstance(display, str) else (display[0], display[1])


class PonceletBaseModel(BaseModel):
    """Base model for scene files.

    Unknown fields are rejected so that typos in hand-written scenes surface
    as validation errors.
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)


# =============================================================================
# Scene Models
# =============================================================================


class FormSpec(PonceletBaseModel):
    """A binary form: degree and u-descending coefficients."""

    degree: NonNegativeInt
    coefficients: list[ScalarLiteral]

    @model_validator(mode="after")
    def _check_length(self) -> FormSpec:
        if len(self.coefficients) != self.degree + 1:
            raise ValueError(
                f"degree {self.degree} needs {self.degree + 1} coefficients, "
                f"got {len(self.coefficients)}"
            )
        return self


class TermSpec(PonceletBaseModel):
    """One monomial ``x0^i x1^j x2^k`` with its coefficient."""

    monomial: tuple[NonNegativeInt, NonNegativeInt, NonNegativeInt]
    coefficient: ScalarLiteral


class CurveSpec(PonceletBaseModel):
    """A plane curve as a list of ternary terms."""

    degree: NonNegativeInt
    terms: list[TermSpec]

    @model_validator(mode="after")
    def _check_terms(self) -> CurveSpec:
        seen: set[tuple[int, int, int]] = set()
        for term in self.terms:
            if sum(term.monomial) != self.degree:
                raise ValueError(
                    f"monomial {list(term.monomial)} does not have degree "
                    f"{self.degree}"
                )
            if term.monomial in seen:
                raise ValueError(f"monomial {list(term.monomial)} listed twice")
            seen.add(term.monomial)
        return self


Triple = Annotated[list[ScalarLiteral], Field(min_length=3, max_length=3)]


class SceneRoles(PonceletBaseModel):
    """Default inputs for the command-line pipelines, by name."""

    inner: str | None = None
    outer: str | None = None
    section: str | None = None
    curve: str | None = None
    start: str | None = None
    n: Annotated[int, Field(ge=2)] | None = None
    branch: Literal[0, 1] = 0


_ROLE_CATEGORIES = {
    "inner": "conics",
    "outer": "conics",
    "section": "forms",
    "curve": "curves",
    "start": "points",
}

_TOLERANCE_FIELDS = frozenset(Tolerance.model_fields)


class Scene(PonceletBaseModel):
    """A named collection of conics, sections, curves, points and lines."""

    format: Literal["poncelet-scene"] = SCENE_FORMAT
    format_version: str = SCENE_FORMAT_VERSION
    coefficient_order: Literal["u-descending"] = COEFFICIENT_ORDER
    backend: Backend = Backend.EXACT
    description: str | None = None
    conics: dict[str, list[Triple]] = Field(default_factory=dict)
    forms: dict[str, FormSpec] = Field(default_factory=dict)
    curves: dict[str, CurveSpec] = Field(default_factory=dict)
    points: dict[str, Triple] = Field(default_factory=dict)
    lines: dict[str, Triple] = Field(default_factory=dict)
    roles: SceneRoles = Field(default_factory=SceneRoles)
    tolerance: dict[str, PositiveFloat] = Field(default_factory=dict)

    @field_validator("format_version")
    @classmethod
    def _check_version(cls, value: str) -> str:
        try:
            version = Version(value)
        except InvalidVersion as err:
            raise ValueError(f"invalid format_version {value!r}") from err
        current = Version(SCENE_FORMAT_VERSION)
        if version < Version(MIN_SCENE_FORMAT_VERSION) or version.major > current.major:
            raise SceneVersionError(
                f"scene format {value} is not supported "
                f"(need >= {MIN_SCENE_FORMAT_VERSION}, < {current.major + 1}.0)"
            )
        return value

    @field_validator("tolerance")
    @classmethod
    def _check_tolerance(cls, value: dict[str, float]) -> dict[str, float]:
        unknown = sorted(set(value) - _TOLERANCE_FIELDS)
        if unknown:
            raise ValueError(f"unknown tolerance fields: {', '.join(unknown)}")
        return value

    @model_validator(mode="after")
    def _check_scene(self) -> Scene:
        seen: dict[str, str] = {}
        for category in ("conics", "forms", "curves", "points", "lines"):
            for name in getattr(self, category):
                if name in seen:
                    raise ValueError(
                        f"name {name!r} is used by both {seen[name]} and {category}"
                    )
                seen[name] = category
        for role, category in _ROLE_CATEGORIES.items():
            name = getattr(self.roles, role)
            if name is not None and seen.get(name) != category:
                raise ValueError(
                    f"roles.{role} refers to undefined {category} {name!r}"
                )
        for name, rows in self.conics.items():
            if len(rows) != 3:
                raise ValueError(f"conic {name!r} needs 3 rows, got {len(rows)}")
            for i in range(3):
                for j in range(i + 1, 3):
                    a = _literal_value(rows[i][j], Backend.FLOAT)
                    b = _literal_value(rows[j][i], Backend.FLOAT)
                    if a != b:
                        raise ValueError(
                            f"conic {name!r} is not symmetric at ({i}, {j})"
                        )
        if self.backend is Backend.EXACT:
            for literal in self._literals():
                if not isinstance(literal, str):
                    raise ValueError(
                        f"exact scene contains the float literal {list(literal)}"
                    )
        return self

    def _literals(self) -> list[str | tuple[float, float]]:
        found = [v for rows in self.conics.values() for row in rows for v in row]
        found += [v for spec in self.forms.values() for v in spec.coefficients]
        found += [t.coefficient for spec in self.curves.values() for t in spec.terms]
        found += [v for triple in self.points.values() for v in triple]
        found += [v for triple in self.lines.values() for v in triple]
        return found

    # -------------------------------------------------------------------------
    # Domain objects
    # -------------------------------------------------------------------------

    def _lookup(self, category: str, name: str) -> Any:
        table = getattr(self, category)
        if name not in table:
            raise SceneError(f"scene has no {category[:-1]} named {name!r}")
        return table[name]

    def _values(self, literals: Sequence[str | tuple[float, float]]) -> list[Scalar]:
        return [_literal_value(v, self.backend) for v in literals]

    def conic(self, name: str) -> Conic:
        rows = self._lookup("conics", name)
        return Conic.from_rows([self._values(row) for row in rows])

    def form(self, name: str) -> BinaryForm:
        spec = self._lookup("forms", name)
        values = self._values(spec.coefficients)
        return BinaryForm.from_coefficients(values, self.backend)

    def curve(self, name: str) -> PlaneCurve:
        spec = self._lookup("curves", name)
        mapping = {
            term.monomial: _literal_value(term.coefficient, self.backend)
            for term in spec.terms
        }
        return PlaneCurve(TernaryForm.from_dict(spec.degree, mapping, self.backend))

    def point(self, name: str) -> ProjPoint:
        return ProjPoint(tuple(self._values(self._lookup("points", name))))

    def line(self, name: str) -> ProjLine:
        return ProjLine(tuple(self._values(self._lookup("lines", name))))

    def tolerance_policy(self, base: Tolerance = DEFAULT_TOLERANCE) -> Tolerance:
        """``base`` with the scene's tolerance block applied on top."""
        return base.with_overrides(**self.tolerance)

    def with_backend(self, backend: Backend) -> Scene:
        """The same scene with every literal converted to ``backend``."""
        if backend is self.backend:
            return self

        def convert(literal: str | tuple[float, float]) -> str | tuple[float, float]:
            return _literal_of(_literal_value(literal, backend))

        data = self.model_dump()
        data["backend"] = backend
        data["conics"] = {
            k: [[convert(v) for v in row] for row in rows]
            for k, rows in self.conics.items()
        }
        data["forms"] = {
            k: {
                "degree": s.degree,
                "coefficients": [convert(v) for v in s.coefficients],
            }
            for k, s in self.forms.items()
        }
        data["curves"] = {
            k: {
                "degree": s.degree,
                "terms": [
                    {"monomial": t.monomial, "coefficient": convert(t.coefficient)}
                    for t in s.terms
                ],
            }
            for k, s in self.curves.items()
        }
        data["points"] = {k: [convert(v) for v in t] for k, t in self.points.items()}
        data["lines"] = {k: [convert(v) for v in t] for k, t in self.lines.items()}
        return Scene.model_validate(data)


# =============================================================================
# Scene I/O
# =============================================================================


class _DuplicateKeyError(ValueError):
    def __init__(self, key: str) -> None:
        super().__init__(f"duplicate name {key!r}")
        self.key = key


def _reject_duplicates(pairs: list[tuple[str, Any]]) -> dict[str, Any]:
    result: dict[str, Any] = {}
    for key, value in pairs:
        if key in result:
            raise _DuplicateKeyError(key)
        result[key] = value
    return result


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


def _locate(text: str, loc: Sequence[int | str]) -> tuple[int, int]:
    """Best-effort position of a validation error path in the source text.

    Args:
        text: The scene source.
        loc: The pydantic error location.

    Returns:
        1-based line and column of the last path key found, in order.

    """
    offset = 0
    for part in loc:
        if not isinstance(part, str):
            continue
        match = re.compile(rf'"{re.escape(part)}"\s*:').search(text, offset)
        if match is not None:
            offset = match.start()
    return _position(text, offset)


def parse_scene(text: str) -> Scene:
    """Parse and validate a scene document.

    Args:
        text: JSON source of the scene.

    Returns:
        The validated scene.

    Raises:
        SceneParseError: Invalid JSON, duplicate names or schema violations,
            with the line and column of the failure.
        SceneVersionError: Unsupported ``format_version``.

    """
    try:
        data = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as err:
        raise SceneParseError(err.msg, err.lineno, err.colno) from err
    except _DuplicateKeyError as err:
        pattern = re.compile(rf'"{re.escape(err.key)}"\s*:')
        matches = list(pattern.finditer(text))
        offset = matches[1].start() if len(matches) > 1 else 0
        raise SceneParseError(str(err), *_position(text, offset)) from err
    if not isinstance(data, dict):
        raise SceneParseError("a scene must be a JSON object", 1, 1)
    try:
        return Scene.model_validate(data)
    except ValidationError as err:
        first = err.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "scene"
        line, column = _locate(text, first["loc"])
        raise SceneParseError(f"{where}: {first['msg']}", line, column) from err


def load_scene(path: str | Path) -> Scene:
    """Read and validate a scene file."""
    source = Path(path)
    _LOGGER.debug("loading scene %s", source)
    return parse_scene(source.read_text(encoding="utf-8"))


def _compact(value: Any) -> str:
    return json.dumps(value, separators=(", ", ": "))


def dump_scene(scene: Scene) -> str:
    """Serialize a scene, one named object per line.

    ``parse_scene(dump_scene(s)) == s`` for every valid scene.
    """
    data = scene.model_dump(mode="json", exclude_none=True)
    out = ["{"]
    items = list(data.items())
    for index, (key, value) in enumerate(items):
        comma = "," if index < len(items) - 1 else ""
        if isinstance(value, dict) and value and key != "roles":
            out.append(f"  {json.dumps(key)}: {{")
            entries = list(value.items())
            for k, (name, entry) in enumerate(entries):
                tail = "," if k < len(entries) - 1 else ""
                out.append(f"    {json.dumps(name)}: {_compact(entry)}{tail}")
            out.append(f"  }}{comma}")
        else:
            out.append(f"  {json.dumps(key)}: {_compact(value)}{comma}")
    out.append("}")
    return "\n".join(out) + "\n"


# =============================================================================
# Certificates
# =============================================================================


class Residual(BaseModel):
    """A measured residual and the tolerance it is certified against."""

    model_config = ConfigDict(frozen=True)

    value: NonNegativeFloat
    tolerance: NonNegativeFloat

    @property
    def within(self) -> bool:
        return self.value <= self.tolerance


class Certificate(BaseModel):
    """Machine-readable outcome of a pipeline run.

    Dumps are key-sorted so that exact-backend runs are byte-identical.
    """

    model_config = ConfigDict(frozen=True)

    operation: str
    inputs: dict[str, str] = Field(default_factory=dict)
    verdict: Literal["pass", "fail"]
    residuals: dict[str, Residual] = Field(default_factory=dict)
    evidence: dict[str, Any] = Field(default_factory=dict)
    problems: list[dict[str, Any]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_verdict(self) -> Certificate:
        if self.verdict == VERDICT_PASS:
            above = sorted(k for k, r in self.residuals.items() if not r.within)
            if above:
                raise ValueError(
                    f"pass verdict with residuals above tolerance: {', '.join(above)}"
                )
            if self.problems:
                raise ValueError("pass verdict with listed problems")
        return self

    @classmethod
    def decide(
        cls,
        operation: str,
        inputs: dict[str, str],
        *,
        residuals: dict[str, Residual] | None = None,
        evidence: dict[str, Any] | None = None,
        problems: Sequence[dict[str, Any]] = (),
    ) -> Certificate:
        """Build a certificate whose verdict follows from its evidence.

        The verdict is pass iff there are no problems and every residual is
        within its tolerance.
        """
        residuals = residuals or {}
        ok = not problems and all(r.within for r in residuals.values())
        return cls(
            operation=operation,
            inputs=inputs,
            verdict=VERDICT_PASS if ok else VERDICT_FAIL,
            residuals=residuals,
            evidence=evidence or {},
            problems=list(problems),
        )

    @property
    def passed(self) -> bool:
        return self.verdict == VERDICT_PASS

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2)
