"""Tests for scene files and certificates."""

from __future__ import annotations

import json
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any

import pytest
from pydantic import ValidationError

from poncelet_bundles.exceptions import SceneError, SceneParseError, SceneVersionError
from poncelet_bundles.models import (
    Certificate,
    Residual,
    Scene,
    dump_scene,
    load_scene,
    parse_scene,
)
from poncelet_bundles.numeric import Backend
from poncelet_bundles.projective import ProjPoint


def _scene_text(**overrides: Any) -> str:
    data: dict[str, Any] = {
        "format": "poncelet-scene",
        "format_version": "1.1",
        "backend": "exact",
        "conics": {"C": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]]},
    }
    data.update(overrides)
    return json.dumps(data, indent=2)


class TestParseScene:
    """Tests for reading scene documents."""

    def test_all_fixtures_load(self, fixtures_dir: Path) -> None:
        """Test that every shipped scene validates."""
        paths = sorted(fixtures_dir.glob("*.json"))

        assert len(paths) >= 8
        for path in paths:
            assert isinstance(load_scene(path), Scene)

    def test_exact_values(self, load_fixture: Callable[[str], Scene]) -> None:
        """Test that fraction strings become exact scalars."""
        scene = load_fixture("canonical_triangle")
        d = scene.conic("D")

        assert d.backend is Backend.EXACT
        assert scene.form("f").coefficients == (1, 0, -1, 0)
        assert scene.curve("S").degree == 2
        assert scene.roles.section == "f"

    def test_float_values(self, load_fixture: Callable[[str], Scene]) -> None:
        """Test that float scenes use complex scalars."""
        scene = load_fixture("fuss")

        assert scene.backend is Backend.FLOAT
        assert scene.point("p").backend is Backend.FLOAT
        assert scene.roles.n == 4

    def test_invalid_json_position(self) -> None:
        """Test that JSON errors report line and column."""
        with pytest.raises(SceneParseError) as exc_info:
            parse_scene('{\n  "format": "poncelet-scene",\n  "conics": ]\n}')

        assert exc_info.value.line == 3
        assert exc_info.value.column == 13

    def test_duplicate_name_position(self) -> None:
        """Test that a repeated name points at its second occurrence."""
        text = (
            "{\n"
            '  "conics": {\n'
            '    "C": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]],\n'
            '    "C": [["1", "0", "0"], ["0", "1", "0"], ["0", "0", "-4"]]\n'
            "  }\n"
            "}"
        )

        with pytest.raises(SceneParseError, match="duplicate name 'C'") as exc_info:
            parse_scene(text)
        assert (exc_info.value.line, exc_info.value.column) == (4, 5)

    def test_name_shared_across_categories(self) -> None:
        """Test that a name must be unique across all object kinds."""
        text = _scene_text(points={"C": ["1", "0", "0"]})

        with pytest.raises(SceneParseError, match="used by both conics and points"):
            parse_scene(text)

    def test_non_object_rejected(self) -> None:
        """Test that the document root is an object."""
        with pytest.raises(SceneParseError, match="JSON object"):
            parse_scene("[1, 2, 3]")

    def test_unknown_field_rejected(self) -> None:
        """Test that typos in field names fail."""
        with pytest.raises(SceneParseError, match="conic"):
            parse_scene(_scene_text(conic={}))

    @pytest.mark.parametrize("version", ["2.0", "0.9"])
    def test_unsupported_version(self, version: str) -> None:
        """Test that out-of-range format versions are refused."""
        with pytest.raises(SceneVersionError, match=f"scene format {version}"):
            parse_scene(_scene_text(format_version=version))

    def test_older_minor_version_accepted(self) -> None:
        """Test that 1.0 scenes still load."""
        assert parse_scene(_scene_text(format_version="1.0")).format_version == "1.0"

    def test_garbage_version(self) -> None:
        """Test that a non-version string is a validation error."""
        with pytest.raises(SceneParseError, match="invalid format_version"):
            parse_scene(_scene_text(format_version="latest"))

    def test_asymmetric_conic(self) -> None:
        """Test that conic matrices must be symmetric."""
        rows = [["1", "2", "0"], ["0", "1", "0"], ["0", "0", "-1"]]

        with pytest.raises(SceneParseError, match="not symmetric at"):
            parse_scene(_scene_text(conics={"C": rows}))

    def test_exact_scene_rejects_float_literal(self) -> None:
        """Test that exact scenes hold fraction strings only."""
        rows = [[1.5, "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]]

        with pytest.raises(SceneParseError, match="float literal"):
            parse_scene(_scene_text(conics={"C": rows}))

    def test_bad_fraction_literal(self) -> None:
        """Test that malformed fraction strings are rejected."""
        rows = [["1/0", "0", "0"], ["0", "1", "0"], ["0", "0", "-1"]]

        with pytest.raises(SceneParseError, match="invalid fraction literal"):
            parse_scene(_scene_text(conics={"C": rows}))

    def test_form_degree_checked(self) -> None:
        """Test that a form lists degree + 1 coefficients."""
        forms = {"f": {"degree": 3, "coefficients": ["1", "0", "1"]}}

        with pytest.raises(SceneParseError, match="needs 4 coefficients"):
            parse_scene(_scene_text(forms=forms))

    def test_curve_monomials_checked(self) -> None:
        """Test that every curve term has the curve's degree."""
        curves = {
            "S": {"degree": 2, "terms": [{"monomial": [1, 0, 0], "coefficient": "1"}]}
        }

        with pytest.raises(SceneParseError, match="does not have degree 2"):
            parse_scene(_scene_text(curves=curves))

    def test_roles_must_resolve(self) -> None:
        """Test that roles refer to objects of the right kind."""
        with pytest.raises(SceneParseError, match="roles.outer refers to undefined"):
            parse_scene(_scene_text(roles={"inner": "C", "outer": "D"}))

    def test_unknown_tolerance_field(self) -> None:
        """Test that tolerance overrides are checked by name."""
        with pytest.raises(SceneParseError, match="unknown tolerance fields: eps"):
            parse_scene(_scene_text(tolerance={"eps": 1e-3}))

    def test_tolerance_policy(self) -> None:
        """Test that the scene tolerance block overrides the defaults."""
        scene = parse_scene(_scene_text(tolerance={"certify": 1e-5}))

        assert scene.tolerance_policy().certify == 1e-5

    def test_lookup_of_missing_name(self) -> None:
        """Test that asking for an undefined object is a scene error."""
        scene = parse_scene(_scene_text())

        with pytest.raises(SceneError, match="no conic named 'D'"):
            scene.conic("D")


class TestDumpScene:
    """Tests for writing scene documents."""

    @pytest.mark.parametrize(
        "name", ["canonical_triangle", "chapple", "fuss", "darboux_quadrilateral"]
    )
    def test_dump_parses_back(
        self, name: str, load_fixture: Callable[[str], Scene]
    ) -> None:
        """Test that dumped scenes parse to the same scene."""
        scene = load_fixture(name)

        assert parse_scene(dump_scene(scene)) == scene

    def test_float_literal_is_exact(self, load_fixture: Callable[[str], Scene]) -> None:
        """Test that float literals are written with full precision."""
        scene = load_fixture("fuss")
        dumped = dump_scene(scene)

        assert "1.4142135623730951" in dumped
        assert scene.point("p").proportional_to(
            ProjPoint.of(1.0, 2.0**0.5, 0.0)
        )

    def test_one_object_per_line(self, load_fixture: Callable[[str], Scene]) -> None:
        """Test the line-oriented layout."""
        lines = dump_scene(load_fixture("canonical_triangle")).splitlines()

        assert any(line.startswith('    "C": ') for line in lines)
        assert any(line.startswith('    "D": ') for line in lines)
        assert lines[0] == "{"
        assert lines[-1] == "}"

    def test_backend_conversion(self, load_fixture: Callable[[str], Scene]) -> None:
        """Test that an exact scene converts to float and keeps its values."""
        scene = load_fixture("canonical_triangle").with_backend(Backend.FLOAT)

        assert scene.backend is Backend.FLOAT
        assert scene.conics["D"][1][2] == (0.5, 0.0)
        assert scene.conic("D").backend is Backend.FLOAT
        assert parse_scene(dump_scene(scene)) == scene

    def test_float_to_exact_conversion(
        self, load_fixture: Callable[[str], Scene]
    ) -> None:
        """Test that float literals become exact binary fractions."""
        scene = load_fixture("fuss").with_backend(Backend.EXACT)

        assert scene.points["p"][1] == str(Fraction(2.0**0.5))
        assert scene.point("p").backend is Backend.EXACT


class TestCertificate:
    """Tests for the certificate model."""

    def test_decide_pass(self) -> None:
        """Test that residuals within tolerance give a pass."""
        cert = Certificate.decide(
            "trace",
            {"scene": "chapple.json"},
            residuals={"closure": Residual(value=1e-12, tolerance=1e-7)},
        )

        assert cert.passed
        assert cert.verdict == "pass"

    def test_decide_fail_on_residual(self) -> None:
        """Test that one residual over tolerance fails the certificate."""
        cert = Certificate.decide(
            "trace",
            {},
            residuals={"closure": Residual(value=0.2, tolerance=1e-7)},
        )

        assert not cert.passed

    def test_decide_fail_on_problem(self) -> None:
        """Test that listed problems fail the certificate."""
        cert = Certificate.decide("incidence", {}, problems=[{"message": "bad"}])

        assert cert.verdict == "fail"

    def test_pass_verdict_must_be_earned(self) -> None:
        """Test that a pass verdict is validated against its residuals."""
        with pytest.raises(ValidationError, match="above tolerance: closure"):
            Certificate(
                operation="trace",
                verdict="pass",
                residuals={"closure": Residual(value=1.0, tolerance=1e-7)},
            )
        with pytest.raises(ValidationError, match="listed problems"):
            Certificate(operation="trace", verdict="pass", problems=[{"a": 1}])

    def test_negative_residual_rejected(self) -> None:
        """Test that residuals are non-negative."""
        with pytest.raises(ValidationError):
            Residual(value=-1.0, tolerance=1e-7)

    def test_json_is_key_sorted(self) -> None:
        """Test that the dump is deterministic and sorted."""
        cert = Certificate.decide(
            "matrix", {"n": "3"}, evidence={"shape": [4, 2], "band": "x0 x1 x2"}
        )
        text = cert.to_json()
        data = json.loads(text)

        assert list(data) == sorted(data)
        assert list(data["evidence"]) == ["band", "shape"]
        assert text == cert.to_json()
        assert Certificate.model_validate(data) == cert
