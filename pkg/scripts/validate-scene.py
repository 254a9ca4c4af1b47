#!/usr/bin/env python3
"""Scene file validator.

Checks that scene files load, that every named object builds on its declared
backend, and that the conics are smooth. Optionally dumps the JSON Schema of
the scene format.

Usage:
  python scripts/validate-scene.py                      # Validate tests/fixtures
  python scripts/validate-scene.py my-scene.json ...    # Validate given files
  python scripts/validate-scene.py --dump-schema        # Write docs/scene.schema.json
"""

from __future__ import annotations

import argparse
import json
import sys
import textwrap
from dataclasses import dataclass
from pathlib import Path

# Ensure the local src is importable
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from poncelet_bundles import PonceletError, Scene, load_scene  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent


# =============================================================================
# Checks
# =============================================================================


@dataclass
class SceneCheck:
    """Result of validating one scene file."""

    path: Path
    status: str  # PASS, FAIL, WARN
    message: str


def _summarize(scene: Scene) -> str:
    parts = [
        f"{len(table)} {category}"
        for category in ("conics", "forms", "curves", "points", "lines")
        if (table := getattr(scene, category))
    ]
    return f"{scene.backend}: " + (", ".join(parts) or "empty")


def check_scene(path: Path) -> SceneCheck:
    """Load a scene and build each of its objects."""
    try:
        scene = load_scene(path)
    except (PonceletError, OSError) as e:
        return SceneCheck(path, "FAIL", f"{type(e).__name__}: {e}")

    warnings = []
    try:
        for name in scene.conics:
            if not scene.conic(name).smooth:
                warnings.append(f"conic {name} is singular")
        for name in scene.forms:
            scene.form(name)
        for name in scene.curves:
            scene.curve(name)
        for name in scene.points:
            scene.point(name)
        for name in scene.lines:
            scene.line(name)
    except (PonceletError, ValueError) as e:
        return SceneCheck(path, "FAIL", f"{type(e).__name__}: {e}")

    if warnings:
        return SceneCheck(path, "WARN", "; ".join(warnings))
    return SceneCheck(path, "PASS", _summarize(scene))


def print_report(results: list[SceneCheck]) -> int:
    print("\n" + "=" * 70)
    print("SCENE FILE VALIDATION")
    print("=" * 70)

    for r in results:
        icon = {"PASS": "✅", "FAIL": "❌", "WARN": "⚠️"}.get(r.status, "?")
        print(f"  {icon} {r.path.name} → {r.message}")

    passed = sum(1 for r in results if r.status == "PASS")
    failed = sum(1 for r in results if r.status == "FAIL")
    warned = sum(1 for r in results if r.status == "WARN")
    print(f"\n  Results: {passed} passed, {failed} failed, {warned} warnings")

    print("\n" + "=" * 70)
    if failed:
        print("❌ OVERALL: INVALID SCENES FOUND — See errors above")
    else:
        print("✅ OVERALL: ALL SCENES VALID")
    print("=" * 70)
    return 1 if failed else 0


# =============================================================================
# Main
# =============================================================================


def main() -> int:
    parser = argparse.ArgumentParser(
        description="Poncelet scene file validator",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=textwrap.dedent("""\
            examples:
              %(prog)s                        # Validate the shipped fixtures
              %(prog)s scene.json other.json  # Validate specific files
              %(prog)s --dump-schema          # Write the JSON Schema to docs/
        """),
    )
    parser.add_argument("paths", nargs="*", type=Path, help="Scene files")
    parser.add_argument(
        "--dump-schema",
        action="store_true",
        help="Write the scene JSON Schema to docs/scene.schema.json",
    )
    args = parser.parse_args()

    if args.dump_schema:
        dump_path = ROOT / "docs" / "scene.schema.json"
        schema = Scene.model_json_schema()
        dump_path.write_text(json.dumps(schema, indent=2) + "\n", encoding="utf-8")
        print(f"Schema dumped to {dump_path}")
        if not args.paths:
            return 0

    paths = args.paths or sorted((ROOT / "tests" / "fixtures").glob("*.json"))
    if not paths:
        print("ERROR: no scene files found")
        return 1

    print(f"\n→ Validating {len(paths)} scene file(s)...")
    return print_report([check_scene(path) for path in paths])


if __name__ == "__main__":
    sys.exit(main())
