"""Shared pytest fixtures for poncelet-bundles tests."""

from __future__ import annotations

import math
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from poncelet_bundles import (
    DEFAULT_TOLERANCE,
    BinaryForm,
    Conic,
    Scene,
    Tolerance,
    load_scene,
)

FIXTURES = Path(__file__).parent / "fixtures"


def circle(radius: float) -> Conic:
    """Circle ``x^2 + y^2 = radius^2`` in the chart x0 = 1 (float backend)."""
    return Conic.from_rows(
        [[-(radius**2) + 0j, 0j, 0j], [0j, 1 + 0j, 0j], [0j, 0j, 1 + 0j]]
    )


@pytest.fixture
def fixtures_dir() -> Path:
    """Return the directory of the shipped scene files."""
    return FIXTURES


@pytest.fixture
def scene_path() -> Callable[[str], str]:
    """Return a resolver from fixture name to scene file path."""

    def resolve(name: str) -> str:
        return str(FIXTURES / f"{name}.json")

    return resolve


@pytest.fixture
def load_fixture() -> Callable[[str], Scene]:
    """Return a loader for the shipped scene files."""

    def load(name: str) -> Scene:
        return load_scene(FIXTURES / f"{name}.json")

    return load


@pytest.fixture
def tol() -> Tolerance:
    """Return the default tolerance policy."""
    return DEFAULT_TOLERANCE


@pytest.fixture
def rng() -> np.random.Generator:
    """Return a seeded random generator."""
    return np.random.default_rng(1234)


@pytest.fixture
def unit_circle() -> Conic:
    """Return the inner circle of the concentric fixtures."""
    return circle(1.0)


@pytest.fixture
def chapple_outer() -> Conic:
    """Return the circumscribed circle of the triangle porism (R = 2r)."""
    return circle(2.0)


@pytest.fixture
def fuss_outer() -> Conic:
    """Return the circumscribed circle of the quadrilateral porism."""
    return circle(math.sqrt(2.0))


@pytest.fixture
def perturbed_outer() -> Conic:
    """Return a circle of radius 2.1, which admits no triangle porism."""
    return circle(2.1)


@pytest.fixture
def triangle_section() -> BinaryForm:
    """Return ``u^3 - u*v^2``, with roots (0:1), (1:1), (-1:1)."""
    return BinaryForm.from_coefficients([1, 0, -1, 0])


@pytest.fixture
def triangle_outer() -> Conic:
    """Return an exact conic through the three vertices of the triangle section."""
    return Conic.from_rows(
        [["1", "0", "1"], ["0", "-1", "1/2"], ["1", "1/2", "1"]]
    )
