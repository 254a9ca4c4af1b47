"""Constants for tolerances, scene format and command-line behaviour."""

from __future__ import annotations

# =============================================================================
# Scene Format
# =============================================================================

SCENE_FORMAT = "poncelet-scene"
SCENE_FORMAT_VERSION = "1.1"
MIN_SCENE_FORMAT_VERSION = "1.0"
COEFFICIENT_ORDER = "u-descending"

# =============================================================================
# Tolerances
# =============================================================================

DEFAULT_REL_EPS = 1e-9
DEFAULT_ABS_FLOOR = 1e-12
DEFAULT_NULL_REL = 1e-8
DEFAULT_CERTIFY_TOL = 1e-7
DEFAULT_MATCH_TOL = 1e-5
DEFAULT_ROOT_SEPARATION = 1e-6

# =============================================================================
# Iteration Budgets
# =============================================================================

NEWTON_MAX_ITER = 60
RATIONAL_POINT_SEARCH_BOUND = 12
PARAMETRIZE_MAX_LINES = 32
RANDOM_TRANSFORM_MAX_COND = 1e3

# =============================================================================
# Randomness
# =============================================================================

DEFAULT_SEED = 20_240_613

# =============================================================================
# Rendering
# =============================================================================

RENDER_GRID = 512
RENDER_SIZE = 600
DEFAULT_VIEWPORT = (-3.0, 3.0, -3.0, 3.0)

# =============================================================================
# Command Line
# =============================================================================

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

VERDICT_PASS = "pass"
VERDICT_FAIL = "fail"
