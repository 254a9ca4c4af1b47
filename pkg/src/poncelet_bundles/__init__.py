"""poncelet-bundles - vector-bundle proof machinery for Poncelet's theorem."""

from poncelet_bundles._version import __version__
from poncelet_bundles.capabilities import BackendCapabilities
from poncelet_bundles.closure import (
    ClosureReport,
    IncidenceCertificate,
    PonceletFlag,
    darboux_complete,
    incidence_count_on_D,
    poncelet_step,
    poncelet_step_reverse,
    porism_family,
    porism_pencil,
    porism_sections,
    retrace,
    split_gamma,
    start_flag,
    trace_gon,
)
from poncelet_bundles.const import MIN_SCENE_FORMAT_VERSION, SCENE_FORMAT_VERSION
from poncelet_bundles.exceptions import (
    CertificateError,
    ConvergenceError,
    DegenerateConicError,
    DegenerateGonError,
    DegenerateStepError,
    DegenerateTransformError,
    DependentSectionsError,
    InconsistentResultError,
    InexactDivisionError,
    NonFiniteValueError,
    PonceletError,
    RationalPointNotFoundError,
    SceneError,
    SceneParseError,
    SceneVersionError,
    UnsupportedOperationError,
)
from poncelet_bundles.forms import (
    BinaryForm,
    P1Point,
    PlaneCurve,
    TernaryForm,
    compose_with_parametrization,
    from_roots,
    interpolate_curve,
    is_squarefree,
    parameter_set_distance,
    pseudo_remainder,
    quadric_of_point,
    rational_roots,
    roots,
)
from poncelet_bundles.models import (
    Certificate,
    Residual,
    Scene,
    dump_scene,
    load_scene,
    parse_scene,
)
from poncelet_bundles.numeric import (
    DEFAULT_TOLERANCE,
    Backend,
    Matrix,
    Tolerance,
    nullspace,
    rank,
)
from poncelet_bundles.projective import (
    CANONICAL_CONIC,
    Conic,
    ConicParam,
    ProjLine,
    ProjPoint,
    ProjTransform,
    apply_transform,
    canonical_frame,
    dual_conic,
    line_at_parameter,
    line_conic_intersection,
    parametrize_conic,
    tangency_parameter,
    tangent_line_at_parameter,
    tangents_through_point,
)
from poncelet_bundles.render import RenderResult, Viewport, render_svg
from poncelet_bundles.schwarzenberger import (
    BezoutReport,
    FiberValue,
    Gon,
    Pencil,
    SchwMatrix,
    bezout_exhaustion,
    build_matrix,
    determinant_curve,
    evaluate_section_fiber,
    pencil_curve,
    pencil_member_through,
    section_vanishes_at,
    vertex_curve_space,
    zero_locus,
)

__all__ = [
    "CANONICAL_CONIC",
    "DEFAULT_TOLERANCE",
    "MIN_SCENE_FORMAT_VERSION",
    "SCENE_FORMAT_VERSION",
    "Backend",
    "BackendCapabilities",
    "BezoutReport",
    "BinaryForm",
    "Certificate",
    "CertificateError",
    "ClosureReport",
    "Conic",
    "ConicParam",
    "ConvergenceError",
    "DegenerateConicError",
    "DegenerateGonError",
    "DegenerateStepError",
    "DegenerateTransformError",
    "DependentSectionsError",
    "FiberValue",
    "Gon",
    "IncidenceCertificate",
    "InconsistentResultError",
    "InexactDivisionError",
    "Matrix",
    "NonFiniteValueError",
    "P1Point",
    "Pencil",
    "PlaneCurve",
    "PonceletError",
    "PonceletFlag",
    "ProjLine",
    "ProjPoint",
    "ProjTransform",
    "RationalPointNotFoundError",
    "RenderResult",
    "Residual",
    "Scene",
    "SceneError",
    "SceneParseError",
    "SceneVersionError",
    "SchwMatrix",
    "TernaryForm",
    "Tolerance",
    "UnsupportedOperationError",
    "Viewport",
    "__version__",
    "apply_transform",
    "bezout_exhaustion",
    "build_matrix",
    "canonical_frame",
    "compose_with_parametrization",
    "darboux_complete",
    "determinant_curve",
    "dual_conic",
    "dump_scene",
    "evaluate_section_fiber",
    "from_roots",
    "incidence_count_on_D",
    "interpolate_curve",
    "is_squarefree",
    "line_at_parameter",
    "line_conic_intersection",
    "load_scene",
    "nullspace",
    "parameter_set_distance",
    "parametrize_conic",
    "parse_scene",
    "pencil_curve",
    "pencil_member_through",
    "poncelet_step",
    "poncelet_step_reverse",
    "porism_family",
    "porism_pencil",
    "porism_sections",
    "pseudo_remainder",
    "quadric_of_point",
    "rank",
    "rational_roots",
    "render_svg",
    "retrace",
    "roots",
    "section_vanishes_at",
    "split_gamma",
    "start_flag",
    "tangency_parameter",
    "tangent_line_at_parameter",
    "tangents_through_point",
    "trace_gon",
    "vertex_curve_space",
    "zero_locus",
]
