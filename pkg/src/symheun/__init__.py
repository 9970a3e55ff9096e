"""General Heun functions through the symmetric four-point representation."""

from .core import (
    CanonicalParams,
    FuchsianParams,
    PointConfig,
    SymmetricHeunParams,
    accessory_Q,
    cross_ratio,
    elementary_symmetric,
    is_circular,
    phi_from_cross_ratio,
    sum_q_over_z,
)
from .errors import HeunError, NoConvergence, NotConverged, NumericalFailure
from .evaluate import CanonicalEvaluator, FrameEvaluator
from .kernels import BACKEND
from .mobius import (
    Dilate,
    GeneratorChain,
    Invert,
    MobiusMap,
    Translate,
    apply_chain,
    canonicalize,
    decompose_to_generators,
    invert_canonical,
    map_from_triples,
)
from .series import (
    erratum_report,
    eval_series,
    laurent_solution,
    laurent_to_tolerance,
    series_to_tolerance,
    taylor_coefficients,
    wronskian,
)
from .spectral import (
    Contour,
    Disk,
    EndpointData,
    Interval,
    find_eigenvalues,
    orthogonality_integral,
    overlap_ratio,
    real_line_frame,
    scan_defect,
    shoot_defect,
)
from .transform import StandardHeunParams, nu_transform, reduce_standard, relocate_infinity

__version__ = "0.1.0"
