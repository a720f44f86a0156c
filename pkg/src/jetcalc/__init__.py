"""Connections, torsion, curvature and their identities on the 1-jet space J1(T, M)."""

from .covderiv import covariant_derivative, covariant_derivative_values
from .dtensor import DTensor, Signature, SlotKind, liouville, normalization_tensor
from .expr import EvaluationError, Expr, ParseError, Point, PointBatch, evaluate, evaluate_batch, parse, to_text
from .frame import FrameGeometry
from .geometry import (
    GammaConnection,
    HNormalSpec,
    Metric,
    NonlinearConnection,
    SingularMetricError,
    berwald,
    build_hnormal,
    canonical_nonlinear,
    christoffel,
    metric_curvature,
    random_cartan_spec,
)
from .identities import (
    DVectorField,
    IdentityEntry,
    IdentityReport,
    NotCartanError,
    bianchi_suite,
    curvature_check,
    deflection_suite,
    ricci_suite,
    torsion_check,
)
from .tensors import curvature_set, deflection_closed, deflection_direct, torsion_set

__version__ = "0.1.0"
