"""Numerical engine for Hermitian geometry with Bismut connections.

Two kinds of input are supported: left-invariant Hermitian structures given
by the constant coefficients of dφ_i in a unitary coframe, and Hermitian
metrics given by rational expressions in (z, z̄) evaluated at a point.
"""

from .config import default_tol
from .forms import Form, FrameVector, FormMatrix, wedge, bidegree_part, conjugate, evaluate
from .structure import LieHermitianStructure, validate_structure, unitary_change, exterior_derivative
from .connections import (
    ConnectionBundle,
    chern_data,
    connection_suite,
    gauduchon_theta,
    curvature,
    covariant_derivative_T,
)
from .tensors import Curvature4Tensor, DerivedTensors, TorsionDerivatives, derived_tensors
from .conditions import check_all, admissible_frame, special_frame, classify_threefold
from .expr import parse_expression
from .jets import jet_evaluate
from .coordinate import (
    CoordinateMetric,
    metric_jets,
    normalize_point,
    chern_torsion_at,
    chern_curvature_at,
    btp_residual_at,
    riemannian_at,
    point_report,
)
from . import catalog

__all__ = [
    "default_tol",
    "Form",
    "FrameVector",
    "FormMatrix",
    "wedge",
    "bidegree_part",
    "conjugate",
    "evaluate",
    "exterior_derivative",
    "LieHermitianStructure",
    "validate_structure",
    "unitary_change",
    "ConnectionBundle",
    "chern_data",
    "connection_suite",
    "gauduchon_theta",
    "curvature",
    "covariant_derivative_T",
    "Curvature4Tensor",
    "DerivedTensors",
    "TorsionDerivatives",
    "derived_tensors",
    "check_all",
    "admissible_frame",
    "special_frame",
    "classify_threefold",
    "parse_expression",
    "jet_evaluate",
    "CoordinateMetric",
    "metric_jets",
    "normalize_point",
    "chern_torsion_at",
    "chern_curvature_at",
    "btp_residual_at",
    "riemannian_at",
    "point_report",
    "catalog",
]
