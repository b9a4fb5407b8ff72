"""Curvature operators of the first and second kind on algebraic curvature tensors."""

__version__ = "0.1.0"

from .conditions import ConditionExpr, FrameCertificate, certify_min, condition_value, k_positivity
from .curvature import (
    CurvatureTensor,
    bianchi_project,
    first_kind_spectrum,
    ricci,
    scalar,
    second_kind_spectrum,
    validate,
)
from .models import ModelSpec, cpn, cylinder, flat, product, random_curvature, sphere
from .spaces import Spectrum, eigen_sym

__all__ = [
    "__version__",
    "ConditionExpr",
    "CurvatureTensor",
    "FrameCertificate",
    "ModelSpec",
    "Spectrum",
    "bianchi_project",
    "certify_min",
    "condition_value",
    "cpn",
    "cylinder",
    "eigen_sym",
    "first_kind_spectrum",
    "flat",
    "k_positivity",
    "product",
    "random_curvature",
    "ricci",
    "scalar",
    "second_kind_spectrum",
    "sphere",
    "validate",
]
