"""Nonlinear least-squares fitting and the curve models used to reduce measurements."""

from .curves import (
    fit_double_exponential,
    fit_gaussian,
    fit_least_squares,
    fit_lorentzian,
    fit_odmr,
    fit_rabi,
    fit_saturation,
)
from .engine import FitResult, central_difference_jacobian, levenberg_marquardt
from .models import MODELS, CurveModel, get_model
from .rates import VariantComparison, compare_mixing_variants, fit_rates

__all__ = [
    "FitResult",
    "CurveModel",
    "MODELS",
    "get_model",
    "levenberg_marquardt",
    "central_difference_jacobian",
    "fit_least_squares",
    "fit_lorentzian",
    "fit_gaussian",
    "fit_odmr",
    "fit_rabi",
    "fit_double_exponential",
    "fit_saturation",
    "fit_rates",
    "compare_mixing_variants",
    "VariantComparison",
]
