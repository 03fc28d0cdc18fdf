"""Exact chart-local exterior calculus for Mathai-Quillen Thom forms."""

from .coeff import DimensionMismatch, Jet, NotInvertible, Scalar
from .forms import (Chart, ChartForm, ChartMismatch, GaussianChartForm, WeightClash, WeightNotPreserved,
                    exterior_d, substitute_fiber_frame)
from .gaussian import (DegreeMismatch, WickInput, fiber_integrate, fiber_integrate_rotated, gaussian_integral_direct,
                       gaussian_moment, pullback_inclusion, wick)
from .matforms import (FormMatrix, JetMatrix, NotInvolution, NotOrthogonal, NotSkew, OrthoJetMatrix, block, cayley,
                       constrain, curvature_structure, maurer_cartan, restricted_connection)
from .mq import mq_form, pfaffian_factor_perm, pfaffian_factor_recursive, split_sign, thom_gaussian

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatch",
    "Jet",
    "NotInvertible",
    "Scalar",
    "Chart",
    "ChartForm",
    "ChartMismatch",
    "GaussianChartForm",
    "WeightClash",
    "WeightNotPreserved",
    "exterior_d",
    "substitute_fiber_frame",
    "DegreeMismatch",
    "WickInput",
    "fiber_integrate",
    "fiber_integrate_rotated",
    "gaussian_integral_direct",
    "gaussian_moment",
    "pullback_inclusion",
    "wick",
    "FormMatrix",
    "JetMatrix",
    "NotInvolution",
    "NotOrthogonal",
    "NotSkew",
    "OrthoJetMatrix",
    "block",
    "cayley",
    "constrain",
    "curvature_structure",
    "maurer_cartan",
    "restricted_connection",
    "mq_form",
    "pfaffian_factor_perm",
    "pfaffian_factor_recursive",
    "split_sign",
    "thom_gaussian",
]
