"""Executable boundedness of the Cauchy integral operator on analytic domains.

The Cauchy transform of a domain ``D = psi(unit disc)`` is conjugated to the
unit circle, its kernel is expanded in a double power series, and the operator
norm is bounded by the absolute sum of the coefficients.
"""
__version__ = "0.1.0"

from .boundary import (BoundaryFunction, FourierCoefficients, HardyFunction, analyze,
                       hardy_norm, l2_norm_circle, l2_norm_curve, monomial_multiply,
                       riesz_projection, synthesize)
from .cauchy import (cauchy_representation_check, cauchy_transform_domain,
                     direct_conjugated_operator, transplant_boundary, transplant_interior)
from .domain import (AnalyticDomain, boundary_nodes, estimate_R, invert_map, load_domain,
                     preset, validate_conformal)
from .errors import *  # noqa: F401,F403
from .kernel import (KernelExpansion, RadiiPair, coefficient_bound, kernel_coefficients,
                     kernel_eval, sup_norm_H, tail_sum_bound)
from .power_series import PowerSeries
from .series_operator import (SeriesOperator, apply_series_operator, equivalence_check,
                              operator_norm_lower_mc, operator_norm_upper,
                              partial_sum_convergence)
