"""Sphere charts, t = 0 differentials, period functionals and Laurent blocks."""

from .charts import (ChartError, ChartFamily, CompatibilityError, SphereChart, a_periods,
                     central_chart, central_charts, omega0, parity_map)
from .forms import PoleNotFoundError, RationalForm, residue
from .laurent import (ConstantSelectionError, LaurentBlock, NeckConstants, TOutOfRangeError,
                      b_period, laurent, neck_constants, neck_integrals, neck_limits_direct,
                      reconstruction_error, vertical_finite_part_limit, vertical_period,
                      vertical_t2_coefficient)
from .limits import (HorizontalLimit, LimitBalance, horizontal_limit, limit_balance,
                     solved_b_nodes)
from .quadrature import (QuadratureError, QuadResult, SingularityProximityError,
                         circle_integral, contour_integral, polyline_integral)
from .zeros import (ContourSelectionError, ZeroReport, division_moments,
                    infinity_coefficient_numeric, numerator_polynomial, zero_alignment)

__all__ = [
    "ChartError", "ChartFamily", "CompatibilityError", "ConstantSelectionError",
    "ContourSelectionError", "HorizontalLimit", "LaurentBlock", "LimitBalance",
    "NeckConstants", "PoleNotFoundError", "QuadResult", "QuadratureError", "RationalForm",
    "SingularityProximityError", "SphereChart", "TOutOfRangeError", "ZeroReport",
    "a_periods", "b_period", "central_chart", "central_charts", "circle_integral",
    "contour_integral", "division_moments", "horizontal_limit", "infinity_coefficient_numeric",
    "laurent", "limit_balance", "neck_constants", "neck_integrals", "neck_limits_direct",
    "numerator_polynomial", "omega0", "parity_map", "polyline_integral", "reconstruction_error",
    "residue", "solved_b_nodes", "vertical_finite_part_limit", "vertical_period",
    "vertical_t2_coefficient", "zero_alignment",
]
