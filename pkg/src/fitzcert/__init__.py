"""Representative functions and range certificates for maximal monotone operators on R."""

from .extreal import INF
from .sets import Interval, SetOnLine
from .plq import (PlqFunction, conjugate, convexity_check, subdifferential, inf_convolution,
                  minimize, fenchel_young_gap, pointwise_max, convex_hull)
from .operators import (MonotoneGraph, normal_cone, duality_map, from_subdifferential,
                        sum_range_oracle, maximality_check, antiderivative, parse_operator)
from .polyhedra import PolyhedralSet2D
from .grid import Axis, GridFn, llt_1d, llt_2d, discrete_infconv, attainment_probe
from .fitzpatrick import (PolyhedralFn, QuadraticFn, SeparableFn, fitzpatrick_fn,
                          fenchel_representative, psi_T, hat_transform, conjugate_bivariate,
                          representative_validity_check)
from .verify import (Config, range_membership, surjectivity_sweep, zero_in_range,
                     classical_conditions, total_duality_check, single_surjectivity,
                     normal_cone_driver, subdiff_driver, fuzz)

__version__ = "0.1.0"

__all__ = [
    "INF", "Interval", "SetOnLine",
    "PlqFunction", "conjugate", "convexity_check", "subdifferential", "inf_convolution",
    "minimize", "fenchel_young_gap", "pointwise_max", "convex_hull",
    "MonotoneGraph", "normal_cone", "duality_map", "from_subdifferential", "sum_range_oracle",
    "maximality_check", "antiderivative", "parse_operator",
    "PolyhedralSet2D",
    "Axis", "GridFn", "llt_1d", "llt_2d", "discrete_infconv", "attainment_probe",
    "PolyhedralFn", "QuadraticFn", "SeparableFn", "fitzpatrick_fn", "fenchel_representative",
    "psi_T", "hat_transform", "conjugate_bivariate", "representative_validity_check",
    "Config", "range_membership", "surjectivity_sweep", "zero_in_range", "classical_conditions",
    "total_duality_check", "single_surjectivity", "normal_cone_driver", "subdiff_driver", "fuzz",
]
