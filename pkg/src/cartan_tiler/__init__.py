"""Symmetric tilings, Cartan coverings, antisymmetric cocycles and
slice-regular polynomial arithmetic on axially symmetric domains, all
computed on one slice trace with exact dyadic geometry."""

from .cohomology import (AntisymCochain, SymmetricCovering, check_higher_vanishing, coboundary,
                         solve_antisym_h2)
from .covering import CartanCovering, CoveringSpec, cartan_from_tiling, nerve, order_report, verify_cartan
from .errors import CartanTilerError, InfeasibleError, SchemaError
from .exhaustion import Exhaustion, build_exhaustion
from .geometry import Region
from .report import Report
from .slicereg import (AxSymCompact, QPolynomial, Quaternion, eval_formula_a, evaluate, exp_star,
                       imaginary_unit, log_star_one_minus, runge_truncate, star_product, sup_norm)
from .tiling import Tile, Tiling, tile_domain, verify_tiling

__version__ = "0.1.0"

__all__ = ["AntisymCochain", "AxSymCompact", "CartanCovering", "CartanTilerError", "CoveringSpec", "Exhaustion",
           "InfeasibleError", "QPolynomial", "Quaternion", "Region", "Report", "SchemaError",
           "SymmetricCovering", "Tile", "Tiling", "build_exhaustion", "cartan_from_tiling",
           "check_higher_vanishing", "coboundary", "eval_formula_a", "evaluate", "exp_star", "imaginary_unit",
           "log_star_one_minus", "nerve", "order_report", "runge_truncate", "solve_antisym_h2", "star_product",
           "sup_norm", "tile_domain", "verify_cartan", "verify_tiling"]
