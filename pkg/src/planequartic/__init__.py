"""Cartier-Manin matrices of smooth plane quartics, per prime and in bulk.

The user-facing surface: build a QuarticCurve from 15 integer
coefficients, then either cartier_manin_modp for one prime or
range_cartier_manin for every prime up to a bound.  Everything else
re-exported here exists so results can be cross-checked or the heavy
objects (the shift-operator family, the forest plan) reused across
calls.
"""

from .curve import (
    BadPrimeData,
    CurveModP,
    DegenerateCurveError,
    ModelSearchExhausted,
    QuarticCurve,
    discriminant_exact,
    load_curve,
    naive_count,
    parse_curve,
    reduce_curve,
)
from .engine import (
    AmbiguousTraceError,
    CartierManinResult,
    CurveContext,
    ap_from_trace,
    cartier_manin_modp,
    compute_Cp,
    lpoly_modp,
    uncompressed_result,
)
from .forest import (
    ForestPlan,
    RangeItem,
    SubtreeResult,
    default_kappa,
    forest_Cp,
    make_plan,
    range_cartier_manin,
    remainder_forest,
    remainder_tree,
)
from .oracle import (
    BudgetError,
    ZetaCounts,
    cartier_manin_bruteforce,
    count_points_ext,
    lpoly_from_counts,
)
from .transition import ShiftFamily, build_family

__version__ = "0.1.0"

__all__ = [
    "AmbiguousTraceError",
    "BadPrimeData",
    "BudgetError",
    "CartierManinResult",
    "CurveContext",
    "CurveModP",
    "DegenerateCurveError",
    "ForestPlan",
    "ModelSearchExhausted",
    "QuarticCurve",
    "RangeItem",
    "ShiftFamily",
    "SubtreeResult",
    "ZetaCounts",
    "ap_from_trace",
    "build_family",
    "cartier_manin_bruteforce",
    "cartier_manin_modp",
    "compute_Cp",
    "count_points_ext",
    "default_kappa",
    "discriminant_exact",
    "forest_Cp",
    "load_curve",
    "lpoly_from_counts",
    "lpoly_modp",
    "make_plan",
    "naive_count",
    "parse_curve",
    "range_cartier_manin",
    "reduce_curve",
    "remainder_forest",
    "remainder_tree",
    "uncompressed_result",
    "__version__",
]
