"""Fréchet distance between piecewise polynomial curves.

The exact decision procedure works on the free space diagram of two curves
made of Bézier pieces; ``compute`` searches candidate distances with it, and
``approx_compute`` trades a factor ``1 + eps`` for speed on packed curves.

>>> from smoothfrechet import PiecewiseCurve, compute
>>> a = PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]])
>>> b = PiecewiseCurve.polyline([[0.0, 1.0], [1.0, 1.0]])
>>> round(compute(a, b), 9)
1.0
"""

from .approx import Above, ApproxOutcome, Below, ValueApprox, approx_compute, approx_decide
from .curves import (
    NormConfig,
    PiecewiseCurve,
    PolynomialPiece,
    curve_from_dict,
    curve_to_dict,
    evaluate,
    load_curve,
    save_curve,
)
from .decision import DecisionResult, decide, decide_detailed, propagate_subcell
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _errors_all
from .frechet import CriticalCandidates, FrechetResult, compute, compute_detailed, critical_candidates
from .freespace import (
    BoundaryGraph,
    Cell,
    MarkedPoint,
    PointKind,
    Subcell,
    build_graph,
    mark_cell,
    match_subcell,
    slope_info,
)
from .simplify import length_in_ball, packedness_estimate, simplify

__version__ = "0.1.0"

__all__ = [
    "Above", "ApproxOutcome", "Below", "ValueApprox", "approx_compute", "approx_decide",
    "NormConfig", "PiecewiseCurve", "PolynomialPiece", "curve_from_dict", "curve_to_dict",
    "evaluate", "load_curve", "save_curve",
    "DecisionResult", "decide", "decide_detailed", "propagate_subcell",
    "CriticalCandidates", "FrechetResult", "compute", "compute_detailed", "critical_candidates",
    "BoundaryGraph", "Cell", "MarkedPoint", "PointKind", "Subcell", "build_graph", "mark_cell",
    "match_subcell", "slope_info",
    "length_in_ball", "packedness_estimate", "simplify",
] + list(_errors_all)
