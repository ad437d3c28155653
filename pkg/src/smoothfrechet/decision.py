"""Decision procedure: is the Fréchet distance at most ``delta``?

Reachable intervals are pushed through the cells of the free space diagram
row by row.  Cells whose distance bounds show them entirely free or entirely
forbidden are handled directly; the others are split into subcells, matched,
and the intervals are carried across each subcell by the faces the matched
arcs cut out of it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _bernstein as kern
from .curves import PiecewiseCurve
from .errors import CriticalDelta, NearCriticalWarning, ParameterOutOfRange
from .freespace import (
    INTERVAL_TOL,
    PairContext,
    PointKind,
    Subcell,
    SubcellMatching,
    MarkedPoint,
    _CellSweep,
    _merge,
    _perturbed,
    _propagate,
    _Run,
)
from .polysolve import CLUSTER_WIDTH, ISOLATION_TOL

__all__ = [
    "ReachableInterval",
    "ReachableFrontier",
    "DecisionResult",
    "propagate_subcell",
    "decide",
    "decide_detailed",
]

LENIENT_STEPS = (0.0, 1e-7, -1e-7, 1e-6, -1e-6)


@dataclass(frozen=True)
class ReachableInterval:
    """Span ``[lo, hi]`` of an edge that a monotone path from the origin reaches.

    ``edge`` is ``(i, j, side)`` with side ``"top"`` or ``"right"``; the span
    is in the local coordinate of the cell edge.
    """

    edge: tuple[int, int, str]
    lo: float
    hi: float

    def __post_init__(self):
        if self.hi < self.lo - 1e-14:
            raise ParameterOutOfRange("empty reachable interval")


@dataclass
class ReachableFrontier:
    """Reachable intervals on the top wall of the current row of cells.

    ``top[i]`` holds the sorted, disjoint spans on the top wall of column
    ``i``; ``right`` holds those on the right wall of the last processed
    cell.  ``touched`` counts cells that received a non-empty input.
    """

    m: int
    top: list[list[tuple[float, float]]] = field(default_factory=list)
    right: list[tuple[float, float]] = field(default_factory=list)
    touched: int = 0

    def __post_init__(self):
        if not self.top:
            self.top = [[] for _ in range(self.m)]

    def intervals(self, j: int) -> list[ReachableInterval]:
        return [ReachableInterval((i, j, "top"), a, b)
                for i, spans in enumerate(self.top) for a, b in spans]


@dataclass
class DecisionResult:
    """Outcome of a decision query with its bookkeeping.

    Attributes
    ----------
    answer : bool
        Whether ``delta`` bounds the Fréchet distance from above.
    near_critical : bool
        Set when every perturbation hit a degenerate configuration and the
        answer came from a lenient run.
    perturbations : list of float
        Distance values that were rejected as critical, in order.
    delta_used : float
        The distance value the answer was computed at.
    cells_touched : int
        Cells that received a non-empty reachable input.
    subcells_processed : int
        Subcells matched and propagated.
    """

    answer: bool
    near_critical: bool = False
    perturbations: list[float] = field(default_factory=list)
    delta_used: float = 0.0
    cells_touched: int = 0
    subcells_processed: int = 0

    def __bool__(self) -> bool:
        return self.answer


def propagate_subcell(subcell: Subcell, points: dict[int, MarkedPoint] | list[MarkedPoint],
                      matching: SubcellMatching, bottom_in, left_in, free=None):
    """Reachable spans on the top and right edges of one subcell.

    Parameters
    ----------
    subcell : Subcell
    points : dict or list of MarkedPoint
        Marked points by id, in the coordinates of ``subcell.bounds``.
    matching : SubcellMatching
        Arcs of the subcell, as returned by ``match_subcell``.
    bottom_in, left_in : sequence of (float, float)
        Reachable spans on the bottom edge (x) and left edge (y).
    free : dict, optional
        Free/forbidden flags of the segments between marked points, keyed by
        ``"e_b"``, ``"e_r"``, ``"e_t"``, ``"e_l"``.  Without it, faces that
        receive an entry are taken to be free.

    Returns
    -------
    top, right : list of (float, float)
        Merged spans on the top edge (x) and the right edge (y).
    """
    if not isinstance(points, dict):
        points = {p.id: p for p in points}
    x0, x1, y0, y1 = subcell.bounds
    corners: dict[str, int] = {}

    def split(ids, axis, side):
        plain = []
        for p in ids:
            mp = points[p]
            if mp.kind is PointKind.CORNER:
                x, y = mp.position
                name = ("b" if abs(y - y0) <= 1e-12 else "t") + ("l" if abs(x - x0) <= 1e-12 else "r")
                corners[name] = p
            else:
                plain.append(p)
        return plain

    Bp = split(subcell.e_b, 0, "b")
    Rp = split(subcell.e_r, 1, "r")
    Tp = split(subcell.e_t, 0, "t")
    Lp = split(subcell.e_l, 1, "l")

    def segs(ids, axis, lo, hi, key):
        cut = [lo] + [points[p].position[axis] for p in ids] + [hi]
        flags = free.get(key) if free else None
        return [(cut[q], cut[q + 1], None if flags is None else bool(flags[q]))
                for q in range(len(cut) - 1)]

    Bseg = segs(Bp, 0, x0, x1, "e_b")
    Rseg = segs(Rp, 1, y0, y1, "e_r")
    Tseg = segs(Tp, 0, x0, x1, "e_t")
    Lseg = segs(Lp, 1, y0, y1, "e_l")
    run = _LenientStub()
    top, right = _propagate(Bseg, Rseg, Tseg, Lseg, Bp, Rp, Tp, Lp, corners, matching.pairs,
                            list(bottom_in), list(left_in), run)
    return _merge(top), _merge(right)


class _LenientStub:
    # face-status checks are skipped when statuses are unknown
    def critical(self, message, kind=CriticalDelta):
        pass


def _max_dist_sq_to_point(pieces: np.ndarray, p: np.ndarray) -> float:
    best = 0.0
    for cp in pieces:
        c = kern.sphere_coeffs(cp, p, 0.0)
        best = max(best, c[0], c[-1])
        k = len(c) - 1
        if k < 1:
            continue
        dc = k * np.diff(c)
        if np.max(np.abs(dc)) == 0.0:
            continue
        roots = kern.line_profile(np.ascontiguousarray(dc), ISOLATION_TOL, CLUSTER_WIDTH)[0]
        for t in roots:
            best = max(best, kern.decasteljau1(c, t))
    return float(best)


def _point_curve_distance(ctx: PairContext) -> float | None:
    """Exact distance when one curve is a point, in normalized units."""
    if ctx.curve1.is_point:
        return float(np.sqrt(_max_dist_sq_to_point(ctx.Q, ctx.P[0, 0])))
    if ctx.curve2.is_point:
        return float(np.sqrt(_max_dist_sq_to_point(ctx.P, ctx.Q[0, 0])))
    return None


def _full_cell(bottom_in, left_in):
    top = [(0.0, 1.0)] if left_in else [(min(a for a, _ in bottom_in), 1.0)]
    right = [(0.0, 1.0)] if bottom_in else [(min(a for a, _ in left_in), 1.0)]
    return top, right


def _sweep(run: _Run):
    """Row sweep over the cells; returns ``(answer, touched, subcells)``."""
    ctx = run.ctx
    m, n = ctx.m, ctx.n
    d2 = run.d2
    if (ctx.V[0, 0] > d2 and not run.on_level[0, 0]) or (
            ctx.V[m, n] > d2 and not run.on_level[m, n]):
        return False, 0, 0
    front = ReachableFrontier(m)
    subcells = 0
    Fmin, Fmax = ctx.Fmin, ctx.Fmax
    for j in range(n):
        left: list[tuple[float, float]] = [(0.0, 0.0)] if j == 0 else []
        alive = False
        for i in range(m):
            bottom = front.top[i] if j > 0 else ([(0.0, 0.0)] if i == 0 else [])
            if not bottom and not left:
                front.top[i] = []
                continue
            front.touched += 1
            if Fmin[i, j] > d2:
                top, right = [], []
            elif Fmax[i, j] < d2:
                top, right = _full_cell(bottom, left)
            else:
                sweep = _CellSweep(run, i, j)
                top, right = sweep.sweep(bottom, left)
                subcells += sweep.n_subcells
            front.top[i] = top
            left = right
            alive = alive or bool(top)
        if j == n - 1:
            answer = any(b >= 1.0 - INTERVAL_TOL for _, b in front.top[m - 1]) or any(
                b >= 1.0 - INTERVAL_TOL for _, b in left)
            return answer, front.touched, subcells
        if not alive:
            return False, front.touched, subcells
    return False, front.touched, subcells


def decide_detailed(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
                    context: PairContext | None = None, warn: bool = True) -> DecisionResult:
    """Decide ``d_F(curve1, curve2) <= delta`` and report how it was decided.

    Critical distance values are perturbed to ``delta (1 + eta)``,
    ``delta (1 - eta)`` and ``delta (1 + 2 eta)`` with ``eta = 1e-9``.  If all
    of them are critical, a lenient run that drops tangencies gives a best
    effort answer with ``near_critical`` set and a ``NearCriticalWarning``.

    Raises
    ------
    ParameterOutOfRange
        If ``delta`` is not positive.
    CriticalDelta
        If even the lenient runs fail.
    """
    delta = float(delta)
    if not delta > 0 or not np.isfinite(delta):
        raise ParameterOutOfRange("delta must be positive and finite")
    if curve1 == curve2:
        return DecisionResult(True, delta_used=delta)
    ctx = context if context is not None else PairContext(curve1, curve2)
    pd = _point_curve_distance(ctx)
    if pd is not None:
        return DecisionResult(pd * ctx.unit <= delta, delta_used=delta)
    tried: list[float] = []
    for d in _perturbed(delta):
        try:
            ans, touched, subs = _sweep(_Run(ctx, d))
            return DecisionResult(ans, False, tried, d, touched, subs)
        except CriticalDelta:
            tried.append(d)
    last: CriticalDelta | None = None
    for step in LENIENT_STEPS:
        d = delta * (1.0 + step)
        try:
            ans, touched, subs = _sweep(_Run(ctx, d, strict=False))
        except CriticalDelta as exc:
            last = exc
            continue
        if warn:
            warnings.warn(f"delta={delta!r} is near-critical; answer is best effort",
                          NearCriticalWarning, stacklevel=2)
        return DecisionResult(ans, True, tried, d, touched, subs)
    raise last


def decide(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
           context: PairContext | None = None) -> bool:
    """Whether the Fréchet distance between the curves is at most ``delta``.

    Examples
    --------
    >>> import numpy as np
    >>> a = PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]])
    >>> b = PiecewiseCurve.polyline([[0.0, 1.0], [1.0, 1.0]])
    >>> decide(a, b, 0.99), decide(a, b, 1.01)
    (False, True)
    """
    return decide_detailed(curve1, curve2, delta, context).answer
