"""Fréchet distance by candidate search and bisection.

The distance is one of finitely many critical values of the free space.
Those that can be enumerated cheaply (endpoint distances, singular values of
the distance function inside cells, stationary distances between a joint
and a piece, joint-to-joint distances) are searched with the decision
procedure.  The remaining events, where the order of extrema along a wall
changes, are located by bisection inside the bracket the search leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _bernstein as kern
from .curves import PiecewiseCurve
from .decision import _point_curve_distance, decide_detailed
from .errors import ParameterOutOfRange
from .freespace import PairContext
from .polysolve import CLUSTER_WIDTH, ISOLATION_TOL, singularities_raw

__all__ = [
    "ENDPOINT",
    "SINGULARITY",
    "WALL_TANGENCY",
    "CORNER",
    "CriticalCandidates",
    "FrechetResult",
    "critical_candidates",
    "compute",
    "compute_detailed",
]

ENDPOINT = "endpoint"
SINGULARITY = "singularity"
WALL_TANGENCY = "wall-tangency"
CORNER = "corner"

PROBE_ETA = 1e-9
MAX_BISECTIONS = 60
DEDUPE_RTOL = 1e-12
ZERO_FLOOR = 1e-7


@dataclass(frozen=True)
class CriticalCandidates:
    """Sorted candidate distances with the events that produced them.

    ``tags[k]`` is the set of event kinds that produced ``values[k]``;
    values closer than ``1e-12`` relative are merged.
    """

    values: tuple[float, ...]
    tags: tuple[frozenset, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def tagged(self, tag: str) -> list[float]:
        return [v for v, t in zip(self.values, self.tags) if tag in t]


@dataclass
class FrechetResult:
    """Distance estimate with the bracket that certifies it.

    ``lower`` and ``value`` satisfy ``decide(lower) = False`` and
    ``decide(value) = True`` unless the answer is exact (endpoint bound or
    a candidate hit), in which case ``lower == value`` up to the probe
    offset.
    """

    value: float
    lower: float
    source: str
    decisions: int = 0
    near_critical: bool = False
    perturbations: list[float] = field(default_factory=list)


def _stationary_sq(cp: np.ndarray, center: np.ndarray) -> list[float]:
    # squared distances from center at interior stationary points of the piece
    c = kern.sphere_coeffs(cp, center, 0.0)
    k = len(c) - 1
    dc = np.ascontiguousarray(k * np.diff(c))
    if np.max(np.abs(dc)) == 0.0:
        return []
    roots = kern.line_profile(dc, ISOLATION_TOL, CLUSTER_WIDTH)[0]
    return [kern.decasteljau1(c, t) for t in roots if 0.0 < t < 1.0]


def _raw_candidates(ctx: PairContext) -> list[tuple[float, str]]:
    out: list[tuple[float, str]] = []
    J1, J2 = ctx.J1, ctx.J2
    out.append((float(np.linalg.norm(J1[0] - J2[0])), ENDPOINT))
    out.append((float(np.linalg.norm(J1[-1] - J2[-1])), ENDPOINT))
    for v in np.sqrt(ctx.V.ravel()):
        out.append((float(v), CORNER))
    for i in range(ctx.m):
        for j in range(ctx.n + 1):
            out.extend((float(np.sqrt(max(v, 0.0))), WALL_TANGENCY)
                       for v in _stationary_sq(ctx.P[i], J2[j]))
    for j in range(ctx.n):
        for i in range(ctx.m + 1):
            out.extend((float(np.sqrt(max(v, 0.0))), WALL_TANGENCY)
                       for v in _stationary_sq(ctx.Q[j], J1[i]))
    for i in range(ctx.m):
        for j in range(ctx.n):
            if ctx.linear1[i] and ctx.linear2[j]:
                v = _segment_singular(ctx.P[i], ctx.Q[j])
                if v is not None:
                    out.append((v, SINGULARITY))
                continue
            F = ctx.F[i, j]
            sol = singularities_raw(F, ctx.Fx[i, j], ctx.Fy[i, j])
            for s in sol.points + sol.curves:
                if s.value is not None:
                    out.append((float(s.value), SINGULARITY))
            # unseparated boxes: the value at the box center stands for the cluster
            for x0, x1, y0, y1 in sol.clusters:
                v = kern.tensor_eval(F, 0.5 * (x0 + x1), 0.5 * (y0 + y1))
                out.append((float(np.sqrt(max(v, 0.0))), SINGULARITY))
    return out


def _segment_singular(P: np.ndarray, Q: np.ndarray) -> float | None:
    """Distance between two segments' supporting lines at an interior critical point."""
    a = P[0] - Q[0]
    b = P[-1] - P[0]
    c = Q[-1] - Q[0]
    bb, cc, bc = b @ b, c @ c, b @ c
    det = bb * cc - bc * bc
    if det <= 1e-14 * bb * cc:
        # parallel: the distance is constant along a line of critical points
        if bb == 0.0 or cc == 0.0:
            return None
        r = a - (a @ c) / cc * c
        return float(np.linalg.norm(r))
    x = (bc * (a @ c) - cc * (a @ b)) / det
    y = (bb * (a @ c) - bc * (a @ b)) / det
    if not (0.0 < x < 1.0 and 0.0 < y < 1.0):
        return None
    return float(np.linalg.norm(a + x * b - y * c))


def _dedupe(raw: list[tuple[float, str]], unit: float) -> CriticalCandidates:
    raw = sorted(raw)
    values: list[float] = []
    tags: list[set] = []
    for v, t in raw:
        if values and v - values[-1] <= DEDUPE_RTOL * max(abs(v), 1e-300):
            tags[-1].add(t)
        else:
            values.append(v)
            tags.append({t})
    return CriticalCandidates(tuple(v * unit for v in values),
                              tuple(frozenset(t) for t in tags))


def critical_candidates(curve1: PiecewiseCurve, curve2: PiecewiseCurve,
                        context: PairContext | None = None) -> CriticalCandidates:
    """Enumerate candidate critical distances for a pair of curves.

    Parameters
    ----------
    curve1, curve2 : PiecewiseCurve

    Returns
    -------
    CriticalCandidates
        Endpoint distances, singular values of the squared distance inside
        each cell, stationary distances from each joint to each piece of the
        other curve, and joint-to-joint distances.
    """
    ctx = context if context is not None else PairContext(curve1, curve2)
    return _dedupe(_raw_candidates(ctx), ctx.unit)


def compute_detailed(curve1: PiecewiseCurve, curve2: PiecewiseCurve, tol: float = 1e-9,
                     context: PairContext | None = None) -> FrechetResult:
    """Fréchet distance with its certifying bracket.

    Binary search over the candidates finds the first one whose slight
    enlargement ``c (1 + 1e-9)`` decides true.  If that candidate itself
    fails the shrunken probe ``c (1 - 1e-9)``, it is the answer; otherwise
    the distance lies strictly between it and its predecessor and is found
    by at most 60 bisection steps to relative width ``tol``.
    """
    if not tol >= 1e-12:
        raise ParameterOutOfRange("tol must be at least 1e-12")
    if curve1 == curve2:
        return FrechetResult(0.0, 0.0, "identical")
    ctx = context if context is not None else PairContext(curve1, curve2)
    pd = _point_curve_distance(ctx)
    if pd is not None:
        v = float(pd * ctx.unit)
        return FrechetResult(v, v, "point")
    unit = ctx.unit
    ends = max(np.linalg.norm(ctx.J1[0] - ctx.J2[0]), np.linalg.norm(ctx.J1[-1] - ctx.J2[-1]))
    cands = sorted({v for v, _ in _raw_candidates(ctx) if v >= ends * (1 - DEDUPE_RTOL)} | {ends})
    # the distance never exceeds the largest pointwise distance
    top = float(np.sqrt(ctx.Fmax.max()))
    # square roots of round-off in f (touching ends, shared pieces) land near 1e-8, not on events
    cands = [v for v in cands if ZERO_FLOOR < v <= top]
    cands.append(top * (1 + 1e-6))
    state = {"calls": 0, "near": False, "pert": []}

    def probe(v: float) -> bool:
        if v <= 0.0:
            return False
        state["calls"] += 1
        r = decide_detailed(curve1, curve2, v * unit, context=ctx, warn=False)
        state["near"] = state["near"] or r.near_critical
        state["pert"].extend(r.perturbations)
        return r.answer

    def result(value, lower, source):
        return FrechetResult(float(value * unit), float(lower * unit), source, state["calls"],
                             state["near"], state["pert"])

    lo, hi = 0, len(cands) - 1   # cands[hi] probes true
    if ends > 0.0 and probe(ends * (1 + PROBE_ETA)):
        return result(ends, ends, ENDPOINT)
    if ends == 0.0:
        lo = -1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if probe(cands[mid] * (1 + PROBE_ETA)):
            hi = mid
        else:
            lo = mid
    c = cands[hi]
    below = cands[lo] * (1 + PROBE_ETA) if lo >= 0 else 0.0
    if not probe(c * (1 - PROBE_ETA)):
        return result(c, c, "candidate")
    a, b = below, c * (1 - PROBE_ETA)
    for _ in range(MAX_BISECTIONS):
        if b - a <= tol * b:
            break
        mid = 0.5 * (a + b)
        if probe(mid):
            b = mid
        else:
            a = mid
    return result(b, a, "bisection")


def compute(curve1: PiecewiseCurve, curve2: PiecewiseCurve, tol: float = 1e-9,
            context: PairContext | None = None) -> float:
    """Fréchet distance between two piecewise polynomial curves.

    Parameters
    ----------
    curve1, curve2 : PiecewiseCurve
    tol : float
        Relative width of the final bracket, at least ``1e-12``.

    Returns
    -------
    float
        ``v`` with ``decide(v (1 + tol))`` true and ``decide(v (1 - tol))``
        false, up to near-critical perturbation.

    Examples
    --------
    >>> a = PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]])
    >>> b = PiecewiseCurve.polyline([[0.0, 1.0], [1.0, 1.0]])
    >>> round(compute(a, b), 9)
    1.0
    """
    return compute_detailed(curve1, curve2, tol, context).value
