"""Per-cell structure of the free space and its boundary graph.

A cell of the free space diagram is the product of a piece ``P`` of the
first curve and a piece ``Q`` of the second, parametrized over the unit square
in local coordinates.  Inside it the boundary of the free space is the level
set ``f(x, y) = |P(x) - Q(y)|^2 = delta^2``.

Marking a cell finds the points of the level set with a horizontal tangent
(``Eh``, extrema in y) and a vertical tangent (``Ev``, extrema in x).  Each
``Eh`` point gets a vertical cut and each ``Ev`` point a horizontal cut, so
the cuts cross the level set transversally and split the cell into a grid
of subcells in which every arc of the boundary is monotone in both
coordinates.  The intersections of the level set with walls and cuts are the
vertices of the boundary graph.

Inside a subcell the pairing of vertices by arcs follows from the slope bits
on the bottom and left edges alone.  Slopes on the bottom and left cell walls
come from test-point probes; after a subcell is matched the slopes of its top
and right points follow from their partners, with a flip at extrema.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from . import _bernstein as kern
from .curves import PiecewiseCurve, elevate
from .errors import (
    AmbiguousProbe,
    ClusterUnresolved,
    CriticalDelta,
    CurveValidationError,
    InconsistentConfiguration,
    ParameterOutOfRange,
)
from .polysolve import CLUSTER_WIDTH, ISOLATION_TOL, MAX_BOXES, distance_tensors

__all__ = [
    "INCREASING",
    "DECREASING",
    "UNKNOWN",
    "PointKind",
    "Cell",
    "MarkedPoint",
    "Subcell",
    "SubcellMatching",
    "GraphEdge",
    "BoundaryGraph",
    "PairContext",
    "mark_cell",
    "slope_info",
    "match_subcell",
    "build_graph",
    "graph_to_dict",
    "debug_dump",
]

INCREASING = "increasing"
DECREASING = "decreasing"
UNKNOWN = "unknown"

NODE_TOL = 1e-10      # closer than this to a cut or wall counts as lying on it
CORNER_RTOL = 1e-13   # relative gap below which a cell corner is on the level set
PROBE_SKIP = 1e-8     # roots closer than this to a probe origin are the origin
EXTREMUM_MATCH = 1e-6
INTERVAL_TOL = 1e-12
CURVE_WIDTH = 1.0 / 64


class PointKind(str, Enum):
    """Kinds of marked points."""

    EH_PLUS = "Eh+"
    EH_MINUS = "Eh-"
    EV_PLUS = "Ev+"
    EV_MINUS = "Ev-"
    WALL = "WallIntersection"
    CUT = "CutIntersection"
    CORNER = "Corner"

    @property
    def is_extremum(self) -> bool:
        return self.value.startswith("E")


@dataclass(frozen=True)
class Cell:
    """Cell ``(i, j)`` of an ``m x n`` free space diagram."""

    i: int
    j: int
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if not (0 <= self.i < self.m and 0 <= self.j < self.n):
            raise ParameterOutOfRange(f"cell ({self.i}, {self.j}) outside {self.m} x {self.n}")

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """``([i/m, (i+1)/m], [j/n, (j+1)/n])`` in global parameters."""
        return ((self.i / self.m, (self.i + 1) / self.m),
                (self.j / self.n, (self.j + 1) / self.n))

    def to_global(self, x: float, y: float) -> tuple[float, float]:
        return (self.i + x) / self.m, (self.j + y) / self.n


@dataclass
class MarkedPoint:
    """A vertex of the boundary graph, in cell-local coordinates.

    ``slope`` is the direction of the boundary arc in the subcell above (for
    points on horizontal lines) or to the right (vertical lines), falling
    back to the subcell below or to the left on the top and right walls.
    """

    position: tuple[float, float]
    kind: PointKind
    slope: str = UNKNOWN
    id: int = -1
    key: tuple = ()


@dataclass
class Subcell:
    """Rectangle ``[x0, x1] x [y0, y1]`` of a cell with its marked points.

    Each edge list holds point ids ordered by increasing coordinate.  Corner
    points appear on the edge that counts them: bottom-left and top-left
    corners on ``e_l``, the bottom-right corner on ``e_b`` and the top-right
    corner on ``e_t``.
    """

    bounds: tuple[float, float, float, float]
    e_b: list[int] = field(default_factory=list)
    e_r: list[int] = field(default_factory=list)
    e_t: list[int] = field(default_factory=list)
    e_l: list[int] = field(default_factory=list)
    index: tuple[int, int] = (0, 0)


@dataclass
class SubcellMatching:
    """Pairs of point ids joined by monotone arcs, plus derived slopes."""

    pairs: list[tuple[int, int]]
    slopes: dict[int, str]
    trace: list[str]


@dataclass(frozen=True)
class GraphEdge:
    u: int
    v: int
    subcell: tuple[int, int, int, int]
    direction: str


@dataclass
class BoundaryGraph:
    """Vertices (marked points in global coordinates) and monotone arcs."""

    vertices: list[MarkedPoint]
    edges: list[GraphEdge]
    delta: float
    perturbations: list[float] = field(default_factory=list)

    def degree(self) -> dict[int, int]:
        deg = {v.id: 0 for v in self.vertices}
        for e in self.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        return deg


# ---------------------------------------------------------------------------
# precomputed pair data


def _is_linear(cp: np.ndarray) -> bool:
    k = len(cp) - 1
    if k == 1:
        return True
    line = elevate(cp[[0, -1]], k - 1)
    return bool(np.max(np.abs(line - cp)) <= 1e-14 * max(1.0, float(np.max(np.abs(cp)))))


class PairContext:
    """Normalized pieces and distance tensors for a pair of curves.

    Coordinates are shifted to the center of the joint bounding box and
    divided by its diagonal, so tolerances act on unit-scale data.  Joints
    are snapped to the average of the adjacent piece ends, which makes the
    walls shared by neighbouring cells bitwise identical.
    """

    def __init__(self, curve1: PiecewiseCurve, curve2: PiecewiseCurve):
        if curve1.dim != curve2.dim:
            raise CurveValidationError(
                f"curves live in different dimensions ({curve1.dim} vs {curve2.dim})")
        self.curve1 = curve1
        self.curve2 = curve2
        self.m = len(curve1)
        self.n = len(curve2)
        cps = np.concatenate([curve1.control_points(), curve2.control_points()])
        lo, hi = cps.min(axis=0), cps.max(axis=0)
        self.origin = 0.5 * (lo + hi)
        self.unit = max(float(np.linalg.norm(hi - lo)), 1e-300)
        self.P, self.J1, self.linear1 = self._pieces(curve1)
        self.Q, self.J2, self.linear2 = self._pieces(curve2)
        F, Fx, Fy = distance_tensors(self.P, self.Q)
        self.F = np.ascontiguousarray(F)
        self.Fx = np.ascontiguousarray(Fx)
        self.Fy = np.ascontiguousarray(Fy)
        self.Fmin = self.F.min(axis=(2, 3))
        self.Fmax = self.F.max(axis=(2, 3))
        diff = self.J1[:, None, :] - self.J2[None, :, :]
        self.V = np.einsum("ijk,ijk->ij", diff, diff)

    def _pieces(self, curve: PiecewiseCurve):
        deg = curve.max_degree
        pieces = []
        linear = []
        for p in curve:
            cp = (p.control_points - self.origin) / self.unit
            linear.append(_is_linear(cp))
            pieces.append(elevate(cp, deg - p.degree) if p.degree < deg else cp)
        P = np.array(pieces, dtype=float)
        J = np.empty((len(curve) + 1, curve.dim))
        J[0] = P[0, 0]
        J[-1] = P[-1, -1]
        J[1:-1] = 0.5 * (P[:-1, -1] + P[1:, 0])
        P[:, 0] = J[:-1]
        P[:, -1] = J[1:]
        return np.ascontiguousarray(P), J, np.array(linear)

    def local_delta_sq(self, delta: float) -> float:
        return (float(delta) / self.unit) ** 2


# ---------------------------------------------------------------------------
# lines: walls and cuts


@dataclass
class _Line:
    """Level-set crossings along one wall or cut, with interval statuses."""

    roots: np.ndarray
    free: list[bool]
    extremum: int = -1   # index of the root that is the cut's own extremum


@dataclass
class _CellMarks:
    i: int
    j: int
    xs: list[float]
    ys: list[float]
    hlines: list[_Line]
    vlines: list[_Line]
    eh: list[tuple[float, float]]
    ev: list[tuple[float, float]]
    corners: dict[str, bool]          # corner name -> lies on the level set
    h_sign: list[int]                  # +1 / -1 for Eh points by cut, 0 unset
    v_sign: list[int]


class _Run:
    """State of one analysis of a pair at a fixed distance value."""

    def __init__(self, ctx: PairContext, delta: float, strict: bool = True):
        if not delta > 0:
            raise ParameterOutOfRange("delta must be positive")
        self.ctx = ctx
        self.delta = float(delta)
        self.d2 = ctx.local_delta_sq(delta)
        self.strict = strict
        self.tiny = 1e-14 * max(self.d2, 1e-300)
        self.on_level = np.abs(ctx.V - self.d2) <= CORNER_RTOL * max(self.d2, 1e-300)
        self._walls: dict[tuple[bool, int, int], _Line] = {}

    def critical(self, message: str, kind=CriticalDelta):
        if self.strict:
            raise kind(message)

    # walls -------------------------------------------------------------

    def wall(self, horizontal: bool, i: int, j: int) -> _Line:
        """Bottom wall of cell (i, j) when horizontal, else its left wall."""
        key = (horizontal, i, j)
        line = self._walls.get(key)
        if line is None:
            line = self._walls[key] = self._make_wall(horizontal, i, j)
        return line

    def _make_wall(self, horizontal: bool, i: int, j: int) -> _Line:
        ctx = self.ctx
        if horizontal:
            cp, center = ctx.P[i], ctx.J2[j]
            c0, c1 = self.on_level[i, j], self.on_level[i + 1, j]
        else:
            cp, center = ctx.Q[j], ctx.J1[i]
            c0, c1 = self.on_level[i, j], self.on_level[i, j + 1]
        c = kern.sphere_coeffs(cp, center, self.d2)
        if np.max(np.abs(c)) <= self.tiny:
            raise CriticalDelta("a whole wall lies on the level set")
        roots, kinds, values = kern.line_profile(c, ISOLATION_TOL, CLUSTER_WIDTH)
        keep = np.ones(len(roots), dtype=bool)
        changed = False
        for q, (t, kind) in enumerate(zip(roots, kinds)):
            if (c0 and t <= PROBE_SKIP) or (c1 and t >= 1.0 - PROBE_SKIP):
                keep[q] = False
                changed = True
            elif kind == kern.KIND_EVEN_CLUSTER:
                self.critical("level set is tangent to a wall")
                keep[q] = False
                changed = True
            elif kind == kern.KIND_ODD_CLUSTER:
                self.critical("clustered wall crossings", ClusterUnresolved)
            elif t <= NODE_TOL or t >= 1.0 - NODE_TOL:
                self.critical("level set passes next to a cell corner")
        if changed:
            roots = np.ascontiguousarray(roots[keep])
            values = kern.interval_values(c, roots)
        return _Line(roots, self._statuses(values))

    def _statuses(self, values: np.ndarray) -> list[bool]:
        if np.any(np.abs(values) <= self.tiny):
            self.critical("interval status is ambiguous", AmbiguousProbe)
        free = (values <= 0.0).tolist()
        for a, b in zip(free, free[1:]):
            if a == b:
                self.critical("free and forbidden intervals do not alternate",
                              InconsistentConfiguration)
                break
        return free

    # extrema -----------------------------------------------------------

    def extrema(self, i: int, j: int, horizontal: bool) -> list[tuple[float, float]]:
        """Points with ``f_x = 0`` (horizontal) or ``f_y = 0`` on the level set."""
        ctx = self.ctx
        G = ctx.Fx[i, j] if horizontal else ctx.Fy[i, j]
        if G.min() > 0.0 or G.max() < 0.0:
            return []
        if ctx.linear1[i] and ctx.linear2[j]:
            P, Q = ctx.P[i], ctx.Q[j]
            pts, status = kern.segment_extrema(P[0], P[-1], Q[0], Q[-1], self.d2, horizontal)
            if status:
                raise ClusterUnresolved("degenerate extremum configuration")
        else:
            pts, clusters, curve = kern.level_system(
                ctx.F[i, j], G, self.d2, CLUSTER_WIDTH, CURVE_WIDTH, 1.0, MAX_BOXES)
            if len(clusters) or len(curve):
                raise ClusterUnresolved("extremum system has unresolved solutions")
        out: list[tuple[float, float]] = []
        for x, y in pts:
            x = float(x)
            y = float(y)
            if x < -NODE_TOL or x > 1.0 + NODE_TOL or y < -NODE_TOL or y > 1.0 + NODE_TOL:
                continue
            if min(x, y, 1.0 - x, 1.0 - y) <= NODE_TOL:
                self.critical("an extremum lies on a cell wall")
                continue
            if any(abs(x - a) <= 1e-9 and abs(y - b) <= 1e-9 for a, b in out):
                continue
            out.append((x, y))
        return sorted(out)

    # cells -------------------------------------------------------------

    def mark(self, i: int, j: int) -> _CellMarks:
        ctx = self.ctx
        F = ctx.F[i, j]
        eh = self.extrema(i, j, True)
        ev = self.extrema(i, j, False)
        xs = [0.0] + [p[0] for p in eh] + [1.0]
        ys = [0.0] + sorted(p[1] for p in ev) + [1.0]
        ev = sorted(ev, key=lambda p: p[1])
        for grid in (xs, ys):
            if any(b - a <= NODE_TOL for a, b in zip(grid, grid[1:])):
                self.critical("two cuts coincide")
        bottom = self.wall(True, i, j)
        top = self.wall(True, i, j + 1)
        left = self.wall(False, i, j)
        right = self.wall(False, i + 1, j)
        for line, grid in ((bottom, xs), (top, xs), (left, ys), (right, ys)):
            self._check_nodes(line.roots, grid[1:-1])

        hlines = [bottom]
        for (x, y) in ev:
            c = kern.line_at_y(F, y) - self.d2
            hlines.append(self._cut(c, x, xs))
        hlines.append(top)
        vlines = [left]
        for (x, y) in eh:
            c = kern.line_at_x(F, x) - self.d2
            vlines.append(self._cut(c, y, ys))
        vlines.append(right)
        corners = {
            "bl": bool(self.on_level[i, j]),
            "br": bool(self.on_level[i + 1, j]),
            "tl": bool(self.on_level[i, j + 1]),
            "tr": bool(self.on_level[i + 1, j + 1]),
        }
        marks = _CellMarks(i, j, xs, ys, hlines, vlines, eh, ev, corners,
                           [0] * len(vlines), [0] * len(hlines))
        self._check_crossings(marks)
        for c in range(1, len(vlines) - 1):
            line = vlines[c]
            above = line.free[line.extremum + 1]
            marks.h_sign[c] = -1 if not above else 1
        for r in range(1, len(hlines) - 1):
            line = hlines[r]
            right_free = line.free[line.extremum + 1]
            marks.v_sign[r] = -1 if not right_free else 1
        return marks

    def _check_nodes(self, roots: np.ndarray, nodes: Sequence[float]):
        for t in nodes:
            k = bisect.bisect_left(roots, t)
            near = [roots[q] for q in (k - 1, k) if 0 <= q < len(roots)]
            if any(abs(r - t) <= NODE_TOL for r in near):
                self.critical("level set passes through the end of a cut")

    def _cut(self, c: np.ndarray, own: float, grid: Sequence[float]) -> _Line:
        roots, kinds, values = kern.line_profile(c, ISOLATION_TOL, CLUSTER_WIDTH)
        keep = np.ones(len(roots), dtype=bool)
        for q, kind in enumerate(kinds):
            if kind == kern.KIND_EVEN_CLUSTER:
                # arc only touches the cut without entering the next subcell
                self.critical("level set is tangent to a cut")
                keep[q] = False
            elif kind == kern.KIND_ODD_CLUSTER:
                self.critical("clustered cut crossings", ClusterUnresolved)
        if not keep.all():
            roots = np.ascontiguousarray(roots[keep])
            values = kern.interval_values(c, roots)
        self._check_nodes(roots, grid)
        if len(roots) == 0:
            raise InconsistentConfiguration("cut misses its own extremum")
        k = int(np.argmin(np.abs(roots - own)))
        if abs(roots[k] - own) > EXTREMUM_MATCH:
            raise InconsistentConfiguration("cut misses its own extremum")
        return _Line(roots, self._statuses(values), extremum=k)

    def _check_crossings(self, marks: _CellMarks):
        # statuses where cuts meet walls and each other must agree
        def status(line: _Line, t: float) -> bool:
            return line.free[bisect.bisect_left(line.roots, t)]

        for c, x in enumerate(marks.xs):
            for r, y in enumerate(marks.ys):
                if c in (0, len(marks.xs) - 1) and r in (0, len(marks.ys) - 1):
                    continue
                if status(marks.vlines[c], y) != status(marks.hlines[r], x):
                    self.critical("cut and wall statuses disagree", InconsistentConfiguration)
                    return

    # slopes ------------------------------------------------------------

    def probe_bottom(self, i: int, j: int, line: _Line, k: int) -> bool:
        """Slope of the arc entering the cell from bottom-wall crossing ``k``."""
        ctx = self.ctx
        x = float(line.roots[k])
        c = kern.line_at_x(ctx.F[i, j], x) - self.d2
        value, _ = kern.probe_from_start(c, PROBE_SKIP)
        if abs(value) <= self.tiny:
            raise AmbiguousProbe("probe above a wall point lies on the level set")
        inc = (value <= 0.0) == line.free[k]
        self._check_gradient(i, j, x, 0.0, inc)
        return inc

    def probe_left(self, i: int, j: int, line: _Line, k: int) -> bool:
        """Slope of the arc entering the cell from left-wall crossing ``k``."""
        ctx = self.ctx
        y = float(line.roots[k])
        c = kern.line_at_y(ctx.F[i, j], y) - self.d2
        value, _ = kern.probe_from_start(c, PROBE_SKIP)
        if abs(value) <= self.tiny:
            raise AmbiguousProbe("probe right of a wall point lies on the level set")
        inc = (value <= 0.0) == line.free[k]
        self._check_gradient(i, j, 0.0, y, inc)
        return inc

    def _check_gradient(self, i: int, j: int, x: float, y: float, inc: bool):
        gx = kern.tensor_eval(self.ctx.Fx[i, j], x, y)
        gy = kern.tensor_eval(self.ctx.Fy[i, j], x, y)
        g = abs(gx) + abs(gy)
        if abs(gx) > 1e-7 * g and abs(gy) > 1e-7 * g and (gx * gy < 0.0) != inc:
            self.critical("slope disagrees with the gradient", InconsistentConfiguration)


# ---------------------------------------------------------------------------
# subcell matching


def _legal(side_a: str, ca: float, sa: bool | None, side_b: str, cb: float, sb: bool | None
           ) -> bool:
    if side_a == side_b:
        return False
    pair = {side_a, side_b}
    if side_a > side_b:
        side_a, ca, sa, side_b, cb, sb = side_b, cb, sb, side_a, ca, sa
    # sides sorted alphabetically: b < l < r < t
    if pair == {"b", "l"}:
        return sa is False and sb is False
    if pair == {"b", "t"}:
        return sa == (cb > ca)
    if pair == {"b", "r"}:
        return sa is True
    if pair == {"l", "t"}:
        return sa is True
    if pair == {"l", "r"}:
        return sa == (cb > ca)
    return True  # top to right is always a decreasing arc


def _ring_key(side: str, coord: float) -> tuple[int, float]:
    return {"b": (0, coord), "r": (1, coord), "t": (2, -coord), "l": (3, -coord)}[side]


def _match_lists(B, L, T, R, trace: list[str]) -> list[tuple[int, int]]:
    """Pair points by the case analysis on the unmatched corner-nearest points.

    ``B`` and ``L`` hold ``(pid, coord, increasing)`` sorted by coordinate;
    ``T`` and ``R`` hold ``(pid, coord, None)``.
    """
    B, L, T, R = list(B), list(L), list(T), list(R)
    pairs: list[tuple[int, int]] = []

    def need(cond: bool):
        if not cond:
            raise InconsistentConfiguration("marked points cannot be paired")

    while B or L:
        kb, kl, kt, kr = len(B), len(L), len(T), len(R)
        if B and L:
            zlb, zrb, zbl, ztl = B[0], B[-1], L[0], L[-1]
            if kb >= 2 and zlb[2] and not zrb[2]:
                need(kt >= 1)
                trace.append("case-1-bottom")
                pairs.append((ztl[0], T.pop(0)[0]))
                L.pop()
            elif kl >= 2 and zbl[2] and not ztl[2]:
                need(kr >= 1)
                trace.append("case-1-left")
                pairs.append((zrb[0], R.pop(0)[0]))
                B.pop()
            elif not zlb[2] and not zbl[2]:
                trace.append("case-2")
                pairs.append((zlb[0], zbl[0]))
                B.pop(0)
                L.pop(0)
            elif not zlb[2]:
                need(kt >= kl + 1)
                trace.append("bottom-decreasing")
                for q in range(kl):
                    pairs.append((L[kl - 1 - q][0], T[q][0]))
                pairs.append((zlb[0], T[kl][0]))
                del T[:kl + 1]
                L.clear()
                B.pop(0)
            elif not zbl[2]:
                need(kr >= kb + 1)
                trace.append("left-decreasing")
                for q in range(kb):
                    pairs.append((B[kb - 1 - q][0], R[q][0]))
                pairs.append((zbl[0], R[kb][0]))
                del R[:kb + 1]
                B.clear()
                L.pop(0)
            elif kl + kb + kt == kr:
                trace.append("last-case-count")
                for q in range(kt):
                    pairs.append((T[kt - 1 - q][0], R[kr - 1 - q][0]))
                pairs.append((ztl[0], R[kr - 1 - kt][0]))
                del R[kr - 1 - kt:]
                T.clear()
                L.pop()
            else:
                need(kt >= 1)
                trace.append("last-case-top")
                pairs.append((ztl[0], T.pop(0)[0]))
                L.pop()
        elif L:
            ztl = L[-1]
            if not ztl[2] or kl + kt == kr:
                need(kr >= kt + 1)
                trace.append("left-only-right")
                for q in range(kt):
                    pairs.append((T[kt - 1 - q][0], R[kr - 1 - q][0]))
                pairs.append((ztl[0], R[kr - 1 - kt][0]))
                del R[kr - 1 - kt:]
                T.clear()
            else:
                need(kt >= 1)
                trace.append("left-only-top")
                pairs.append((ztl[0], T.pop(0)[0]))
            L.pop()
        else:
            zrb = B[-1]
            if not zrb[2] or kb + kr == kt:
                need(kt >= kr + 1)
                trace.append("bottom-only-top")
                for q in range(kr):
                    pairs.append((R[kr - 1 - q][0], T[kt - 1 - q][0]))
                pairs.append((zrb[0], T[kt - 1 - kr][0]))
                del T[kt - 1 - kr:]
                R.clear()
            else:
                need(kr >= 1)
                trace.append("bottom-only-right")
                pairs.append((zrb[0], R.pop(0)[0]))
            B.pop()
    need(len(T) == len(R))
    if T:
        trace.append("top-right")
    for a, b in zip(reversed(T), reversed(R)):
        pairs.append((a[0], b[0]))
    return pairs


def _validate(pairs, where: dict[int, tuple[str, float, bool | None]]):
    seen = set()
    for a, b in pairs:
        if a in seen or b in seen:
            raise InconsistentConfiguration("a point is matched twice")
        seen.update((a, b))
        sa, ca, la = where[a]
        sb, cb, lb = where[b]
        if not _legal(sa, ca, la, sb, cb, lb):
            raise InconsistentConfiguration("an arc violates the slope rules")
    if len(seen) != len(where):
        raise InconsistentConfiguration("unmatched points remain")
    ring = {pid: _ring_key(s, c) for pid, (s, c, _) in where.items()}
    order = {pid: k for k, pid in enumerate(sorted(ring, key=ring.get))}
    chords = sorted(tuple(sorted((order[a], order[b]))) for a, b in pairs)
    for x in range(len(chords)):
        a, b = chords[x]
        for y in range(x + 1, len(chords)):
            c, d = chords[y]
            if c > b:
                break
            if a < c < b < d:
                raise InconsistentConfiguration("two arcs cross")


def _arc_slopes(pairs, where) -> dict[int, bool]:
    out: dict[int, bool] = {}
    for a, b in pairs:
        sa, _, la = where[a]
        sb, _, lb = where[b]
        if la is not None:
            s = la
        elif lb is not None:
            s = lb
        else:
            s = False  # top to right
        out[a] = out[b] = s
    return out


def _solve_subcell(B, L, T, R, tr_corner: tuple[int, float] | None, tr_enters: bool | None,
                   trace: list[str]):
    """Match one subcell, deciding a top-right corner point by the count rule.

    ``B`` and ``L`` may already contain corner points.  Returns the pairs
    and the map ``pid -> (side, coord, slope)`` used for validation.
    """

    def attempt(Tlist):
        where = {}
        for pid, c, s in B:
            where[pid] = ("b", c, s)
        for pid, c, s in L:
            where[pid] = ("l", c, s)
        for pid, c, _ in Tlist:
            where[pid] = ("t", c, None)
        for pid, c, _ in R:
            where[pid] = ("r", c, None)
        local: list[str] = []
        pairs = _match_lists(B, L, Tlist, R, local)
        _validate(pairs, where)
        return pairs, where, local

    if tr_corner is None:
        pairs, where, local = attempt(T)
        trace.extend(local)
        return pairs, where
    pid, coord = tr_corner
    withc = list(T) + [(pid, coord, None)]
    chosen = None
    try:
        pairs, where, local = attempt(withc)
        bl = sum(1 for a, b in pairs if {where[a][0], where[b][0]} == {"b", "l"})
        # count rule: k_l + k_b - 2 n_bl = k_t + k_r with the corner in k_t
        if len(L) + len(B) - 2 * bl == len(withc) + len(R):
            chosen = (pairs, where, local + ["corner-count-included"], True)
    except InconsistentConfiguration:
        pass
    if chosen is None:
        pairs, where, local = attempt(T)
        chosen = (pairs, where, local + ["corner-count-excluded"], False)
    if tr_enters is not None and chosen[3] != tr_enters:
        raise InconsistentConfiguration("count rule and probes disagree at a corner")
    trace.extend(chosen[2])
    return chosen[0], chosen[1]


# ---------------------------------------------------------------------------
# cell sweep


@dataclass
class _SubcellRecord:
    index: tuple[int, int]
    bounds: tuple[float, float, float, float]
    sides: dict[str, list[int]]
    pairs: list[tuple[int, int]]
    slopes: dict[int, bool]
    trace: list[str]


class _CellSweep:
    """Marks, slopes and matchings of one straddling cell."""

    def __init__(self, run: _Run, i: int, j: int, record: bool = False):
        self.run = run
        self.i = i
        self.j = j
        self.marks = marks = run.mark(i, j)
        self.record = record
        self.records: list[_SubcellRecord] = []
        # point registry: pid -> (x, y, kind, key)
        self.points: list[tuple[float, float, PointKind, tuple]] = []
        self.h_pids: list[list[int]] = []
        self.v_pids: list[list[int]] = []
        R = len(marks.hlines) - 1
        C = len(marks.vlines) - 1
        for r, line in enumerate(marks.hlines):
            y = marks.ys[r]
            pids = []
            for k, x in enumerate(line.roots):
                if r == 0 or r == R:
                    kind, key = PointKind.WALL, ("h", i, j + (r == R), k)
                elif k == line.extremum:
                    kind = PointKind.EV_MINUS if marks.v_sign[r] < 0 else PointKind.EV_PLUS
                    key = ("cut", i, j, "h", r, k)
                else:
                    kind, key = PointKind.CUT, ("cut", i, j, "h", r, k)
                pids.append(self._add(float(x), y, kind, key))
            self.h_pids.append(pids)
        for c, line in enumerate(marks.vlines):
            x = marks.xs[c]
            pids = []
            for k, y in enumerate(line.roots):
                if c == 0 or c == C:
                    kind, key = PointKind.WALL, ("v", i + (c == C), j, k)
                elif k == line.extremum:
                    kind = PointKind.EH_MINUS if marks.h_sign[c] < 0 else PointKind.EH_PLUS
                    key = ("cut", i, j, "v", c, k)
                else:
                    kind, key = PointKind.CUT, ("cut", i, j, "v", c, k)
                pids.append(self._add(x, float(y), kind, key))
            self.v_pids.append(pids)
        self.corner_pid: dict[str, int] = {}
        offsets = {"bl": (0, 0), "br": (1, 0), "tl": (0, 1), "tr": (1, 1)}
        for name, on in marks.corners.items():
            if on:
                dx, dy = offsets[name]
                self.corner_pid[name] = self._add(float(dx), float(dy), PointKind.CORNER,
                                                  ("c", i + dx, j + dy))
        self.up: dict[int, bool] = {}
        self.down: dict[int, bool] = {}
        self.right: dict[int, bool] = {}
        self.left: dict[int, bool] = {}
        self.corner_slope: dict[str, bool] = {}
        self.n_subcells = R * C

    def _add(self, x, y, kind, key) -> int:
        self.points.append((x, y, kind, key))
        return len(self.points) - 1

    # slopes at the bottom-left walls and corners

    def _initial_slopes(self):
        run, m = self.run, self.marks
        bottom, left = m.hlines[0], m.vlines[0]
        for k, pid in enumerate(self.h_pids[0]):
            self.up[pid] = run.probe_bottom(self.i, self.j, bottom, k)
        for k, pid in enumerate(self.v_pids[0]):
            self.right[pid] = run.probe_left(self.i, self.j, left, k)
        top, right = m.hlines[-1], m.vlines[-1]
        # test points along the two walls meeting at each corner
        if "bl" in self.corner_pid:
            self.corner_slope["bl"] = bottom.free[0] != left.free[0]
        if "tl" in self.corner_pid:
            self.corner_slope["tl"] = top.free[0] == left.free[-1]
        if "br" in self.corner_pid:
            self.corner_slope["br"] = bottom.free[-1] == right.free[0]
        if "tr" in self.corner_pid:
            self.corner_slope["tr"] = top.free[-1] != right.free[-1]

    def _edge(self, pids: list[int], line: _Line, lo: float, hi: float, along_x: bool):
        """Points and segments of a line between grid nodes ``lo`` and ``hi``."""
        roots = line.roots
        a = bisect.bisect_right(roots, lo)
        b = bisect.bisect_left(roots, hi)
        pts = pids[a:b]
        bounds = [lo] + [float(t) for t in roots[a:b]] + [hi]
        segs = [(bounds[q], bounds[q + 1], line.free[a + q]) for q in range(b - a + 1)]
        return pts, segs

    def sweep(self, bottom_in: list[tuple[float, float]] | None = None,
              left_in: list[tuple[float, float]] | None = None):
        """Match every subcell and propagate reachable intervals.

        Returns the reachable intervals on the top and right cell walls, in
        local coordinates.
        """
        self._initial_slopes()
        m = self.marks
        xs, ys = m.xs, m.ys
        C = len(xs) - 1
        R = len(ys) - 1
        propagate = bottom_in is not None
        below: list[list[tuple[float, float]]] = [[] for _ in range(C)]
        if propagate:
            for a in range(C):
                below[a] = _clip(bottom_in, xs[a], xs[a + 1])
        top_out: list[tuple[float, float]] = []
        right_out: list[tuple[float, float]] = []
        for b in range(R):
            from_left = _clip(left_in, ys[b], ys[b + 1]) if propagate else []
            for a in range(C):
                ins = (below[a], from_left) if propagate else None
                t_out, r_out = self._subcell(a, b, C, R, ins)
                if propagate:
                    below[a] = t_out
                    from_left = r_out
                    if b == R - 1:
                        top_out.extend(t_out)
                    if a == C - 1:
                        right_out.extend(r_out)
        return _merge(top_out), _merge(right_out)

    def _subcell(self, a: int, b: int, C: int, R: int, ins):
        m = self.marks
        x0, x1, y0, y1 = m.xs[a], m.xs[a + 1], m.ys[b], m.ys[b + 1]
        Bp, Bseg = self._edge(self.h_pids[b], m.hlines[b], x0, x1, True)
        Tp, Tseg = self._edge(self.h_pids[b + 1], m.hlines[b + 1], x0, x1, True)
        Lp, Lseg = self._edge(self.v_pids[a], m.vlines[a], y0, y1, False)
        Rp, Rseg = self._edge(self.v_pids[a + 1], m.vlines[a + 1], y0, y1, False)
        pts = self.points
        B = [(p, pts[p][0], self.up[p]) for p in Bp]
        L = [(p, pts[p][1], self.right[p]) for p in Lp]
        T = [(p, pts[p][0], None) for p in Tp]
        Rl = [(p, pts[p][1], None) for p in Rp]

        # corners of the cell that lie on the level set
        at = {"bl": a == 0 and b == 0, "br": a == C - 1 and b == 0,
              "tl": a == 0 and b == R - 1, "tr": a == C - 1 and b == R - 1}
        included: dict[str, int] = {}
        if at["bl"] and "bl" in self.corner_pid and self.corner_slope["bl"]:
            included["bl"] = self.corner_pid["bl"]
            L.insert(0, (included["bl"], y0, True))
        if at["tl"] and "tl" in self.corner_pid and not self.corner_slope["tl"]:
            included["tl"] = self.corner_pid["tl"]
            L.append((included["tl"], y1, False))
        if at["br"] and "br" in self.corner_pid and not self.corner_slope["br"]:
            included["br"] = self.corner_pid["br"]
            B.append((included["br"], x1, False))
        tr = None
        tr_enters = None
        if at["tr"] and "tr" in self.corner_pid:
            tr = (self.corner_pid["tr"], x1)
            tr_enters = self.corner_slope["tr"]
        trace: list[str] = []
        pairs, where = _solve_subcell(B, L, T, Rl, tr, tr_enters, trace)
        if tr is not None and tr[0] in where:
            included["tr"] = tr[0]
        slopes = _arc_slopes(pairs, where)
        self._transfer(Tp, Rp, b, a, slopes)

        if self.record:
            sides = {"e_b": [p for p, _, _ in B], "e_l": [p for p, _, _ in L],
                     "e_t": [p for p, _, _ in T] + ([included["tr"]] if "tr" in included else []),
                     "e_r": [p for p, _, _ in Rl]}
            self.records.append(_SubcellRecord((a, b), (x0, x1, y0, y1), sides, pairs,
                                               slopes, trace))
        if ins is None:
            return [], []
        return _propagate(Bseg, Rseg, Tseg, Lseg, Bp, Rp, Tp, Lp, included, pairs,
                          ins[0], ins[1], self.run)

    def _transfer(self, Tp, Rp, b, a, slopes):
        m = self.marks
        run = self.run
        flip_h = 0 < b + 1 < len(m.hlines) - 1
        flip_v = 0 < a + 1 < len(m.vlines) - 1
        for p in Tp:
            s = slopes[p]
            self.down[p] = s
            kind = self.points[p][2]
            if kind.is_extremum and flip_h:
                self.up[p] = not s
            else:
                self.up[p] = s
                self._gradient(p, s)
        for p in Rp:
            s = slopes[p]
            self.left[p] = s
            kind = self.points[p][2]
            if kind.is_extremum and flip_v:
                self.right[p] = not s
            else:
                self.right[p] = s
                self._gradient(p, s)

    def _gradient(self, p: int, s: bool):
        x, y = self.points[p][0], self.points[p][1]
        self.run._check_gradient(self.i, self.j, x, y, s)

    # exported views

    def marked_points(self) -> list[MarkedPoint]:
        out = []
        for pid, (x, y, kind, key) in enumerate(self.points):
            if kind is PointKind.CORNER:
                name = {(0, 0): "bl", (1, 0): "br", (0, 1): "tl", (1, 1): "tr"}[(int(x), int(y))]
                s = self.corner_slope.get(name)
            else:
                s = self.up.get(pid, self.right.get(pid, self.down.get(pid, self.left.get(pid))))
            slope = UNKNOWN if s is None else (INCREASING if s else DECREASING)
            out.append(MarkedPoint((x, y), kind, slope, pid, key))
        return out


def _clip(intervals, lo: float, hi: float) -> list[tuple[float, float]]:
    out = []
    if not intervals:
        return out
    for a, b in intervals:
        a2, b2 = max(a, lo), min(b, hi)
        if a2 <= b2 + INTERVAL_TOL:
            out.append((a2, max(a2, b2)))
    return out


def _merge(intervals: list[tuple[float, float]]) -> list[tuple[float, float]]:
    out: list[list[float]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1] + INTERVAL_TOL:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _propagate(Bseg, Rseg, Tseg, Lseg, Bp, Rp, Tp, Lp, included, pairs,
               bottom_in, left_in, run: _Run):
    """Reachable spans on the top and right edges of a matched subcell.

    The edge segments between marked points are arranged counterclockwise;
    arcs glue the segments next to their endpoints into faces.  A face that
    is entered through the left edge reaches all of its top and right
    segments, one entered only through the bottom edge reaches its top
    segments from the leftmost entry on.  The symmetric rule holds for the
    right edge.
    """
    nb, nr, nt, nl = len(Bseg), len(Rseg), len(Tseg), len(Lseg)
    free = ([s[2] for s in Bseg] + [s[2] for s in Rseg]
            + [s[2] for s in reversed(Tseg)] + [s[2] for s in reversed(Lseg)])
    N = len(free)
    parent = list(range(N))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    def union(u, v):
        parent[find(u % N)] = find(v % N)

    slot: dict[int, int] = {}
    for q, p in enumerate(Bp):
        slot[p] = q
    for q, p in enumerate(Rp):
        slot[p] = nb + q
    for q, p in enumerate(reversed(Tp)):
        slot[p] = nb + nr + q
    for q, p in enumerate(reversed(Lp)):
        slot[p] = nb + nr + nt + q
    corner_slots = {"br": nb - 1, "tr": nb + nr - 1, "tl": nb + nr + nt - 1, "bl": N - 1}
    for name, s in corner_slots.items():
        if name in included:
            slot[included[name]] = s
        else:
            union(s, s + 1)
    for p, q in pairs:
        sp, sq = slot[p], slot[q]
        union(sp + 1, sq)
        union(sp, sq + 1)
    roots = [find(u) for u in range(N)]
    face_free: dict[int, bool] = {}
    for u in range(N):
        f = face_free.setdefault(roots[u], free[u])
        if f != free[u]:
            run.critical("a face mixes free and forbidden segments", InconsistentConfiguration)

    info: dict[int, list] = {}   # face -> [entered from left, leftmost bottom entry, lowest left entry]

    def enter(segs, offset, reverse, intervals, side):
        n = len(segs)
        for lo, hi in intervals:
            for q, (a, b, fr) in enumerate(segs):
                # an entry feeds every free segment it overlaps; ties are reachable
                if fr is False or lo > b + INTERVAL_TOL or hi < a - INTERVAL_TOL:
                    continue
                u = offset + (n - 1 - q if reverse else q)
                face = info.setdefault(roots[u], [False, np.inf, np.inf])
                start = max(lo, a)
                if side == "l":
                    face[0] = True
                    face[2] = min(face[2], start)
                else:
                    face[1] = min(face[1], start)

    enter(Bseg, 0, False, bottom_in, "b")
    enter(Lseg, nb + nr + nt, True, left_in, "l")
    top_out: list[tuple[float, float]] = []
    right_out: list[tuple[float, float]] = []
    if not info:
        return top_out, right_out
    for q, (a, b, fr) in enumerate(Tseg):
        face = info.get(roots[nb + nr + (nt - 1 - q)])
        if fr is False or face is None:
            continue
        if face[0]:
            top_out.append((a, b))
        else:
            a2 = max(a, face[1])
            if a2 <= b + INTERVAL_TOL:
                top_out.append((a2, max(a2, b)))
    for q, (a, b, fr) in enumerate(Rseg):
        face = info.get(roots[nb + q])
        if fr is False or face is None:
            continue
        if face[1] < np.inf:
            right_out.append((a, b))
        else:
            a2 = max(a, face[2])
            if a2 <= b + INTERVAL_TOL:
                right_out.append((a2, max(a2, b)))
    return top_out, right_out


# ---------------------------------------------------------------------------
# public operations


def _context(curve1, curve2, context: PairContext | None) -> PairContext:
    if context is not None:
        return context
    return PairContext(curve1, curve2)


def _subcells(sweep: _CellSweep) -> list[Subcell]:
    out = []
    for rec in sweep.records:
        out.append(Subcell(rec.bounds, list(rec.sides["e_b"]), list(rec.sides["e_r"]),
                           list(rec.sides["e_t"]), list(rec.sides["e_l"]), rec.index))
    return out


def _analyze(curve1, curve2, cell: Cell, delta: float, context=None, strict=True):
    ctx = _context(curve1, curve2, context)
    if cell.m != ctx.m or cell.n != ctx.n:
        cell = Cell(cell.i, cell.j, ctx.m, ctx.n)
    run = _Run(ctx, delta, strict)
    sweep = _CellSweep(run, cell.i, cell.j, record=True)
    sweep.sweep()
    return sweep


def mark_cell(curve1: PiecewiseCurve, curve2: PiecewiseCurve, cell: Cell, delta: float,
              context: PairContext | None = None
              ) -> tuple[list[MarkedPoint], list[Subcell]]:
    """Marked points and subcell tiling of one cell.

    Parameters
    ----------
    curve1, curve2 : PiecewiseCurve
    cell : Cell
        Piece indices; ``m`` and ``n`` are taken from the curves.
    delta : float
        Distance value, positive.

    Returns
    -------
    points : list of MarkedPoint
        Extrema, wall and cut crossings and corner points, with slopes.
    subcells : list of Subcell
        Row-major tiling of the cell.

    Raises
    ------
    CriticalDelta
        If the level set is degenerate for this cell at ``delta``.
    """
    sweep = _analyze(curve1, curve2, cell, delta, context)
    return sweep.marked_points(), _subcells(sweep)


def slope_info(curve1: PiecewiseCurve, curve2: PiecewiseCurve, point: MarkedPoint, cell: Cell,
               delta: float, context: PairContext | None = None) -> tuple[str, str | None]:
    """Slope of the boundary at a wall point or extremum, by test points.

    Returns ``(slope, sign)`` where ``sign`` is ``"+"`` or ``"-"`` for
    extrema and None otherwise.  For an extremum the slope is the one in the
    subcell above (``Ev``) or to the right (``Eh``).

    Raises
    ------
    AmbiguousProbe
        If a test point lies on the level set.
    """
    sweep = _analyze(curve1, curve2, cell, delta, context)
    best = None
    for mp in sweep.marked_points():
        if mp.kind is point.kind or point.kind is None:
            dist = abs(mp.position[0] - point.position[0]) + abs(mp.position[1] - point.position[1])
            if best is None or dist < best[0]:
                best = (dist, mp)
    if best is None or best[0] > 1e-6:
        raise ParameterOutOfRange("no marked point of that kind at the given position")
    mp = best[1]
    sign = mp.kind.value[-1] if mp.kind.is_extremum else None
    return mp.slope, sign


def match_subcell(subcell: Subcell, points: dict[int, MarkedPoint] | Sequence[MarkedPoint],
                  trace: list[str] | None = None) -> SubcellMatching:
    """Pair the marked points of a subcell by monotone arcs.

    Bottom and left points need a known slope.  Corner points are placed as
    in ``Subcell``; a point on ``e_t`` at the right end of the subcell is
    treated as the top-right corner and kept only if the count rule
    ``k_l + k_b - 2 n_bl = k_t + k_r`` accepts it.

    Raises
    ------
    InconsistentConfiguration
        If no non-crossing monotone pairing is compatible with the slopes.
    """
    if not isinstance(points, dict):
        points = {p.id: p for p in points}
    x0, x1, y0, y1 = subcell.bounds

    def slope(pid):
        s = points[pid].slope
        if s == UNKNOWN:
            raise InconsistentConfiguration(f"point {pid} has no slope")
        return s == INCREASING

    B = [(p, points[p].position[0], slope(p)) for p in subcell.e_b]
    L = [(p, points[p].position[1], slope(p)) for p in subcell.e_l]
    T = [(p, points[p].position[0], None) for p in subcell.e_t]
    R = [(p, points[p].position[1], None) for p in subcell.e_r]
    tr = None
    if T and points[T[-1][0]].kind is PointKind.CORNER and abs(T[-1][1] - x1) <= NODE_TOL:
        tr = (T[-1][0], T[-1][1])
        T = T[:-1]
    log: list[str] = [] if trace is None else trace
    pairs, where = _solve_subcell(B, L, T, R, tr, None, log)
    slopes = {p: INCREASING if s else DECREASING for p, s in _arc_slopes(pairs, where).items()}
    return SubcellMatching(pairs, slopes, list(log))


def _graph_from_sweeps(ctx: PairContext, sweeps: Iterable[_CellSweep], delta: float,
                       perturbations: list[float]) -> BoundaryGraph:
    ids: dict[tuple, int] = {}
    vertices: list[MarkedPoint] = []
    edges: list[GraphEdge] = []

    def vid(sweep: _CellSweep, pid: int) -> int:
        x, y, kind, key = sweep.points[pid]
        if key not in ids:
            ids[key] = len(vertices)
            gx, gy = (sweep.i + x) / ctx.m, (sweep.j + y) / ctx.n
            vertices.append(MarkedPoint((gx, gy), kind, UNKNOWN, ids[key], key))
        return ids[key]

    for sweep in sweeps:
        local = sweep.marked_points()
        for pid in range(len(sweep.points)):
            v = vid(sweep, pid)
            if vertices[v].slope == UNKNOWN:
                vertices[v].slope = local[pid].slope
        for rec in sweep.records:
            for p, q in rec.pairs:
                direction = INCREASING if rec.slopes[p] else DECREASING
                edges.append(GraphEdge(vid(sweep, p), vid(sweep, q),
                                       (sweep.i, sweep.j) + rec.index, direction))
    return BoundaryGraph(vertices, edges, delta, perturbations)


def _perturbed(delta: float) -> list[float]:
    eta = 1e-9
    return [delta, delta * (1 + eta), delta * (1 - eta), delta * (1 + 2 * eta)]


def build_graph(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
                context: PairContext | None = None) -> BoundaryGraph:
    """Boundary graph of the free space over all cells.

    Cells are processed in lexicographic order and subcells row by row.  A
    critical ``delta`` is perturbed to ``delta (1 + eta)``, ``delta (1 - eta)``
    and ``delta (1 + 2 eta)`` with ``eta = 1e-9``; the values actually used
    are listed in ``perturbations``.

    Raises
    ------
    CriticalDelta
        If every perturbation is critical.
    """
    ctx = _context(curve1, curve2, context)
    last: CriticalDelta | None = None
    tried: list[float] = []
    for d in _perturbed(delta):
        try:
            run = _Run(ctx, d)
            sweeps = []
            for i in range(ctx.m):
                for j in range(ctx.n):
                    if ctx.Fmin[i, j] > run.d2 or ctx.Fmax[i, j] < run.d2:
                        continue
                    sw = _CellSweep(run, i, j, record=True)
                    sw.sweep()
                    sweeps.append(sw)
            return _graph_from_sweeps(ctx, sweeps, d, tried)
        except CriticalDelta as exc:
            last = exc
            tried.append(d)
    raise last


def graph_to_dict(graph: BoundaryGraph) -> dict:
    return {
        "delta": graph.delta,
        "perturbations": list(graph.perturbations),
        "vertices": [{"id": v.id, "position": list(v.position), "kind": v.kind.value,
                      "slope": v.slope} for v in graph.vertices],
        "edges": [{"u": e.u, "v": e.v, "subcell": list(e.subcell), "direction": e.direction}
                  for e in graph.edges],
    }


def debug_dump(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
               context: PairContext | None = None, path=None) -> dict:
    """Per-cell marked points, subcells and arcs as a JSON-ready dict.

    Cells whose distance bounds show them entirely free or forbidden are
    listed with their status only.  Written to ``path`` when given.
    """
    ctx = _context(curve1, curve2, context)
    run = _Run(ctx, delta)
    cells = []
    for i in range(ctx.m):
        for j in range(ctx.n):
            entry: dict = {"i": i, "j": j}
            if ctx.Fmin[i, j] > run.d2:
                entry["status"] = "forbidden"
            elif ctx.Fmax[i, j] < run.d2:
                entry["status"] = "free"
            else:
                sw = _CellSweep(run, i, j, record=True)
                sw.sweep()
                entry["status"] = "mixed"
                entry["points"] = [
                    {"id": p.id, "position": list(p.position), "kind": p.kind.value,
                     "slope": p.slope} for p in sw.marked_points()]
                entry["subcells"] = [
                    {"index": list(r.index), "bounds": list(r.bounds),
                     **{k: list(v) for k, v in r.sides.items()},
                     "pairs": [list(p) for p in r.pairs], "trace": r.trace}
                    for r in sw.records]
            cells.append(entry)
    out = {"delta": float(delta), "m": ctx.m, "n": ctx.n, "cells": cells}
    if path is not None:
        with open(path, "w") as fh:
            json.dump(out, fh, indent=1)
    return out
