"""Brute-force references and instance generators.

Everything here is deliberately naive: dense sampling, the quadratic
dynamic program for the discrete Fréchet distance, exhaustive coupling
enumeration, raster reachability, and marching-squares tracing of the level
set inside one cell.  Apart from point evaluation of the curves nothing is
shared with the exact pipeline, so these serve as ground truth in tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit
from skimage import measure

from .curves import PiecewiseCurve, PolynomialPiece, derivative
from .errors import ParameterOutOfRange, UnresolvedAtResolution

__all__ = [
    "Polyline",
    "sample",
    "discrete_frechet",
    "discrete_frechet_bruteforce",
    "free_grid",
    "monotone_reachable",
    "raster_decide",
    "MarchedGraph",
    "march_boundary",
    "random_bezier",
    "random_polygonal",
    "c_packed_curve",
    "spiral",
]


@dataclass(frozen=True)
class Polyline:
    """Ordered vertices in ``R^d``, at least two of them."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or len(pts) < 2:
            raise ParameterOutOfRange("a polyline needs at least two points")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).sum())

    def max_edge(self) -> float:
        return float(np.linalg.norm(np.diff(self.points, axis=0), axis=1).max())


def _speed_bound(piece: PolynomialPiece) -> float:
    # the hodograph's control polygon bounds the speed
    hodo = derivative(piece).control_points
    return float(np.linalg.norm(hodo, axis=1).max())


def sample(curve: PiecewiseCurve, h: float) -> Polyline:
    """Points of ``curve`` with every edge at most ``h``, joints included.

    Each piece is sampled uniformly in its parameter with enough steps that
    the speed bound times the step stays below ``h``.
    """
    if not h > 0:
        raise ParameterOutOfRange("h must be positive")
    chunks = [curve.pieces[0].start[None, :]]
    for piece in curve.pieces:
        k = max(1, int(np.ceil(_speed_bound(piece) / h)))
        ts = np.linspace(0.0, 1.0, k + 1)[1:]
        chunks.append(piece.sample(ts))
    return Polyline(np.concatenate(chunks))


@njit(cache=True)
def _dfd(P, Q):
    n, m = P.shape[0], Q.shape[0]
    prev = np.empty(m)
    cur = np.empty(m)
    for i in range(n):
        for j in range(m):
            s = 0.0
            for k in range(P.shape[1]):
                t = P[i, k] - Q[j, k]
                s += t * t
            d = np.sqrt(s)
            if i == 0 and j == 0:
                best = d
            elif i == 0:
                best = max(cur[j - 1], d)
            elif j == 0:
                best = max(prev[j], d)
            else:
                best = max(min(prev[j], cur[j - 1], prev[j - 1]), d)
            cur[j] = best
        prev, cur = cur, prev
    return prev[m - 1]


def _points(P) -> np.ndarray:
    if isinstance(P, Polyline):
        return P.points
    return Polyline(P).points


def discrete_frechet(P, Q) -> float:
    """Discrete Fréchet distance by the quadratic dynamic program.

    >>> discrete_frechet([[0, 0], [1, 0]], [[0, 1], [1, 1]])
    1.0
    """
    return float(_dfd(np.ascontiguousarray(_points(P)), np.ascontiguousarray(_points(Q))))


def discrete_frechet_bruteforce(P, Q) -> float:
    """Minimum over all monotone couplings, by exhaustive enumeration."""
    P, Q = _points(P), _points(Q)
    D = np.linalg.norm(P[:, None, :] - Q[None, :, :], axis=2)
    n, m = D.shape
    best = np.inf

    def walk(i, j, worst):
        nonlocal best
        worst = max(worst, D[i, j])
        if worst >= best:
            return
        if i == n - 1 and j == m - 1:
            best = worst
            return
        if i + 1 < n:
            walk(i + 1, j, worst)
        if j + 1 < m:
            walk(i, j + 1, worst)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, worst)

    walk(0, 0, 0.0)
    return float(best)


# ---------------------------------------------------------------------------
# raster free space


def _curve_samples(curve, ts: np.ndarray) -> np.ndarray:
    if isinstance(curve, PolynomialPiece):
        return curve.sample(ts)
    n = len(curve)
    out = np.empty((len(ts), curve.dim))
    idx = np.minimum((ts * n).astype(int), n - 1)
    for i in range(n):
        sel = idx == i
        if sel.any():
            out[sel] = curve.pieces[i].sample(np.clip(ts[sel] * n - i, 0.0, 1.0))
    return out


def free_grid(curve1, curve2, delta: float, resolution: int) -> np.ndarray:
    """Boolean ``(N+1, N+1)`` grid of ``|c1(x) - c2(y)| <= delta`` at ``x = i/N``."""
    ts = np.linspace(0.0, 1.0, resolution + 1)
    A = _curve_samples(curve1, ts)
    B = _curve_samples(curve2, ts)
    d2 = np.einsum("ik,ik->i", A, A)[:, None] + np.einsum("jk,jk->j", B, B)[None, :] \
        - 2.0 * A @ B.T
    return d2 <= delta * delta


@njit(cache=True)
def _reach(free):
    n, m = free.shape
    R = np.zeros((n, m), dtype=np.bool_)
    R[0, 0] = free[0, 0]
    for i in range(n):
        for j in range(m):
            if not free[i, j] or (i == 0 and j == 0):
                continue
            if (i > 0 and R[i - 1, j]) or (j > 0 and R[i, j - 1]) or (
                    i > 0 and j > 0 and R[i - 1, j - 1]):
                R[i, j] = True
    return R


def monotone_reachable(free: np.ndarray) -> np.ndarray:
    """Grid nodes reachable from ``(0, 0)`` by right, up and diagonal moves."""
    return _reach(np.ascontiguousarray(free, dtype=np.bool_))


def raster_decide(curve1, curve2, delta: float, resolution: int = 512) -> bool:
    return bool(monotone_reachable(free_grid(curve1, curve2, delta, resolution))[-1, -1])


# ---------------------------------------------------------------------------
# marching-squares tracing of the level set in one cell


@dataclass
class MarchedGraph:
    """Vertices and arcs of the traced level set inside one cell.

    ``kinds`` uses ``"Eh"``, ``"Ev"``, ``"wall"`` and ``"cut"``; ``pairs``
    joins consecutive vertices along each traced contour.
    """

    vertices: np.ndarray
    kinds: list[str]
    pairs: list[tuple[int, int]] = field(default_factory=list)
    contours: list[np.ndarray] = field(default_factory=list)


def _extrema(contour: np.ndarray, axis: int, closed: bool, h: float):
    """Indices where the ``axis`` coordinate turns along the contour."""
    c = contour[:, axis]
    d = np.diff(c)
    keep = np.flatnonzero(np.abs(d) > 1e-15 * h)
    if len(keep) < 2:
        return []
    s = np.sign(d[keep])
    out = []
    pairs = list(zip(range(len(keep) - 1), range(1, len(keep))))
    if closed:
        pairs.append((len(keep) - 1, 0))
    for a, b in pairs:
        if s[a] != s[b]:
            # the turning vertex sits between the two moving segments
            out.append((keep[a] + 1) % len(contour))
    return out


def _refine(contour: np.ndarray, k: int, axis: int) -> np.ndarray:
    # parabola through three neighbours, in the turning coordinate
    n = len(contour)
    a, b, c = contour[(k - 1) % n], contour[k], contour[(k + 1) % n]
    other = 1 - axis
    ya, yb, yc = a[axis], b[axis], c[axis]
    xa, xb, xc = a[other], b[other], c[other]
    denom = (xa - xb) * (xa - xc) * (xb - xc)
    if abs(denom) < 1e-30:
        return b.copy()
    A = (xc * (yb - ya) + xb * (ya - yc) + xa * (yc - yb)) / denom
    B = (xc * xc * (ya - yb) + xb * xb * (yc - ya) + xa * xa * (yb - yc)) / denom
    if A == 0.0:
        return b.copy()
    xv = -B / (2 * A)
    if not min(xa, xc) <= xv <= max(xa, xc):
        return b.copy()
    C = ya - A * xa * xa - B * xa
    out = b.copy()
    out[other] = xv
    out[axis] = C - B * B / (4 * A)
    return out


def _line_hits(contour: np.ndarray, closed: bool, axis: int, value: float):
    """Interpolated crossings of the contour with ``coord[axis] = value``."""
    pts = contour
    idx = range(len(pts) - 1) if not closed else range(len(pts))
    out = []
    for q in idx:
        p0, p1 = pts[q], pts[(q + 1) % len(pts)]
        u0, u1 = p0[axis] - value, p1[axis] - value
        if u0 == 0.0:
            out.append((float(q), p0.copy()))
        elif u0 * u1 < 0.0:
            t = u0 / (u0 - u1)
            out.append((q + t, p0 + t * (p1 - p0)))
    return out


def march_boundary(piece1, piece2, delta: float, resolution: int = 2048) -> MarchedGraph:
    """Trace ``|P(x) - Q(y)| = delta`` on a grid and build its monotone-arc graph.

    Extrema are turning points of the traced polylines; cuts are drawn
    through them (vertical through y-extrema, horizontal through
    x-extrema), and every crossing of a contour with a cut or the cell
    boundary becomes a vertex.  Consecutive vertices along a contour are
    paired.

    Raises
    ------
    UnresolvedAtResolution
        If two features lie within two grid cells of each other.
    """
    if resolution < 64:
        raise ParameterOutOfRange("resolution must be at least 64")
    h = 1.0 / resolution
    ts = np.linspace(0.0, 1.0, resolution + 1)
    A = piece1.sample(ts)
    B = piece2.sample(ts)
    f = (np.einsum("ik,ik->i", A, A)[:, None] + np.einsum("jk,jk->j", B, B)[None, :]
         - 2.0 * A @ B.T) - delta * delta
    raw = measure.find_contours(f, 0.0)
    contours = []
    for c in raw:
        closed = len(c) > 2 and np.allclose(c[0], c[-1])
        pts = c[:-1] if closed else c
        contours.append((pts * h, closed))

    # extrema and their cuts
    eh, ev = [], []
    for ci, (c, closed) in enumerate(contours):
        for k in _extrema(c, 1, closed, h):
            eh.append((ci, k, _refine(c, k, 1)))
        for k in _extrema(c, 0, closed, h):
            ev.append((ci, k, _refine(c, k, 0)))
    feats = [p for _, _, p in eh + ev]
    for a in range(len(feats)):
        for b in range(a + 1, len(feats)):
            if np.max(np.abs(feats[a] - feats[b])) < 2 * h:
                raise UnresolvedAtResolution("extrema closer than two grid cells")
    for _, _, p in eh + ev:
        if min(p[0], p[1], 1 - p[0], 1 - p[1]) < 2 * h:
            raise UnresolvedAtResolution("extremum next to the cell boundary")
    xcuts = [p[0] for _, _, p in eh]
    ycuts = [p[1] for _, _, p in ev]

    vertices: list[np.ndarray] = []
    kinds: list[str] = []
    pairs: list[tuple[int, int]] = []
    for ci, (c, closed) in enumerate(contours):
        marks: list[tuple[float, np.ndarray, str]] = []
        for x in xcuts:
            marks += [(s, p, "cut") for s, p in _line_hits(c, closed, 0, x)]
        for y in ycuts:
            marks += [(s, p, "cut") for s, p in _line_hits(c, closed, 1, y)]
        own = [(k, p, "Eh") for cj, k, p in eh if cj == ci] + \
              [(k, p, "Ev") for cj, k, p in ev if cj == ci]
        # a cut crossing at the extremum it was drawn through is that extremum
        for k, p, kind in own:
            axis = 0 if kind == "Eh" else 1
            best = None
            for q, (s, r, _) in enumerate(marks):
                if abs(r[axis] - p[axis]) <= 1e-12 and np.max(np.abs(r - p)) <= 2 * h:
                    if best is None or np.max(np.abs(r - p)) < np.max(np.abs(marks[best][1] - p)):
                        best = q
            if best is not None:
                marks[best] = (marks[best][0], p, kind)
            else:
                marks.append((float(k), p, kind))
        if not closed:
            marks.append((-1.0, c[0], "wall"))
            marks.append((float(len(c)), c[-1], "wall"))
        marks.sort(key=lambda t: t[0])
        for s1, s2 in zip(marks, marks[1:]):
            if np.max(np.abs(s1[1] - s2[1])) < 1e-3 * h:
                raise UnresolvedAtResolution("two vertices coincide along a contour")
        ids = []
        for _, p, kind in marks:
            ids.append(len(vertices))
            vertices.append(np.asarray(p, dtype=float))
            kinds.append(kind)
        pairs += list(zip(ids, ids[1:]))
        if closed and len(ids) > 1:
            pairs.append((ids[-1], ids[0]))
    V = np.array(vertices) if vertices else np.empty((0, 2))
    return MarchedGraph(V, kinds, pairs, [c for c, _ in contours])


# ---------------------------------------------------------------------------
# generators


def random_bezier(pieces: int, degree: int = 3, dim: int = 2, seed: int = 0,
                  step: float = 1.0) -> PiecewiseCurve:
    """A C0 chain of random Bézier pieces; each control point is a Gaussian step."""
    if pieces < 1 or degree < 1 or dim < 1:
        raise ParameterOutOfRange("pieces, degree and dim must be positive")
    rng = np.random.default_rng(seed)
    start = rng.normal(size=dim)
    out = []
    for _ in range(pieces):
        steps = rng.normal(scale=step / degree, size=(degree, dim))
        cp = np.vstack([start, start + np.cumsum(steps, axis=0)])
        out.append(cp)
        start = cp[-1]
    return PiecewiseCurve(out)


def random_polygonal(pieces: int, dim: int = 2, seed: int = 0) -> PiecewiseCurve:
    """Polyline through ``pieces + 1`` uniform random points of the unit cube."""
    rng = np.random.default_rng(seed)
    return PiecewiseCurve.polyline(rng.uniform(size=(pieces + 1, dim)))


def c_packed_curve(c: int, pieces: int, seed: int = 0, length: float = 1.0,
                   noise: float = 0.05, gap: float | None = None) -> PiecewiseCurve:
    """A meander of ``max(1, c // 2)`` parallel passes over a strip.

    Each pass is ``length`` long.  The passes are spaced by ``gap``
    (default ``length / (4 passes)``) and traced by cubic pieces whose
    inner control points carry a Gaussian wobble of ``noise * gap``, so
    balls around the strip meet about ``c`` units of length per unit radius.
    """
    if c < 1 or pieces < 1:
        raise ParameterOutOfRange("c and pieces must be positive")
    rng = np.random.default_rng(seed)
    passes = max(1, c // 2)
    if gap is None:
        gap = length / (4 * passes)
    total = passes * length
    # positions along the meander, laid out as (x, y) with turns at the ends
    s = np.linspace(0.0, total, 3 * pieces + 1)

    def at(u):
        k = np.minimum((u / length).astype(int), passes - 1)
        t = u - k * length
        x = np.where(k % 2 == 0, t, length - t)
        return np.stack([x, k * gap], axis=1)

    pts = at(s)
    pts[1:-1] += rng.normal(scale=noise * gap, size=(len(pts) - 2, 2))
    return PiecewiseCurve([pts[3 * i:3 * i + 4] for i in range(pieces)])


def spiral(turns: float = 3.0, pieces: int = 24, seed: int = 0) -> PiecewiseCurve:
    """Archimedean spiral with a random phase and radial jitter, as cubic pieces."""
    rng = np.random.default_rng(seed)
    phase = rng.uniform(0, 2 * np.pi)
    theta = np.linspace(0.0, 2 * np.pi * turns, 3 * pieces + 1)
    r = 0.1 + theta / (2 * np.pi) * (1 + 0.05 * rng.normal(size=theta.shape))
    pts = np.stack([r * np.cos(theta + phase), r * np.sin(theta + phase)], axis=1)
    return PiecewiseCurve([pts[3 * i:3 * i + 4] for i in range(pieces)])
