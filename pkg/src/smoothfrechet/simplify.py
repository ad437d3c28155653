"""Simplification of piecewise polynomial curves and packedness estimates.

``simplify`` scans the pieces in order.  A piece at least ``mu`` long is kept.
A shorter piece starting at ``c`` lies inside the ball ``B(c, mu)``; the
curve is followed until it first leaves that ball at a point ``p``, the part
between ``c`` and ``p`` is replaced by the segment ``[c, p]`` of length
``mu``, and the scan resumes with the rest of the piece that left the ball.
If the curve never leaves, everything after ``c`` is dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import _bernstein as kern
from .curves import PiecewiseCurve, PolynomialPiece, derivative
from .errors import ParameterOutOfRange, WholeArcAtDistance
from .polysolve import CLUSTER_WIDTH, ISOLATION_TOL, curve_sphere_intersections

__all__ = [
    "Replacement",
    "SimplificationResult",
    "simplify",
    "length_in_ball",
    "packedness_estimate",
]

LENGTH_RTOL = 1e-9
END_TOL = 1e-12
SPEED_RTOL = 1e-12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class Replacement:
    """One edit of the scan, in global parameters of the input curve.

    ``kind`` is ``"segment"`` for a span replaced by the chord ``start ->
    end`` or ``"truncate"`` when the tail starting at ``start`` was dropped.
    """

    kind: str
    span: tuple[float, float]
    start: tuple[float, ...]
    end: tuple[float, ...]


@dataclass
class SimplificationResult:
    curve: PiecewiseCurve
    log: list[Replacement] = field(default_factory=list)
    mu: float = 0.0

    @property
    def segments(self) -> list[Replacement]:
        return [r for r in self.log if r.kind == "segment"]


def _exit(piece: PolynomialPiece, center: np.ndarray, mu: float, t_from: float) -> float | None:
    """First parameter after ``t_from`` where ``piece`` leaves ``B(center, mu)``."""
    try:
        hits = curve_sphere_intersections(piece, center, mu)
    except WholeArcAtDistance:
        return None
    ts = [t for t, _ in hits] + [1.0]
    mu2 = mu * mu
    for k, (t, touch) in enumerate(hits):
        if touch or t < t_from:
            continue
        after = 0.5 * (t + ts[k + 1])
        if after <= t:
            after = min(1.0, t + 1e-9)
        d = piece(after) - center
        if d @ d > mu2:
            return t
    return None


def simplify(curve: PiecewiseCurve, mu: float) -> SimplificationResult:
    """Replace stretches that stay within ``mu`` of a point by chords of length ``mu``.

    Parameters
    ----------
    curve : PiecewiseCurve
    mu : float
        Radius, positive.

    Returns
    -------
    SimplificationResult
        Output curve made of original pieces, suffixes of pieces and
        chords of length ``mu``; every piece is at least ``mu`` long.  If
        the whole curve stays in the first ball, the result is the point
        curve at the start.

    Examples
    --------
    >>> c = PiecewiseCurve.polyline([[0, 0], [1, 0], [1, 1]])
    >>> len(simplify(c, 0.5).curve)
    2
    """
    mu = float(mu)
    if not mu > 0:
        raise ParameterOutOfRange("mu must be positive")
    pieces = list(curve.pieces)
    n = len(pieces)
    out: list[PolynomialPiece] = []
    log: list[Replacement] = []
    # current piece: index, its (possibly shortened) polynomial, and where it starts
    i = 0
    cur = pieces[0]
    t0 = 0.0
    while i < n:
        if cur.length >= mu * (1 - LENGTH_RTOL):
            out.append(cur)
            i += 1
            if i < n:
                cur, t0 = pieces[i], 0.0
            continue
        center = np.array(cur.start)
        found = None
        for j in range(i + 1, n):
            t = _exit(pieces[j], center, mu, 0.0)
            if t is not None:
                found = (j, t)
                break
        g0 = (i + t0) / n
        if found is None:
            log.append(Replacement("truncate", (g0, 1.0), tuple(center), tuple(curve.end)))
            break
        j, t = found
        p = pieces[j](t)
        out.append(PolynomialPiece(np.array([center, p]), validate=False))
        log.append(Replacement("segment", (g0, (j + t) / n), tuple(center), tuple(p)))
        if t >= 1.0 - END_TOL:
            i = j + 1
            if i < n:
                cur, t0 = pieces[i], 0.0
                # snap the next piece to the chord end
                cp = np.array(cur.control_points)
                cp[0] = p
                cur = PolynomialPiece(cp, validate=False)
            continue
        i = j
        rest = pieces[j].restrict(t, 1.0)
        cp = np.array(rest.control_points)
        cp[0] = p
        cur = PolynomialPiece(cp, validate=False)
        t0 = t
    if not out:
        return SimplificationResult(PiecewiseCurve.point(curve.start), log, mu)
    return SimplificationResult(PiecewiseCurve(out, validate=False), log, mu)


def _gl(hodo: np.ndarray, a: float, b: float) -> float:
    t = 0.5 * (b - a) * _GL_X + 0.5 * (a + b)
    k = hodo.shape[0] - 1
    j = np.arange(k + 1)
    coef = np.array([comb(k, q) for q in j], dtype=float)
    basis = coef * t[:, None] ** j * (1 - t[:, None]) ** (k - j)
    v = basis @ hodo
    return float(0.5 * (b - a) * (_GL_W @ np.sqrt(np.einsum("ij,ij->i", v, v))))


def _speed_integral(hodo: np.ndarray, a: float, b: float, whole: float | None = None,
                    depth: int = 0) -> float:
    """Adaptive Gauss-Legendre integral of the speed over ``[a, b]``."""
    whole = _gl(hodo, a, b) if whole is None else whole
    m = 0.5 * (a + b)
    left, right = _gl(hodo, a, m), _gl(hodo, m, b)
    if depth >= 20 or abs(left + right - whole) <= SPEED_RTOL * max(left + right, 1e-300):
        return left + right
    return (_speed_integral(hodo, a, m, left, depth + 1)
            + _speed_integral(hodo, m, b, right, depth + 1))


class _LengthIndex:
    """Per-piece data for repeated ball-length queries."""

    def __init__(self, curve: PiecewiseCurve):
        self.pieces = curve.pieces
        self.cps = [np.ascontiguousarray(p.control_points, dtype=float) for p in curve.pieces]
        self.lo = np.array([c.min(axis=0) for c in self.cps])
        self.hi = np.array([c.max(axis=0) for c in self.cps])
        self.hodos = [np.asarray(derivative(p).control_points, dtype=float)
                      for p in curve.pieces]
        self.linear = [c.shape[0] == 2 for c in self.cps]
        self.lengths = [p.length for p in curve.pieces]

    def length_in_ball(self, p: np.ndarray, r: float) -> float:
        gap = np.maximum(np.maximum(self.lo - p, p - self.hi), 0.0)
        near = np.flatnonzero(np.einsum("ij,ij->i", gap, gap) <= r * r)
        total = 0.0
        r2 = r * r
        for q in near:
            cp = self.cps[q]
            c = kern.sphere_coeffs(cp, p, r2)
            if c.max() <= 0.0:
                total += self.lengths[q]
                continue
            roots, _, values = kern.line_profile(c, ISOLATION_TOL, CLUSTER_WIDTH)
            bounds = [0.0] + list(roots) + [1.0]
            for k, v in enumerate(values):
                if v > 0.0:
                    continue
                a, b = bounds[k], bounds[k + 1]
                if a <= 0.0 and b >= 1.0:
                    total += self.lengths[q]
                elif self.linear[q]:
                    total += self.lengths[q] * (b - a)
                elif b > a:
                    total += _speed_integral(self.hodos[q], a, b)
        return total


def length_in_ball(curve: PiecewiseCurve, center, r: float) -> float:
    """Arc length of ``curve`` inside the closed ball ``B(center, r)``."""
    if r <= 0:
        return 0.0
    return _LengthIndex(curve).length_in_ball(np.asarray(center, dtype=float), float(r))


def packedness_estimate(curve: PiecewiseCurve, trials: int = 500, seed: int = 0) -> float:
    """Lower estimate of the packedness constant ``c``.

    Returns the largest ratio ``l(curve ∩ B(p, r)) / r`` over ``trials``
    random balls.  Centers are points of the curve moved by up to ``r / 2``;
    radii are log-uniform on ``[1e-3 L, 2 L]`` with ``L`` the curve length.

    Parameters
    ----------
    curve : PiecewiseCurve
    trials : int
        Number of sampled balls, at least 1.
    seed : int
        Seed of the generator; equal seeds give equal balls for equal
        lengths.
    """
    if trials < 1:
        raise ParameterOutOfRange("trials must be at least 1")
    L = curve.length
    if L <= 0:
        return 0.0
    rng = np.random.default_rng(seed)
    index = _LengthIndex(curve)
    best = 0.0
    for _ in range(trials):
        r = float(np.exp(rng.uniform(np.log(1e-3 * L), np.log(2 * L))))
        t = float(rng.uniform())
        u = rng.normal(size=curve.dim)
        u *= rng.uniform() * 0.5 * r / max(np.linalg.norm(u), 1e-300)
        p = curve(t) + u
        best = max(best, index.length_in_ball(p, r) / r)
    return best
