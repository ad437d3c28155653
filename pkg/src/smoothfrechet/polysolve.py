"""Real root isolation and small polynomial systems in Bernstein form.

The univariate solver counts Bernstein coefficient sign variations and
subdivides with de Casteljau until every interval holds at most one sign
change, then bisects.  The bivariate solver subdivides the unit square,
discards boxes whose coefficient hull excludes zero and certifies the
remaining ones with a Krawczyk test before a Newton polish.

All functions work on the squared distance

    f(x, y) = |P(x) - Q(y)|^2

between a piece ``P`` of the first curve and a piece ``Q`` of the second, and
on its partial derivatives ``f_x = 2 <P - Q, P'>`` and ``f_y = -2 <P - Q, Q'>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.special import comb

from . import _bernstein as kern
from .curves import PolynomialPiece, elevate
from .errors import ClusterUnresolved, IdenticallyZero, ParameterOutOfRange, WholeArcAtDistance

__all__ = [
    "ISOLATION_TOL",
    "CLUSTER_WIDTH",
    "RESIDUAL_TOL",
    "ZERO_TOL",
    "RootInterval",
    "PlanarSolution",
    "SystemSolution",
    "isolate_roots",
    "sphere_polynomial",
    "curve_sphere_intersections",
    "distance_tensors",
    "solve_extrema_system",
    "solve_singularities",
    "solve_system",
]

ISOLATION_TOL = 1e-12
CLUSTER_WIDTH = 1e-10
RESIDUAL_TOL = 1e-9
ZERO_TOL = 1e-14
MAX_BOXES = 200_000


@dataclass(frozen=True)
class RootInterval:
    """Bracket ``[lo, hi]`` of a real root.

    ``multiplicity_hint`` is ``"simple"`` for an isolated sign change and
    ``"cluster"`` when subdivision could not separate roots.  ``sign_change``
    tells whether the polynomial changes sign across the bracket, which is
    false for tangencies.
    """

    lo: float
    hi: float
    multiplicity_hint: Literal["simple", "cluster"] = "simple"
    sign_change: bool = True

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class PlanarSolution:
    """Solution of a bivariate system in the parameter square.

    Attributes
    ----------
    t1, t2 : float
        Parameters on the first and second piece.
    residual : float
        Largest absolute equation value at ``(t1, t2)``.
    box_radius : float
        Radius of the isolating box around the solution.
    value : float or None
        Critical value ``sqrt(f(t1, t2))`` for singular points.
    degenerate : bool
        True when the point represents a whole curve of solutions.
    """

    t1: float
    t2: float
    residual: float
    box_radius: float
    value: float | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class SystemSolution:
    """Raw subdivision output: certified points plus unresolved boxes."""

    points: tuple[PlanarSolution, ...]
    clusters: tuple[tuple[float, float, float, float], ...]
    curves: tuple[PlanarSolution, ...]


def _restrict(coeffs: np.ndarray, a: float, b: float) -> np.ndarray:
    if a == 0.0 and b == 1.0:
        return coeffs
    _, right = kern.split1(coeffs, a)
    if a < 1.0:
        right, _ = kern.split1(right, (b - a) / (1.0 - a))
    return right


def isolate_roots(coeffs, interval: tuple[float, float] = (0.0, 1.0),
                  tol: float = ISOLATION_TOL, scale: float = 1.0) -> list[RootInterval]:
    """Isolate the real roots of a univariate Bernstein polynomial.

    Parameters
    ----------
    coeffs : array_like
        Bernstein coefficients over [0, 1].
    interval : (float, float)
        Sub-interval ``[a, b]`` of [0, 1] to search.
    tol : float
        Target bracket width for simple roots.
    scale : float
        Magnitude reference for the identically-zero test.

    Returns
    -------
    list of RootInterval
        Disjoint brackets sorted by position.

    Raises
    ------
    IdenticallyZero
        If every coefficient is below ``1e-14 * scale`` in magnitude.

    Examples
    --------
    >>> [round(r.mid, 12) for r in isolate_roots([-0.25, -0.25, 0.75])]
    [0.5]
    """
    c = np.ascontiguousarray(coeffs, dtype=float)
    a, b = map(float, interval)
    if not 0.0 <= a <= b <= 1.0:
        raise ParameterOutOfRange(f"interval {interval} is not inside [0, 1]")
    if np.max(np.abs(c)) <= ZERO_TOL * scale:
        raise IdenticallyZero("polynomial vanishes identically")
    local = _restrict(c, a, b)
    lo, hi, kind = kern.isolate_kernel(local, a, b, tol, CLUSTER_WIDTH)
    out = []
    for l, h, k in zip(lo, hi, kind):
        if out and l <= out[-1].hi:
            continue  # exact zero shared by neighbouring subintervals
        out.append(RootInterval(
            float(l), float(h),
            "simple" if k == kern.KIND_SIMPLE else "cluster",
            k != kern.KIND_EVEN_CLUSTER))
    return out


def sphere_polynomial(piece: PolynomialPiece, center, delta: float) -> np.ndarray:
    """Bernstein coefficients of ``|piece(t) - center|^2 - delta^2``."""
    cp = np.ascontiguousarray(piece.control_points)
    return kern.sphere_coeffs(cp, np.ascontiguousarray(center, dtype=float), float(delta) ** 2)


def curve_sphere_intersections(piece: PolynomialPiece, center, delta: float
                               ) -> list[tuple[float, bool]]:
    """Parameters where ``piece`` meets the sphere of radius ``delta``.

    Returns
    -------
    list of (float, bool)
        Sorted ``(t, tangency)`` pairs; ``tangency`` marks roots without a
        sign change.

    Raises
    ------
    WholeArcAtDistance
        If the whole piece lies on the sphere.

    Examples
    --------
    >>> seg = PolynomialPiece([[0, 0], [1, 0]])
    >>> curve_sphere_intersections(seg, [0.5, 0.5], 0.5)
    [(0.5, True)]
    """
    if delta <= 0:
        raise ParameterOutOfRange("delta must be positive")
    center = np.asarray(center, dtype=float)
    c = sphere_polynomial(piece, center, delta)
    spread = np.max(np.sum((piece.control_points - center) ** 2, axis=1))
    try:
        roots = isolate_roots(c, scale=max(spread, delta ** 2))
    except IdenticallyZero:
        raise WholeArcAtDistance("piece lies on the sphere") from None
    return [(r.mid, not r.sign_change) for r in roots]


# ---------------------------------------------------------------------------
# tensor coefficients of the squared distance


def _product_tensor(p: int, q: int) -> np.ndarray:
    """``M[a, b, c]`` with ``B_a^p B_b^q = sum_c M[a, b, c] B_c^{p+q}``."""
    M = np.zeros((p + 1, q + 1, p + q + 1))
    for a in range(p + 1):
        for b in range(q + 1):
            M[a, b, a + b] = comb(p, a) * comb(q, b) / comb(p + q, a + b)
    return M


def _elevation_matrix(p: int, r: int) -> np.ndarray:
    return elevate(np.eye(p + 1), r)


def distance_tensors(P: np.ndarray, Q: np.ndarray):
    """Tensor coefficients of ``f``, ``f_x`` and ``f_y`` for batches of pieces.

    Parameters
    ----------
    P : ndarray, shape (m, p + 1, d)
        Control points of ``m`` pieces of degree ``p``.
    Q : ndarray, shape (n, q + 1, d)
        Control points of ``n`` pieces of degree ``q``.

    Returns
    -------
    F : ndarray, shape (m, n, 2p + 1, 2q + 1)
    Fx : ndarray, shape (m, n, 2p, q + 1)
    Fy : ndarray, shape (m, n, p + 1, 2q)
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    p = P.shape[1] - 1
    q = Q.shape[1] - 1
    PP = np.einsum("iak,ibk,abc->ic", P, P, _product_tensor(p, p))
    QQ = np.einsum("iak,ibk,abc->ic", Q, Q, _product_tensor(q, q))
    Pe = np.einsum("ca,iak->ick", _elevation_matrix(p, p), P)
    Qe = np.einsum("ca,iak->ick", _elevation_matrix(q, q), Q)
    F = PP[:, None, :, None] + QQ[None, :, None, :] - 2.0 * np.einsum("iak,jbk->ijab", Pe, Qe)

    dP = p * np.diff(P, axis=1)
    dQ = q * np.diff(Q, axis=1)
    PdP = np.einsum("iak,ibk,abc->ic", P, dP, _product_tensor(p, p - 1))
    QdQ = np.einsum("iak,ibk,abc->ic", Q, dQ, _product_tensor(q, q - 1))
    dPe = np.einsum("ca,iak->ick", _elevation_matrix(p - 1, p), dP)
    dQe = np.einsum("ca,iak->ick", _elevation_matrix(q - 1, q), dQ)
    Fx = 2.0 * (PdP[:, None, :, None] - np.einsum("iak,jbk->ijab", dPe, Q))
    Fy = -2.0 * (np.einsum("iak,jbk->ijab", P, dQe) - QdQ[None, :, None, :])
    return F, Fx, Fy


def _dx(T: np.ndarray) -> np.ndarray:
    a = T.shape[0] - 1
    if a == 0:
        return np.zeros((1, T.shape[1]))
    return np.ascontiguousarray(a * np.diff(T, axis=0))


def _dy(T: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(_dx(T.T).T)


def solve_system(F: np.ndarray, G: np.ndarray, scale: float = 1.0,
                 curve_width: float = 1.0 / 64) -> SystemSolution:
    """Solve ``F = G = 0`` over [0, 1]^2 for tensor Bernstein inputs.

    Isolated roots are deduplicated at 1e-9.  Boxes that stay undecided
    down to width 1e-10 are returned as clusters, and boxes lying on a
    curve of solutions are grouped into connected components, each
    represented by the point closest to the component's centroid.
    """
    F = np.ascontiguousarray(F, dtype=float)
    G = np.ascontiguousarray(G, dtype=float)
    Fx, Fy, Gx, Gy = _dx(F), _dy(F), _dx(G), _dy(G)
    roots, clusters, curve = kern.solve_box_system(
        F, G, Fx, Fy, Gx, Gy, CLUSTER_WIDTH, curve_width, scale, MAX_BOXES)

    points = []
    for x, y in sorted(map(tuple, roots)):
        if any(abs(x - s.t1) <= 1e-9 and abs(y - s.t2) <= 1e-9 for s in points):
            continue
        f = kern.tensor_eval(F, x, y)
        g = kern.tensor_eval(G, x, y)
        a, b = kern.tensor_eval(Fx, x, y), kern.tensor_eval(Fy, x, y)
        c, d = kern.tensor_eval(Gx, x, y), kern.tensor_eval(Gy, x, y)
        det = a * d - b * c
        radius = abs((d * f - b * g) / det) + abs((a * g - c * f) / det) if det else 1e-10
        points.append(PlanarSolution(x, y, max(abs(f), abs(g)), max(2.0 * radius, 1e-16)))

    components = _group_curve_boxes(curve)
    curves = []
    for comp in components:
        pts = curve[comp, :2]
        centroid = pts.mean(axis=0)
        best = comp[int(np.argmin(np.sum((pts - centroid) ** 2, axis=1)))]
        x, y = curve[best, :2]
        res = max(abs(kern.tensor_eval(F, x, y)), abs(kern.tensor_eval(G, x, y)))
        curves.append(PlanarSolution(float(x), float(y), res,
                                     float(curve[best, 2:].max()), degenerate=True))
    merged = _merge_boxes(clusters)
    return SystemSolution(tuple(points), tuple(merged), tuple(curves))


def _group_curve_boxes(curve: np.ndarray) -> list[list[int]]:
    k = len(curve)
    if k == 0:
        return []
    gap = np.abs(curve[:, None, :2] - curve[None, :, :2])
    reach = 1.5 * (curve[:, None, 2:] + curve[None, :, 2:])
    adj = sparse.csr_matrix(np.all(gap <= reach, axis=2))
    _, labels = connected_components(adj, directed=False)
    groups: dict[int, list[int]] = {}
    for a, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(a)
    return sorted(groups.values(), key=lambda g: tuple(curve[g[0], :2]))


def _merge_boxes(boxes: np.ndarray) -> list[tuple[float, float, float, float]]:
    merged: list[list[float]] = []
    for x0, x1, y0, y1 in sorted(map(tuple, boxes)):
        for m in merged:
            if x0 <= m[1] + 1e-12 and m[0] <= x1 + 1e-12 and y0 <= m[3] + 1e-12 and m[2] <= y1 + 1e-12:
                m[0], m[1] = min(m[0], x0), max(m[1], x1)
                m[2], m[3] = min(m[2], y0), max(m[3], y1)
                break
        else:
            merged.append([x0, x1, y0, y1])
    return [tuple(m) for m in merged]


def _pair_arrays(piece1: PolynomialPiece, piece2: PolynomialPiece):
    P = np.asarray(piece1.control_points, dtype=float)
    Q = np.asarray(piece2.control_points, dtype=float)
    if P.shape[1] != Q.shape[1]:
        raise ValueError("pieces live in different dimensions")
    origin = 0.5 * (P.mean(axis=0) + Q.mean(axis=0))
    F, Fx, Fy = distance_tensors((P - origin)[None], (Q - origin)[None])
    return F[0, 0], Fx[0, 0], Fy[0, 0]


def solve_extrema_system(piece1: PolynomialPiece, piece2: PolynomialPiece, delta: float,
                         axis: Literal["horizontal", "vertical"]) -> list[PlanarSolution]:
    """Points of the level set ``f = delta^2`` with an axis-parallel tangent.

    ``axis="horizontal"`` solves ``f_x = 0`` (horizontal tangent, extrema in
    the y direction); ``axis="vertical"`` solves ``f_y = 0``.  Only solutions
    in the open unit square are returned.

    Raises
    ------
    ClusterUnresolved
        If solutions cannot be separated at the cluster tolerance.
    """
    F, Fx, Fy = _pair_arrays(piece1, piece2)
    sol = extrema_raw(F, Fx, Fy, delta, axis)
    if sol.clusters or sol.curves:
        raise ClusterUnresolved("extremum system has unresolved solutions")
    return [s for s in sol.points if 0.0 < s.t1 < 1.0 and 0.0 < s.t2 < 1.0]


def extrema_raw(F, Fx, Fy, delta: float, axis: str) -> SystemSolution:
    if axis not in ("horizontal", "vertical"):
        raise ValueError(f"axis must be 'horizontal' or 'vertical', got {axis!r}")
    G = Fx if axis == "horizontal" else Fy
    d2 = float(delta) ** 2
    scale = max(1.0, d2, float(np.max(np.abs(F))))
    return solve_system(F - d2, G, scale=scale)


def solve_singularities(piece1: PolynomialPiece, piece2: PolynomialPiece
                        ) -> list[PlanarSolution]:
    """Critical points of ``f`` on the closed unit square.

    Curves of critical points are reported once, by a representative with
    ``degenerate=True``.  Each solution carries ``value = sqrt(f)``.

    Raises
    ------
    ClusterUnresolved
        If isolated solutions cannot be separated.
    """
    F, Fx, Fy = _pair_arrays(piece1, piece2)
    sol = singularities_raw(F, Fx, Fy)
    if sol.clusters:
        raise ClusterUnresolved("singular points could not be separated")
    return list(sol.points) + list(sol.curves)


def singularities_raw(F, Fx, Fy) -> SystemSolution:
    scale = max(1.0, float(np.max(np.abs(F))))
    sol = solve_system(Fx, Fy, scale=scale)

    def with_value(s: PlanarSolution) -> PlanarSolution:
        v = float(np.sqrt(max(kern.tensor_eval(F, s.t1, s.t2), 0.0)))
        return PlanarSolution(s.t1, s.t2, s.residual, s.box_radius, v, s.degenerate)

    return SystemSolution(tuple(map(with_value, sol.points)), sol.clusters,
                          tuple(map(with_value, sol.curves)))
