"""Piecewise polynomial curves in Bernstein form.

A :class:`PiecewiseCurve` is a sequence of :class:`PolynomialPiece` objects
joined with C0 continuity.  Piece ``i`` of ``n`` covers the global parameter
range ``[i/n, (i+1)/n]``; each piece is parametrised locally over [0, 1].

Examples
--------
>>> arc = PolynomialPiece([[0, 0], [1, 2], [2, 0]])
>>> curve = PiecewiseCurve([arc])
>>> evaluate(curve, 0.5)
array([1., 1.])
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import comb

from ._bernstein import decasteljau, split_rows
from .errors import CurveValidationError, ParameterOutOfRange, UnsupportedNorm

__all__ = [
    "MAX_DEGREE",
    "JOINT_TOL",
    "NormConfig",
    "PolynomialPiece",
    "PiecewiseCurve",
    "evaluate",
    "derivative",
    "dist_sq",
    "arc_length",
    "elevate",
    "bernstein_product",
    "curve_from_dict",
    "curve_to_dict",
    "load_curve",
    "save_curve",
]

MAX_DEGREE = 8
JOINT_TOL = 1e-12
ARC_LENGTH_RTOL = 1e-10


@dataclass(frozen=True)
class NormConfig:
    """Exponent of the l_p norm; only p = 2 is implemented."""

    p: float = 2.0

    def __post_init__(self):
        if self.p != 2:
            raise UnsupportedNorm(f"only the Euclidean norm is supported, got p={self.p}")


def elevate(coeffs: np.ndarray, r: int) -> np.ndarray:
    """Raise the degree of Bernstein coefficients by ``r``.

    Works on the first axis, so both scalar ``(k+1,)`` and vector
    ``(k+1, d)`` coefficient arrays are accepted.
    """
    c = np.asarray(coeffs, dtype=float)
    for _ in range(r):
        k = c.shape[0] - 1
        a = (np.arange(1, k + 1) / (k + 1)).reshape((-1,) + (1,) * (c.ndim - 1))
        out = np.empty((k + 2,) + c.shape[1:])
        out[0] = c[0]
        out[-1] = c[-1]
        out[1:-1] = a * c[:-1] + (1 - a) * c[1:]
        c = out
    return c


def bernstein_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Bernstein coefficients of the product of two scalar polynomials."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p, q = a.shape[0] - 1, b.shape[0] - 1
    wa = a * comb(p, np.arange(p + 1))
    wb = b * comb(q, np.arange(q + 1))
    return np.convolve(wa, wb) / comb(p + q, np.arange(p + q + 1))


def _as_points(points) -> np.ndarray:
    arr = np.array(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise CurveValidationError("control points must form a (k+1, d) array")
    if not np.all(np.isfinite(arr)):
        raise CurveValidationError("control points must be finite")
    arr.setflags(write=False)
    return arr


class PolynomialPiece:
    """A polynomial map [0, 1] -> R^d given by its Bernstein control points.

    Parameters
    ----------
    control_points : array_like, shape (k + 1, d)
        Control points; the degree is ``k``.
    max_degree : int, optional
        Degree bound enforced during validation.
    validate : bool, optional
        Skip the curve-piece checks (degree >= 1, not a single point).  Used
        for derivatives and intermediate polynomials.
    """

    def __init__(self, control_points, max_degree: int = MAX_DEGREE, validate: bool = True):
        cp = _as_points(control_points)
        if validate:
            if cp.shape[0] < 2:
                raise CurveValidationError("a piece needs degree >= 1")
            if cp.shape[0] - 1 > max_degree:
                raise CurveValidationError(
                    f"degree {cp.shape[0] - 1} exceeds the bound {max_degree}")
            if np.all(cp == cp[0]):
                raise CurveValidationError("a piece must not be a single point")
        self.control_points = cp

    @property
    def degree(self) -> int:
        return self.control_points.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.control_points.shape[1]

    @property
    def start(self) -> np.ndarray:
        return self.control_points[0]

    @property
    def end(self) -> np.ndarray:
        return self.control_points[-1]

    def __call__(self, t: float) -> np.ndarray:
        return decasteljau(self.control_points, float(t))

    def __repr__(self) -> str:
        return f"PolynomialPiece(degree={self.degree}, dim={self.dim})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolynomialPiece):
            return NotImplemented
        return np.array_equal(self.control_points, other.control_points)

    def __hash__(self) -> int:
        return hash(self.control_points.tobytes())

    def derivative(self) -> "PolynomialPiece":
        return derivative(self)

    def subdivide(self, t: float) -> tuple["PolynomialPiece", "PolynomialPiece"]:
        """Split at local parameter ``t`` into two pieces (exact polynomials)."""
        left, right = split_rows(np.array(self.control_points), float(t))
        return (PolynomialPiece(left, validate=False),
                PolynomialPiece(right, validate=False))

    def restrict(self, t0: float, t1: float) -> "PolynomialPiece":
        """The same polynomial reparametrised over ``[t0, t1]``."""
        cp = np.array(self.control_points)
        _, right = split_rows(cp, float(t0))
        if t0 < 1.0:
            right, _ = split_rows(right, (t1 - t0) / (1.0 - t0))
        return PolynomialPiece(right, validate=False)

    def elevated(self, degree: int) -> "PolynomialPiece":
        return PolynomialPiece(elevate(self.control_points, degree - self.degree),
                               validate=False)

    def reversed(self) -> "PolynomialPiece":
        return PolynomialPiece(self.control_points[::-1], validate=False)

    def sample(self, ts: np.ndarray) -> np.ndarray:
        """Evaluate at many local parameters, returning shape ``(len(ts), d)``."""
        ts = np.asarray(ts, dtype=float)
        k = self.degree
        basis = comb(k, np.arange(k + 1)) * ts[:, None] ** np.arange(k + 1) \
            * (1 - ts[:, None]) ** (k - np.arange(k + 1))
        return basis @ self.control_points

    @cached_property
    def length(self) -> float:
        return arc_length(self)


class PiecewiseCurve:
    """A C0 chain of polynomial pieces over the global parameter [0, 1].

    Parameters
    ----------
    pieces : sequence of PolynomialPiece or array_like
        The pieces in order; raw control-point arrays are wrapped.
    joint_tol : float, optional
        Allowed per-coordinate gap between consecutive pieces.
    """

    def __init__(self, pieces: Iterable, joint_tol: float = JOINT_TOL,
                 max_degree: int = MAX_DEGREE, validate: bool = True):
        ps = tuple(p if isinstance(p, PolynomialPiece)
                   else PolynomialPiece(p, max_degree=max_degree, validate=validate)
                   for p in pieces)
        if not ps:
            raise CurveValidationError("a curve needs at least one piece")
        dim = ps[0].dim
        for k, p in enumerate(ps):
            if p.dim != dim:
                raise CurveValidationError(f"piece {k} has dim {p.dim}, expected {dim}")
            if validate and k > 0:
                gap = np.max(np.abs(ps[k - 1].end - p.start))
                if gap > joint_tol:
                    raise CurveValidationError(
                        f"C0 gap {gap:.3g} between pieces {k - 1} and {k}")
        self.pieces = ps
        self.dim = dim

    @classmethod
    def point(cls, p) -> "PiecewiseCurve":
        """A degenerate curve that stays at a single point."""
        p = np.asarray(p, dtype=float)
        return cls([PolynomialPiece([p, p], validate=False)], validate=False)

    @classmethod
    def polyline(cls, points) -> "PiecewiseCurve":
        pts = np.asarray(points, dtype=float)
        return cls([pts[k:k + 2] for k in range(len(pts) - 1)])

    def __len__(self) -> int:
        return len(self.pieces)

    def __iter__(self):
        return iter(self.pieces)

    def __getitem__(self, i) -> PolynomialPiece:
        return self.pieces[i]

    def __repr__(self) -> str:
        degs = sorted({p.degree for p in self.pieces})
        return f"PiecewiseCurve(pieces={len(self)}, dim={self.dim}, degrees={degs})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PiecewiseCurve):
            return NotImplemented
        return len(self) == len(other) and all(
            a == b for a, b in zip(self.pieces, other.pieces))

    def __hash__(self) -> int:
        return hash(tuple(self.pieces))

    @property
    def n_pieces(self) -> int:
        return len(self.pieces)

    @property
    def max_degree(self) -> int:
        return max(p.degree for p in self.pieces)

    @cached_property
    def is_point(self) -> bool:
        first = self.pieces[0].start
        return all(np.all(p.control_points == first) for p in self.pieces)

    @property
    def start(self) -> np.ndarray:
        return self.pieces[0].start

    @property
    def end(self) -> np.ndarray:
        return self.pieces[-1].end

    def joints(self) -> np.ndarray:
        """Points at global parameters ``i/n`` for ``i = 0..n``."""
        pts = [p.start for p in self.pieces] + [self.pieces[-1].end]
        return np.array(pts)

    def locate(self, t: float) -> tuple[int, float]:
        """Piece index and local parameter of global parameter ``t``."""
        if not 0.0 <= t <= 1.0:
            raise ParameterOutOfRange(f"parameter {t} outside [0, 1]")
        n = len(self.pieces)
        i = min(int(t * n), n - 1)
        return i, min(max(t * n - i, 0.0), 1.0)

    def __call__(self, t: float) -> np.ndarray:
        i, u = self.locate(t)
        return self.pieces[i](u)

    def control_points(self) -> np.ndarray:
        return np.concatenate([p.control_points for p in self.pieces])

    @cached_property
    def scale(self) -> float:
        """Diagonal of the control-point bounding box, at least 1e-300."""
        cp = self.control_points()
        return max(float(np.linalg.norm(cp.max(axis=0) - cp.min(axis=0))), 1e-300)

    @cached_property
    def length(self) -> float:
        return float(sum(p.length for p in self.pieces))

    def subdivided(self, i: int, t: float) -> "PiecewiseCurve":
        """Split piece ``i`` at local parameter ``t``; the trace is unchanged."""
        left, right = self.pieces[i].subdivide(t)
        pieces = self.pieces[:i] + (left, right) + self.pieces[i + 1:]
        return PiecewiseCurve(pieces, validate=False)

    def reversed(self) -> "PiecewiseCurve":
        return PiecewiseCurve([p.reversed() for p in reversed(self.pieces)], validate=False)

    def translated(self, offset) -> "PiecewiseCurve":
        off = np.asarray(offset, dtype=float)
        return PiecewiseCurve([p.control_points + off for p in self.pieces], validate=False)

    def to_dict(self) -> dict:
        return curve_to_dict(self)


def evaluate(curve: PiecewiseCurve, t: float) -> np.ndarray:
    """Point of ``curve`` at global parameter ``t`` in [0, 1].

    Raises
    ------
    ParameterOutOfRange
        If ``t`` is outside [0, 1].
    """
    return curve(t)


def derivative(piece: PolynomialPiece) -> PolynomialPiece:
    """Hodograph of a piece as a vector polynomial of degree ``k - 1``."""
    cp = piece.control_points
    k = cp.shape[0] - 1
    if k == 0:
        return PolynomialPiece(np.zeros_like(cp), validate=False)
    return PolynomialPiece(k * np.diff(cp, axis=0), validate=False)


def dist_sq(curve1: PiecewiseCurve, t1: float, curve2: PiecewiseCurve, t2: float) -> float:
    """Squared Euclidean distance between ``curve1(t1)`` and ``curve2(t2)``."""
    diff = curve1(t1) - curve2(t2)
    return float(diff @ diff)


def arc_length(piece: PolynomialPiece, t0: float = 0.0, t1: float = 1.0) -> float:
    """Length of ``piece`` between local parameters ``t0`` and ``t1``.

    Segments are measured exactly; higher degrees use adaptive
    Gauss-Kronrod quadrature of the speed to relative tolerance 1e-10.
    """
    cp = piece.control_points
    if t1 <= t0:
        return 0.0
    if cp.shape[0] == 2:
        return float(np.linalg.norm(cp[1] - cp[0])) * (t1 - t0)
    hodo = np.ascontiguousarray(derivative(piece).control_points)
    if not np.any(hodo):
        return 0.0

    def speed(t):
        v = decasteljau(hodo, t)
        return math.sqrt(float(v @ v))

    # split at a few interior nodes so near-cusps do not stall the integrator
    nodes = np.linspace(t0, t1, piece.degree + 1)
    total = 0.0
    for a, b in zip(nodes[:-1], nodes[1:]):
        val, _ = integrate.quad(speed, a, b, epsabs=0.0, epsrel=ARC_LENGTH_RTOL, limit=200)
        total += val
    return float(total)


# ---------------------------------------------------------------------------
# JSON interchange


def curve_to_dict(curve: PiecewiseCurve) -> dict:
    return {
        "dim": curve.dim,
        "pieces": [
            {"degree": p.degree, "basis": "bernstein",
             "control_points": p.control_points.tolist()}
            for p in curve.pieces
        ],
    }


def curve_from_dict(data: dict, max_degree: int = MAX_DEGREE) -> PiecewiseCurve:
    """Build and validate a curve from the JSON interchange structure."""
    try:
        dim = int(data["dim"])
        raw = data["pieces"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CurveValidationError(f"malformed curve document: {exc}") from None
    if not isinstance(raw, Sequence) or not raw:
        raise CurveValidationError("'pieces' must be a non-empty list")
    pieces = []
    for k, item in enumerate(raw):
        if item.get("basis", "bernstein") != "bernstein":
            raise CurveValidationError(f"piece {k}: unsupported basis {item.get('basis')!r}")
        piece = PolynomialPiece(item["control_points"], max_degree=max_degree)
        if piece.dim != dim:
            raise CurveValidationError(f"piece {k} has dim {piece.dim}, document says {dim}")
        if "degree" in item and int(item["degree"]) != piece.degree:
            raise CurveValidationError(
                f"piece {k}: degree {item['degree']} does not match "
                f"{piece.degree + 1} control points")
        pieces.append(piece)
    return PiecewiseCurve(pieces, max_degree=max_degree)


def load_curve(path) -> PiecewiseCurve:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CurveValidationError(f"{path}: invalid JSON ({exc})") from None
    return curve_from_dict(data)


def save_curve(curve: PiecewiseCurve, path) -> None:
    with open(path, "w") as fh:
        json.dump(curve_to_dict(curve), fh, indent=1)
        fh.write("\n")
