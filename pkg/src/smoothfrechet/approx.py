"""Approximate decision and value for packed curves via simplification.

Both curves are simplified with ``mu = eps * delta / 4`` and the exact
decision procedure runs on the simplified pair.  Simplification moves the
Fréchet distance by at most ``mu`` per curve, so a yes answer bounds the
original distance by ``delta + 2 mu`` and a no answer bounds it from below by
``delta - 2 mu``.  On packed curves with pieces of length at least ``mu``
only a linear number of cells carries reachable free space, which is what
keeps the decision cheap.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import PiecewiseCurve
from .decision import decide_detailed
from .errors import ParameterOutOfRange
from .simplify import simplify

__all__ = [
    "Below",
    "Above",
    "ValueApprox",
    "ApproxOutcome",
    "approx_decide",
    "approx_compute",
]

ZERO_RTOL = 1e-12
MAX_DOUBLINGS = 200
MAX_SEARCH = 200


@dataclass(frozen=True)
class Below:
    """The distance is less than ``bound``."""

    bound: float


@dataclass(frozen=True)
class Above:
    """The distance is greater than ``bound``."""

    bound: float


@dataclass(frozen=True)
class ValueApprox:
    """``value`` lies between the distance and ``1 + eps`` times it."""

    value: float


@dataclass
class ApproxOutcome:
    """Result of an approximate decision.

    Attributes
    ----------
    variant : Below, Above or ValueApprox
    cells_touched : int
        Cells of the simplified pair reached by the sweep.
    delta, eps, mu : float
        Query, accuracy and the simplification radius used.
    near_critical : bool
        Set when the inner decision ran in lenient mode.
    perturbations : list of float
        Distance values rejected as critical by the inner decision.
    """

    variant: Below | Above | ValueApprox
    cells_touched: int = 0
    delta: float = 0.0
    eps: float = 0.0
    mu: float = 0.0
    near_critical: bool = False
    perturbations: list[float] = field(default_factory=list)

    @property
    def kind(self) -> str:
        return {Below: "below", Above: "above", ValueApprox: "value"}[type(self.variant)]


def _check_eps(eps: float):
    if not 0.0 < eps <= 1.0:
        raise ParameterOutOfRange("eps must lie in (0, 1]")


def _endpoint_bound(a: PiecewiseCurve, b: PiecewiseCurve) -> float:
    return float(max(np.linalg.norm(a.start - b.start), np.linalg.norm(a.end - b.end)))


def approx_decide(curve1: PiecewiseCurve, curve2: PiecewiseCurve, delta: float,
                  eps: float) -> ApproxOutcome:
    """Compare the Fréchet distance with ``delta`` up to a factor ``1 ± eps``.

    Returns ``Below(delta (1 + eps))`` if the simplified curves are within
    ``delta``, ``Above(delta (1 - eps))`` otherwise.  When the endpoint
    distance already certifies the yes answer to within ``1 + eps``, a
    ``ValueApprox`` is returned instead.

    Examples
    --------
    >>> a = PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]])
    >>> b = PiecewiseCurve.polyline([[0.0, 1.0], [1.0, 1.0]])
    >>> approx_decide(a, b, 0.5, 0.1).kind
    'above'
    """
    _check_eps(eps)
    delta = float(delta)
    if not delta > 0:
        raise ParameterOutOfRange("delta must be positive")
    mu = eps * delta / 4.0
    s1 = simplify(curve1, mu).curve
    s2 = simplify(curve2, mu).curve
    r = decide_detailed(s1, s2, delta)
    common = dict(cells_touched=r.cells_touched, delta=delta, eps=eps, mu=mu,
                  near_critical=r.near_critical, perturbations=list(r.perturbations))
    if not r.answer:
        return ApproxOutcome(Above(delta * (1 - eps)), **common)
    upper = delta + 2 * mu
    if _endpoint_bound(curve1, curve2) * (1 + eps) >= upper:
        return ApproxOutcome(ValueApprox(upper), **common)
    return ApproxOutcome(Below(delta * (1 + eps)), **common)


def approx_compute(curve1: PiecewiseCurve, curve2: PiecewiseCurve, eps: float) -> float:
    """A value between the Fréchet distance and ``1 + eps`` times it.

    Starts from the endpoint lower bound, doubles until the approximate
    decision (run at accuracy ``eps / 2``) says yes, then narrows the
    bracket geometrically until its upper end is certified within
    ``1 + eps`` of the lower end.  Returns 0 for curves that coincide at the
    ends and are within ``1e-12`` of each other relative to their size.
    """
    _check_eps(eps)
    if curve1 == curve2:
        return 0.0
    e = eps / 2.0
    scale = max(curve1.scale, curve2.scale)
    floor = ZERO_RTOL * scale
    lower = _endpoint_bound(curve1, curve2)

    def ask(d: float):
        return approx_decide(curve1, curve2, d, e).kind != "above"

    # upper end: d_F <= hi (1 + e / 2); lower end: d_F > lo (1 - e / 2) or d_F >= lower
    if lower > floor:
        lo_cert = hi = lower
        for _ in range(MAX_DOUBLINGS):
            if ask(hi):
                break
            lo_cert = max(lo_cert, hi * (1 - e / 2))
            hi *= 2.0
        else:
            raise ParameterOutOfRange("no upper bound found")
    else:
        # shared endpoints: come down from the curve size instead of up from zero
        hi = scale
        for _ in range(MAX_DOUBLINGS):
            if ask(hi):
                break
            hi *= 2.0
        while True:
            if hi <= floor:
                return 0.0
            if not ask(0.5 * hi):
                lo_cert = 0.5 * hi * (1 - e / 2)
                break
            hi *= 0.5
    target = 1 + eps
    for _ in range(MAX_SEARCH):
        if hi * (1 + e / 2) <= target * lo_cert:
            break
        # geometric midpoint of the certified bracket
        lo_raw = lo_cert / (1 - e / 2)
        mid = float(np.sqrt(lo_raw * hi)) if lo_raw < hi else 0.5 * (lo_cert + hi)
        if ask(mid):
            hi = mid
        else:
            lo_cert = max(lo_cert, mid * (1 - e / 2))
    return hi * (1 + e / 2)
