import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothfrechet import PiecewiseCurve, compute, length_in_ball, packedness_estimate, simplify
from smoothfrechet.errors import ParameterOutOfRange
from smoothfrechet.oracle import spiral
from helpers import random_curve


def polyline_trace(points, mu):
    """Step-through of the scan for polylines using plain segment geometry."""
    P = [np.asarray(p, dtype=float) for p in points]
    segs = list(zip(P[:-1], P[1:]))
    out = [P[0]]
    i, (a, b) = 0, segs[0]
    while True:
        if np.linalg.norm(b - a) >= mu:
            out.append(b)
            i += 1
            if i == len(segs):
                return out, False
            a, b = segs[i]
            continue
        c = a
        for j in range(i + 1, len(segs)):
            p, q = segs[j]
            d = q - p
            # larger root of |p + t d - c| = mu; the segment starts inside the ball
            A, B, C = d @ d, (p - c) @ d, (p - c) @ (p - c) - mu * mu
            t = (-B + np.sqrt(B * B - A * C)) / A
            if t <= 1.0:
                break
        else:
            return out, True
        e = p + t * d
        out.append(e)
        i, (a, b) = j, (e, q)
        if t >= 1.0 - 1e-12:
            i += 1
            if i == len(segs):
                return out, False
            a, b = e, segs[i][1]


def staircase(steps=10, size=0.1):
    pts = [(0.0, 0.0)]
    for k in range(steps):
        pts.append(((k + 1) * size, k * size))
        pts.append(((k + 1) * size, (k + 1) * size))
    return pts


def test_long_edges_are_kept():
    c = PiecewiseCurve.polyline([[0, 0], [1, 0], [1, 1], [3, 1]])
    r = simplify(c, 0.9)
    assert r.curve == c and r.log == []


def test_tail_inside_first_ball_is_dropped():
    c = PiecewiseCurve.polyline([[-2, 0], [0, 0], [0.1, 0], [0.1, 0.1]])
    r = simplify(c, 1.0)
    np.testing.assert_allclose(r.curve.end, [0.0, 0.0])
    assert [e.kind for e in r.log] == ["truncate"]
    point = simplify(PiecewiseCurve.polyline([[0, 0], [0.1, 0], [0.1, 0.1]]), 1.0).curve
    assert point.is_point


def test_staircase_matches_step_through():
    pts = staircase()
    expected, truncated = polyline_trace(pts, 0.35)
    r = simplify(PiecewiseCurve.polyline(pts), 0.35)
    got = [r.curve.start] + [p.end for p in r.curve.pieces]
    np.testing.assert_allclose(got, expected, atol=1e-12)
    assert truncated == (r.log[-1].kind == "truncate")
    # chord endpoints lie on the balls around their starts
    for e in r.segments:
        assert np.linalg.norm(np.subtract(e.end, e.start)) == pytest.approx(0.35, abs=1e-12)
    assert len(r.segments) == 4 and truncated


def test_mu_validation():
    with pytest.raises(ParameterOutOfRange):
        simplify(PiecewiseCurve.polyline([[0, 0], [1, 0]]), 0.0)


def test_length_in_ball():
    seg = PiecewiseCurve.polyline([[0, 0], [4, 0]])
    assert length_in_ball(seg, [1, 0], 0.5) == pytest.approx(1.0, abs=1e-12)
    assert length_in_ball(seg, [1, 3], 0.5) == 0.0
    arc = PiecewiseCurve([[[0, 0], [1, 2], [2, 0]]])
    assert length_in_ball(arc, [1, 1], 100.0) == pytest.approx(arc.length, rel=1e-12)


def test_packedness_examples():
    seg = PiecewiseCurve.polyline([[0, 0], [1, 0]])
    assert 1.0 <= packedness_estimate(seg, trials=300) <= 2.0
    k = 4
    folded = PiecewiseCurve.polyline([[float(i % 2), 0.0] for i in range(k + 1)])
    assert packedness_estimate(folded, trials=300) >= k


def test_packedness_spiral_against_grid():
    c = spiral(3.0, 24, seed=0)
    est = packedness_estimate(c, trials=500, seed=0)
    # dense polyline, centers on every 40th sample, 80 radii
    pts = np.vstack([p.sample(np.linspace(0, 1, 1001))[:-1] for p in c.pieces] + [c.end[None]])
    mid, ln = 0.5 * (pts[1:] + pts[:-1]), np.linalg.norm(np.diff(pts, axis=0), axis=1)
    d = np.linalg.norm(mid[None] - pts[::40][:, None], axis=2)
    grid = max(((d <= r) @ ln).max() / r for r in np.geomspace(1e-3 * c.length, 2 * c.length, 80))
    assert est == pytest.approx(grid, rel=0.1)


seeds = st.integers(0, 100_000)
fracs = st.sampled_from([0.05, 0.1, 0.3])


@given(seeds, fracs)
def test_piece_lengths_and_length_capture(seed, frac):
    rng = np.random.default_rng(seed)
    c = random_curve(rng, 6, 3)
    mu = frac * c.length
    s = simplify(c, mu).curve
    if not s.is_point:
        assert min(p.length for p in s.pieces) >= mu * (1 - 1e-9)
    for _ in range(10):
        p = c(rng.uniform()) + rng.normal(scale=0.2 * c.scale, size=2)
        r = float(rng.uniform(0.01, 1.0)) * c.scale
        assert length_in_ball(c, p, r + mu) >= length_in_ball(s, p, r) - 1e-6 * c.scale


@settings(max_examples=6)
@given(seeds, fracs)
def test_frechet_bound(seed, frac):
    rng = np.random.default_rng(seed)
    c = random_curve(rng, 4, 3)
    mu = frac * c.length
    s = simplify(c, mu).curve
    assert compute(c, s) <= mu * (1 + 1e-6)
