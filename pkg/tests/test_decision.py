import warnings

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from smoothfrechet import PiecewiseCurve, decide, decide_detailed
from smoothfrechet.decision import propagate_subcell
from smoothfrechet.errors import CriticalDelta, ParameterOutOfRange
from smoothfrechet.freespace import Cell, mark_cell, match_subcell
from smoothfrechet.oracle import discrete_frechet, raster_decide, sample
from helpers import random_curve


def bfs_spans(free, bottom_in, left_in):
    """Monotone grid reachability from seeded bottom and left spans.

    ``free[i, j]`` samples the point ``(i / N, j / N)``; returns the reachable
    spans on the top and right edges as ``(lo, hi)`` grid coordinates.
    """
    n = free.shape[0] - 1
    t = np.arange(n + 1) / n
    R = np.zeros_like(free)
    for i in range(n + 1):
        seed = np.zeros(n + 1, dtype=bool)
        if i == 0:
            for a, b in left_in:
                seed |= (t >= a - 1e-12) & (t <= b + 1e-12)
        from_left = R[i - 1] | np.concatenate([[False], R[i - 1][:-1]]) if i else seed * False
        for a, b in bottom_in:
            if a - 1e-12 <= t[i] <= b + 1e-12:
                seed[0] = True
        col = free[i] & (seed | from_left)
        for j in range(1, n + 1):
            col[j] = col[j] or (free[i, j] and col[j - 1])
        R[i] = col

    def spans(mask):
        idx = np.flatnonzero(mask)
        return (t[idx[0]], t[idx[-1]]) if len(idx) else None

    return spans(R[:, -1]), spans(R[-1, :])


def test_examples(gap_pair):
    a, b = gap_pair
    assert decide(a, a, 0.01)
    assert not decide(a, b, 0.99) and decide(a, b, 1.01)
    rev = PiecewiseCurve.polyline([[1.0, 0.0], [0.0, 0.0]])
    assert not decide(a, rev, 0.99)
    with pytest.raises(ParameterOutOfRange):
        decide(a, b, 0.0)


def test_result_bookkeeping(gap_pair):
    a, b = gap_pair
    r = decide_detailed(a, b, 1.5)
    assert r.answer and not r.near_critical and r.cells_touched == 1
    assert r.delta_used == 1.5 and r.perturbations == []


@pytest.mark.parametrize("bottom, left", [([(0.8, 0.9)], []), ([], [(0.75, 0.8)]),
                                          ([(0.7, 1.0)], [(0.7, 1.0)])])
def test_propagation_across_a_decreasing_band(bottom, left):
    # f = (x + y - 1)^2, so at delta = 0.3 the free band is 0.7 <= x + y <= 1.3
    a = PiecewiseCurve.polyline([[0.0, 0.0], [1.0, 0.0]])
    b = PiecewiseCurve.polyline([[1.0, 0.0], [0.0, 0.0]])
    pts, subs = mark_cell(a, b, Cell(0, 0), 0.3)
    (sub,) = subs
    m = match_subcell(sub, pts)
    top, right = propagate_subcell(sub, pts, m, bottom, left)
    N = 512
    x = np.arange(N + 1) / N
    free = np.abs(x[:, None] + x[None, :] - 1.0) <= 0.3
    t_ref, r_ref = bfs_spans(free, bottom, left)
    for got, ref in ((top, t_ref), (right, r_ref)):
        if ref is None:
            assert got == []
        else:
            assert len(got) == 1
            np.testing.assert_allclose(got[0], ref, atol=2 / N)


def test_full_and_empty_subcells(gap_pair):
    a, b = gap_pair
    # fully free cell: every point of the far edges is reachable
    pts, (sub,) = mark_cell(a, b, Cell(0, 0), 2.0)
    top, right = propagate_subcell(sub, pts, match_subcell(sub, pts), [(0.0, 1.0)], [])
    assert top == [(0.0, 1.0)] and right == [(0.0, 1.0)]
    assert not decide(a, b, 0.5)


@pytest.mark.parametrize("seed", range(6))
def test_agrees_with_raster(seed):
    rng = np.random.default_rng(seed)
    a, b = random_curve(rng, 2, 3), random_curve(rng, 2, 2)
    for delta in np.linspace(0.3, 3.0, 7):
        try:
            exact = decide(a, b, delta)
        except CriticalDelta:
            continue
        fine = raster_decide(a, b, delta * 1.01, 1024)
        coarse = raster_decide(a, b, delta * 0.99, 1024)
        # the raster answer at a slightly smaller delta can only be yes if the exact one is
        if coarse:
            assert exact
        if not fine:
            assert not exact


seeds = st.integers(0, 100_000)


@given(seeds)
def test_monotone_in_delta(seed):
    rng = np.random.default_rng(seed)
    a, b = random_curve(rng, 2, 3), random_curve(rng, 2, 3)
    answers = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for d in np.geomspace(0.05, 5.0, 20):
            try:
                answers.append(decide(a, b, d))
            except CriticalDelta:
                pass
    assert answers == sorted(answers)


@given(seeds, st.floats(0.01, 0.999))
def test_endpoint_bound(seed, frac):
    rng = np.random.default_rng(seed)
    a, b = random_curve(rng, 2, 3), random_curve(rng, 1, 2)
    ends = max(np.linalg.norm(a.start - b.start), np.linalg.norm(a.end - b.end))
    assume(ends * frac > 1e-6)
    assert not decide(a, b, ends * frac - 1e-9)


@given(seeds, st.floats(0.1, 0.9), st.floats(0.3, 3.0))
def test_subdivision_does_not_change_answer(seed, t, delta):
    rng = np.random.default_rng(seed)
    a, b = random_curve(rng, 2, 3), random_curve(rng, 2, 3)
    try:
        before = decide(a, b, delta)
        after = decide(a.subdivided(1, t), b.subdivided(0, 1 - t), delta)
    except CriticalDelta:
        assume(False)
    assert before == after


@given(seeds)
def test_agrees_with_sampled_discrete(seed):
    rng = np.random.default_rng(seed)
    a, b = random_curve(rng, 2, 2), random_curve(rng, 2, 2)
    h = 2e-3
    P, Q = sample(a, h), sample(b, h)
    dd = discrete_frechet(P, Q)
    slack = 2 * max(P.max_edge(), Q.max_edge()) + 1e-9
    for d in (dd * 0.8, dd * 1.25):
        if abs(d - dd) <= slack:
            continue
        try:
            assert decide(a, b, d) == (d > dd)
        except CriticalDelta:
            pass
