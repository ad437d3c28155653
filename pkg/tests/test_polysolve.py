from math import comb, sqrt

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.optimize import brentq

from smoothfrechet import PolynomialPiece
from smoothfrechet.errors import ClusterUnresolved
from smoothfrechet.polysolve import (curve_sphere_intersections, isolate_roots,
                                     solve_extrema_system, solve_singularities)


def monomial_to_bernstein(a):
    n = len(a) - 1
    return np.array([sum(comb(i, j) / comb(n, j) * a[j] for j in range(i + 1))
                     for i in range(n + 1)])


def sign_change_roots(fn, samples=1_000_000):
    t = np.linspace(0.0, 1.0, samples + 1)
    v = fn(t)
    idx = np.flatnonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)
    return [brentq(lambda s: float(fn(np.array([s]))[0]), t[k], t[k + 1], xtol=1e-15)
            for k in idx]


def test_isolate_simple_cases():
    # t^2 - 0.25 and t^2 + 1 in Bernstein form
    roots = isolate_roots(monomial_to_bernstein([-0.25, 0.0, 1.0]))
    assert len(roots) == 1 and roots[0].lo <= 0.5 <= roots[0].hi
    assert isolate_roots(monomial_to_bernstein([1.0, 0.0, 1.0])) == []


def test_isolate_three_roots():
    poly = np.polynomial.polynomial.polyfromroots([0.2, 0.5, 0.8])
    roots = isolate_roots(monomial_to_bernstein(poly))
    np.testing.assert_allclose([r.mid for r in roots], [0.2, 0.5, 0.8], atol=1e-12)
    # no sign change of the power form outside the returned brackets
    for t in sign_change_roots(lambda t: np.polynomial.polynomial.polyval(t, poly)):
        assert any(r.lo - 1e-12 <= t <= r.hi + 1e-12 for r in roots)


def test_sphere_intersection_examples():
    seg = PolynomialPiece([[0, 0], [1, 0]])
    assert curve_sphere_intersections(seg, [0, 0], 0.5) == [(pytest.approx(0.5, abs=1e-12), False)]
    hits = curve_sphere_intersections(seg, [0.5, 0.5], 0.5)
    assert len(hits) == 1 and hits[0][1] and hits[0][0] == pytest.approx(0.5, abs=1e-7)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sphere_intersection_random_cubic(seed):
    rng = np.random.default_rng(seed)
    p = PolynomialPiece(rng.normal(size=(4, 2)))
    center = p(rng.uniform()) + rng.normal(scale=0.3, size=2)
    delta = float(rng.uniform(0.3, 1.0))

    def fn(t):
        d = p.sample(t) - center
        return np.einsum("ij,ij->i", d, d) - delta * delta

    expected = sign_change_roots(fn)
    got = [t for t, touch in curve_sphere_intersections(p, center, delta) if not touch]
    assert len(got) == len(expected)
    np.testing.assert_allclose(got, expected, atol=1e-9)


gap = (PolynomialPiece([[0, 0], [1, 0]]), PolynomialPiece([[0, 1], [1, 1]]))
parabola = (PolynomialPiece([[0, 0], [1, 0]]), PolynomialPiece([[0, 1], [0.5, 0], [1, 1]]))


def test_extrema_constant_gap_has_none():
    for axis in ("horizontal", "vertical"):
        assert solve_extrema_system(*gap, 1.25, axis) == []


def test_extrema_parabola_on_diagonal():
    # f_x = 2 (x - y) vanishes on the diagonal, where f = g(y)^2 with g = 0.5 + 2 (y - 0.5)^2
    sols = solve_extrema_system(*parabola, 0.6, "horizontal")
    s = sorted((p.t1, p.t2) for p in sols)
    r = sqrt(0.05)
    np.testing.assert_allclose(s, [[0.5 - r, 0.5 - r], [0.5 + r, 0.5 + r]], atol=1e-10)


def test_extrema_parabola_vertical_tangent():
    # f_y = 0 gives x = y + g g'; on it f = g^2 (1 + g'^2)
    def h(y):
        g, dg = 0.5 + 2 * (y - 0.5) ** 2, 4 * (y - 0.5)
        return g * g * (1 + dg * dg) - 0.36

    ys = [brentq(h, 0.0, 0.5, xtol=1e-15), brentq(h, 0.5, 1.0, xtol=1e-15)]
    expected = [(y + (0.5 + 2 * (y - 0.5) ** 2) * 4 * (y - 0.5), y) for y in ys]
    sols = solve_extrema_system(*parabola, 0.6, "vertical")
    got = sorted((p.t1, p.t2) for p in sols)
    np.testing.assert_allclose(got, sorted(expected), atol=1e-10)


def test_singularities_examples():
    line = solve_singularities(*gap)
    assert len(line) == 1 and line[0].degenerate
    assert line[0].value == pytest.approx(1.0, abs=1e-12)
    apex = solve_singularities(*parabola)
    assert len(apex) == 1
    assert (apex[0].t1, apex[0].t2) == (pytest.approx(0.5, abs=1e-10), pytest.approx(0.5, abs=1e-10))
    assert apex[0].value == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_singularities_random_cubics(seed):
    rng = np.random.default_rng(100 + seed)
    a = PolynomialPiece(rng.normal(size=(4, 2)))
    b = PolynomialPiece(rng.normal(size=(4, 2)))
    sols = solve_singularities(a, b)
    # bidegree (5, 6) and (6, 5): at most 5*5 + 6*6 isolated solutions
    assert len(sols) <= 61
    for s in sols:
        da, db = a(s.t1) - b(s.t2), None
        ja = 2 * da @ a.derivative()(s.t1)
        jb = -2 * da @ b.derivative()(s.t2)
        assert abs(ja) <= 1e-9 and abs(jb) <= 1e-9


@given(st.integers(0, 5000), st.floats(0.2, 1.5))
def test_extrema_lie_on_level_set(seed, delta):
    rng = np.random.default_rng(seed)
    a = PolynomialPiece(rng.normal(size=(4, 2)))
    b = PolynomialPiece(rng.normal(size=(3, 2)))
    for axis in ("horizontal", "vertical"):
        try:
            sols = solve_extrema_system(a, b, delta, axis)
        except ClusterUnresolved:
            assume(False)
        scale = max(1.0, float(np.max(np.abs(a.control_points))) ** 2,
                    float(np.max(np.abs(b.control_points))) ** 2)
        for s in sols:
            d = a(s.t1) - b(s.t2)
            assert abs(d @ d - delta * delta) <= 1e-9 * max(1.0, delta * delta)
            grad = 2 * d @ a.derivative()(s.t1) if axis == "horizontal" \
                else -2 * d @ b.derivative()(s.t2)
            assert abs(grad) <= 1e-9 * scale
