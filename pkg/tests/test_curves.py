import json
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothfrechet import PiecewiseCurve, PolynomialPiece, evaluate
from smoothfrechet.curves import (arc_length, curve_from_dict, curve_to_dict, derivative,
                                  dist_sq, load_curve, save_curve)
from smoothfrechet.errors import CurveValidationError, UnsupportedNorm
from smoothfrechet.curves import NormConfig


def monomial_eval(cp, t):
    """Horner evaluation after expanding the Bernstein basis into powers of t."""
    k = len(cp) - 1
    coef = np.zeros((k + 1, cp.shape[1]))
    for i in range(k + 1):
        # C(k, i) t^i (1 - t)^(k - i) = sum_j C(k, i) C(k - i, j) (-1)^j t^(i + j)
        for j in range(k - i + 1):
            coef[i + j] += comb(k, i) * comb(k - i, j) * (-1) ** j * cp[i]
    out = np.zeros(cp.shape[1])
    for c in coef[::-1]:
        out = out * t + c
    return out


def test_quadratic_endpoint_and_midpoint():
    c = PiecewiseCurve([[[0, 0], [1, 2], [2, 0]]])
    np.testing.assert_array_equal(evaluate(c, 0.0), [0.0, 0.0])
    np.testing.assert_allclose(evaluate(c, 0.5), [1.0, 1.0], atol=1e-15)


def test_cubic_matches_monomial_horner():
    rng = np.random.default_rng(3)
    cp = rng.normal(size=(4, 3))
    c = PiecewiseCurve([cp])
    np.testing.assert_allclose(evaluate(c, 0.37), monomial_eval(cp, 0.37), atol=1e-12)


def test_derivative_examples():
    d = derivative(PolynomialPiece([[0, 0], [1, 0]]))
    np.testing.assert_allclose(d.control_points, [[1.0, 0.0]])
    q = derivative(PolynomialPiece([[0, 0], [1, 2], [2, 0]]))
    np.testing.assert_allclose(q(0.5), [2.0, 0.0], atol=1e-15)


def test_derivative_matches_finite_differences():
    rng = np.random.default_rng(11)
    p = PolynomialPiece(rng.normal(size=(5, 2)))
    d = derivative(p)
    h = 1e-6
    for t in np.linspace(0.1, 0.9, 7):
        fd = (p(t + h) - p(t - h)) / (2 * h)
        np.testing.assert_allclose(d(t), fd, atol=1e-6)


def test_dist_sq_examples():
    a = PiecewiseCurve.polyline([[0, 0], [1, 0]])
    b = PiecewiseCurve.polyline([[0, 1], [1, 1]])
    assert dist_sq(a, 0.3, b, 0.3) == pytest.approx(1.0, abs=1e-15)
    assert dist_sq(a, 0.4, a, 0.4) == 0.0
    rng = np.random.default_rng(5)
    c1 = PiecewiseCurve([rng.normal(size=(4, 3))])
    c2 = PiecewiseCurve([rng.normal(size=(3, 3))])
    d = evaluate(c1, 0.2) - evaluate(c2, 0.7)
    assert dist_sq(c1, 0.2, c2, 0.7) == pytest.approx(float(np.sum(d * d)), rel=1e-14)


def test_arc_length_examples():
    assert arc_length(PolynomialPiece([[0, 0], [3, 4]])) == pytest.approx(5.0, rel=1e-14)
    tiny = PolynomialPiece([[1.0, 1.0], [1.0, 1.0]], validate=False)
    assert 0.0 <= arc_length(tiny) <= 1e-12
    p = PolynomialPiece([[0, 0], [1, 1], [2, 0]])
    # composite Simpson on 10^6 panels of the speed |P'(t)| = 2 sqrt(1 + (1 - 2t)^2)
    n = 1_000_000
    t = np.linspace(0.0, 1.0, n + 1)
    speed = 2.0 * np.sqrt(1.0 + (1.0 - 2.0 * t) ** 2)
    simpson = (speed[0] + speed[-1] + 4 * speed[1:-1:2].sum() + 2 * speed[2:-1:2].sum()) / (3 * n)
    assert arc_length(p) == pytest.approx(simpson, abs=1e-8)


def test_validation_and_norm():
    with pytest.raises(CurveValidationError):
        PiecewiseCurve([[[0, 0], [1, 0]], [[2, 0], [3, 0]]])
    with pytest.raises(CurveValidationError):
        PolynomialPiece([[0, 0]])
    with pytest.raises(UnsupportedNorm):
        NormConfig(p=1)


def test_json_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    first = rng.normal(size=(4, 2))
    second = np.vstack([first[-1], rng.normal(size=(2, 2))])
    c = PiecewiseCurve([first, second])
    path = tmp_path / "c.json"
    save_curve(c, path)
    assert load_curve(path) == c
    doc = curve_to_dict(c)
    assert json.loads(json.dumps(doc)) == doc
    doc["pieces"][0]["degree"] = 2
    with pytest.raises(CurveValidationError):
        curve_from_dict(doc)


pieces = st.integers(1, 3)
seeds = st.integers(0, 10_000)


@given(seeds, st.integers(1, 5), st.floats(0.01, 0.99))
def test_endpoint_interpolation(seed, degree, t):
    cp = np.random.default_rng(seed).normal(size=(degree + 1, 2))
    p = PolynomialPiece(cp)
    np.testing.assert_allclose(p(0.0), cp[0], atol=1e-14)
    np.testing.assert_allclose(p(1.0), cp[-1], atol=1e-14)


@given(seeds, st.floats(0.05, 0.95))
def test_subdivision_keeps_the_trace(seed, t):
    rng = np.random.default_rng(seed)
    p = PolynomialPiece(rng.normal(size=(4, 2)))
    left, right = p.subdivide(t)
    for u in rng.uniform(size=100):
        expected = p(u)
        got = left(u / t) if u <= t else right((u - t) / (1 - t))
        np.testing.assert_allclose(got, expected, atol=1e-12)
    assert left.length + right.length == pytest.approx(p.length, rel=1e-9)


@given(seeds, st.floats(0, 1), st.floats(0, 1))
def test_dist_sq_symmetric(seed, t1, t2):
    rng = np.random.default_rng(seed)
    a = PiecewiseCurve([rng.normal(size=(3, 2))])
    b = PiecewiseCurve([rng.normal(size=(4, 2))])
    assert dist_sq(a, t1, b, t2) == pytest.approx(dist_sq(b, t2, a, t1), rel=1e-14, abs=1e-300)
