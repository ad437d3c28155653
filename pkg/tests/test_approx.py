import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smoothfrechet import Above, Below, ValueApprox, approx_compute, approx_decide, compute, decide
from smoothfrechet.errors import CriticalDelta, ParameterOutOfRange
from smoothfrechet.oracle import c_packed_curve


def packed_pair(seed, c=4, pieces=8):
    a = c_packed_curve(c, pieces, seed=seed)
    b = c_packed_curve(c, pieces, seed=seed + 1000)
    return a, b


def test_examples(gap_pair):
    a, b = gap_pair
    assert isinstance(approx_decide(a, a, 1.0, 0.5).variant, Below)
    out = approx_decide(a, b, 0.5, 0.1)
    assert isinstance(out.variant, Above) and out.variant.bound == pytest.approx(0.45)
    assert 1.0 <= approx_compute(a, b, 0.1) <= 1.1
    assert approx_compute(a, a, 0.1) == 0.0


def test_value_variant_when_endpoints_certify(gap_pair):
    out = approx_decide(*gap_pair, 1.01, 0.05)
    assert isinstance(out.variant, ValueApprox)
    assert 1.0 <= out.variant.value <= 1.05


def test_eps_validation(gap_pair):
    for eps in (0.0, 1.5):
        with pytest.raises(ParameterOutOfRange):
            approx_decide(*gap_pair, 1.0, eps)
        with pytest.raises(ParameterOutOfRange):
            approx_compute(*gap_pair, eps)


@pytest.mark.parametrize("seed", range(3))
def test_packed_pair_consistent_with_exact(seed):
    a, b = packed_pair(seed)
    d = compute(a, b)
    eps = 0.2
    for delta in (0.9 * d, d, 1.1 * d):
        out = approx_decide(a, b, delta, eps)
        if out.kind == "below":
            assert d <= delta * (1 + eps) + 1e-6
        elif out.kind == "above":
            assert d >= delta * (1 - eps) - 1e-6
        else:
            assert d - 1e-6 <= out.variant.value <= (1 + eps) * d + 1e-6
    v = approx_compute(a, b, eps)
    assert 1 - 1e-6 <= v / d <= 1 + eps + 1e-6


@settings(max_examples=10)
@given(st.integers(0, 10_000), st.floats(0.3, 3.0), st.sampled_from([0.1, 0.5]))
def test_never_contradicts_exact_outside_band(seed, scale, eps):
    a, b = packed_pair(seed, c=2, pieces=4)
    delta = scale * 0.1
    out = approx_decide(a, b, delta, eps)
    try:
        if not decide(a, b, delta * (1 + eps) * 1.001):
            assert out.kind == "above"
        if decide(a, b, delta * (1 - eps) * 0.999):
            assert out.kind != "above"
    except CriticalDelta:
        pass
