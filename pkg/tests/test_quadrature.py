import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rotsym.errors import QuadratureFailure
from rotsym.quadrature import (
    GAUSS_WEIGHTS,
    KRONROD_WEIGHTS,
    NODES,
    CumulativeIntegral,
    gauss_kronrod,
    invert_monotone,
)


def test_rule_weights_integrate_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    # Kronrod rule is exact for degree 22
    assert KRONROD_WEIGHTS @ NODES ** 22 == pytest.approx(2.0 / 23, rel=1e-13)


def test_batch_of_intervals():
    a = np.array([0.0, 0.0, 1.0])
    b = np.array([math.pi, 1.0, 1.0])
    out = gauss_kronrod(np.sin, a, b)
    assert out == pytest.approx([2.0, 1 - math.cos(1.0), 0.0], rel=1e-12)


def test_sharp_peak_is_resolved_adaptively():
    f = lambda x: 1e-4 / (x * x + 1e-8)
    assert gauss_kronrod(f, -1.0, 1.0) == pytest.approx(2 * math.atan(1e4), rel=1e-10)


def test_nonfinite_integrand_raises():
    with pytest.raises(QuadratureFailure):
        gauss_kronrod(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_cumulative_matches_antiderivative():
    nodes = np.linspace(0.0, 3.0, 7)
    ci = CumulativeIntegral(np.exp, nodes)
    assert ci.table == pytest.approx(np.expm1(nodes), rel=1e-12)
    x = np.array([0.1, 1.7, 2.99, 3.5])
    assert ci(x) == pytest.approx(np.expm1(x), rel=1e-12)
    assert isinstance(ci(1.0), float)
    lo, hi = ci.bracket(np.array([1.0, 100.0]))
    assert lo[0] <= math.log1p(1.0) <= hi[0]
    assert np.isnan(hi[1])


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e3))
def test_inverse_of_cube(target):
    x = invert_monotone(lambda x: x ** 3, lambda x: 3 * x ** 2, target, 0.0, 20.0, ftol=1e-14 * target)
    assert x[0] ** 3 == pytest.approx(target, rel=1e-12)


def test_inverse_with_infinite_slope_at_bracket_end():
    # derivative blows up at 0, so Newton must fall back to bisection there
    f = lambda x: np.sqrt(x)
    df = lambda x: 0.5 / np.sqrt(x)
    x = invert_monotone(f, df, np.array([1e-5, 0.3]), 0.0, 1.0, ftol=1e-15)
    assert x == pytest.approx([1e-10, 0.09], rel=1e-9)
