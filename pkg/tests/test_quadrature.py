import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sdkl.errors import IntegrationFailure
from sdkl.quadrature import QuadSpec, adaptive_quad, integrate

SPEC = QuadSpec()


def test_normal_density_integrates_to_one():
    res = integrate(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi),
                    -8.0, 8.0, SPEC)
    assert abs(res.value - 1.0) < 1e-8
    assert res.err >= 0.0


def test_polynomial_is_near_exact():
    # Kronrod-15 integrates polynomials up to degree 22 exactly
    res = adaptive_quad(lambda x: x ** 13, 0.0, 2.0, rel_tol=1e-9,
                        abs_tol=1e-13)
    assert res.value == pytest.approx(2.0 ** 14 / 14.0, rel=1e-13)


def test_reversed_and_empty_intervals():
    fwd = adaptive_quad(lambda x: x * x, 0.0, 1.0, rel_tol=1e-9,
                        abs_tol=1e-13)
    rev = adaptive_quad(lambda x: x * x, 1.0, 0.0, rel_tol=1e-9,
                        abs_tol=1e-13)
    assert rev.value == pytest.approx(-fwd.value, abs=1e-15)
    empty = adaptive_quad(lambda x: x * x, 1.0, 1.0, rel_tol=1e-9,
                          abs_tol=1e-13)
    assert empty.value == 0.0


def test_vector_valued_matches_componentwise():
    def vec(x):
        return np.stack([np.sin(x), np.cos(x), x ** 3], axis=-1)

    res = adaptive_quad(vec, 0.0, 2.0, rel_tol=1e-10, abs_tol=1e-14)
    expected = [1.0 - math.cos(2.0), math.sin(2.0), 4.0]
    assert np.allclose(res.value, expected, rtol=1e-9)
    assert res.value.shape == (3,)
    assert np.all(res.err >= 0.0)


def test_nonfinite_integrand_raises():
    with np.errstate(divide="ignore"), pytest.raises(IntegrationFailure):
        adaptive_quad(lambda x: 1.0 / (x - 0.34945), 0.0, 1.0,
                      rel_tol=1e-9, abs_tol=1e-13)


def test_budget_exhaustion_reports_achieved_error():
    # highly oscillatory with a tiny panel budget
    with pytest.raises(IntegrationFailure) as exc:
        adaptive_quad(lambda x: np.sin(1000.0 * x), 0.0, 10.0,
                      rel_tol=1e-12, abs_tol=1e-15, max_panels=8,
                      initial_panels=4)
    assert exc.value.err_estimate is not None
    assert exc.value.err_estimate > 0.0


@pytest.mark.parametrize("bad", [
    {"rel_tol": 0.0}, {"rel_tol": 1e-3}, {"tail_mass": 1e-9},
    {"max_depth": 3}, {"mc_draws": 10},
])
def test_quadspec_validation(bad):
    with pytest.raises(ValueError):
        QuadSpec(**bad)


@settings(max_examples=30, deadline=None)
@given(a=st.floats(-3, 3), width=st.floats(0.01, 5))
def test_exponential_closed_form(a, width):
    b = a + width
    res = adaptive_quad(np.exp, a, b, rel_tol=1e-10, abs_tol=1e-14)
    assert res.value == pytest.approx(math.exp(b) - math.exp(a), rel=1e-8)
