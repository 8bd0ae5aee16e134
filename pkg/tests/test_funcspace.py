import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dissext.funcspace import (FuncExpr, GridFunction, NonIntegrableSingularity,
                               ToleranceNotMet, differentiate, endpoint_exponent,
                               inner_product, integrate, integrate_abs2,
                               quadrature_graded, taylor_at_zero)

import oracles

P = FuncExpr.power
HALF = (0.0, math.inf)

alphas = st.floats(0.0, 3.0)
coefs = st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False)
betas = st.floats(-2.0, 2.0)


@st.composite
def funcexprs(draw, max_terms=3):
    n = draw(st.integers(1, max_terms))
    f = FuncExpr.zero()
    for _ in range(n):
        f = f + P(draw(alphas), draw(coefs), draw(betas))
    return f


def assert_same(f, g, xs=np.linspace(0.05, 1.0, 9)):
    np.testing.assert_allclose(f(xs), g(xs), rtol=1e-12, atol=1e-12)


def test_differentiate_examples():
    assert_same(differentiate(P(1.0)), P(0.0))
    e = P(0.0, beta=-1.0, interval=HALF)
    np.testing.assert_allclose(differentiate(e)(np.array([0.5, 2.0])), -e(np.array([0.5, 2.0])))
    f = P(1.5, beta=2.0)
    assert_same(differentiate(f), P(0.5, 1.5, 2.0) + P(1.5, 2.0, 2.0))


def test_integrate_abs2_examples():
    assert integrate_abs2(P(1.0), 1.0) == pytest.approx(oracles.INT_X3, rel=1e-12)
    assert integrate_abs2(P(0.0, beta=-1.0, interval=HALF)) == pytest.approx(oracles.INT_EXP_HALFLINE, rel=1e-12)
    assert integrate_abs2(P(-0.25)) == pytest.approx(oracles.INT_X_MINUS_HALF, rel=1e-12)


def test_inner_product_examples():
    assert inner_product(P(1.0), P(1.0, 2.5j)) == pytest.approx(2.5j / 3)
    assert inner_product(P(0.0), P(1.0)) == pytest.approx(0.5)


def test_non_integrable_rejected():
    with pytest.raises(NonIntegrableSingularity):
        integrate_abs2(P(-0.5))
    with pytest.raises(NonIntegrableSingularity):
        integrate(P(0.0, interval=HALF))


def test_endpoint_exponent_examples():
    lead, c = endpoint_exponent(P(0.5) - P(1.5), 0)
    assert (lead, c) == (pytest.approx(0.5), pytest.approx(1.0))
    lead, c = endpoint_exponent(P(1.0, beta=1.0), 0)
    assert (lead, c) == (pytest.approx(1.0), pytest.approx(1.0))
    lead, c = endpoint_exponent(P(2.0, 3.0) + P(2.0), 0)
    assert (lead, c) == (pytest.approx(2.0), pytest.approx(4.0))
    assert endpoint_exponent(P(1.0, beta=1.0), 1)[1] == pytest.approx(math.e)


def test_cancellation_through_taylor_expansion():
    # x^(1/2) (e^x - 1) starts at x^(3/2)
    f = P(0.5, beta=1.0) - P(0.5)
    lead, c = endpoint_exponent(f, 0)
    assert lead == pytest.approx(1.5) and c == pytest.approx(1.0)
    closed = integrate_abs2(differentiate(f))
    quad = quadrature_graded(lambda x: np.abs(differentiate(f)(x)) ** 2, (0, 1), 1.0).real
    assert closed == pytest.approx(quad, rel=1e-9)


def test_taylor_at_zero_of_exponential():
    coef, order = taylor_at_zero(P(0.5, beta=2.0), order=6)
    assert order == 6
    for k in range(7):
        assert coef[0.5 + k] == pytest.approx(2.0 ** k / math.factorial(k))


def test_quadrature_examples():
    assert quadrature_graded(lambda x: x ** -0.5, (0, 1), -0.5).real == pytest.approx(2.0, rel=1e-9)
    assert quadrature_graded(lambda x: x, (0, 1), 1.0).real == pytest.approx(0.5, rel=1e-12)
    g = 0.3
    val = quadrature_graded(lambda x: x ** (2 * g - 1), (0, 1), 2 * g - 1).real
    assert val == pytest.approx(oracles.INT_X_2G_MINUS_1_G03, rel=1e-9)


def test_quadrature_reports_failure():
    with pytest.raises(ToleranceNotMet) as info:
        quadrature_graded(lambda x: np.sin(1 / x), (0, 1), 0.0, max_depth=8)
    assert info.value.estimate is not None


@given(funcexprs())
def test_closed_form_matches_quadrature(f):
    closed = integrate_abs2(f)
    quad = quadrature_graded(lambda x: np.abs(f(x)) ** 2, (0, 1), 0.0).real
    assert closed == pytest.approx(quad, rel=1e-8, abs=1e-12)


@given(funcexprs(), funcexprs())
def test_conjugate_symmetry(f, g):
    assert inner_product(f, g) == pytest.approx(inner_product(g, f).conjugate(), rel=1e-10, abs=1e-12)


@given(funcexprs(2), funcexprs(2), funcexprs(2), coefs, coefs)
def test_sesquilinearity(f, g, h, a, b):
    lhs = inner_product(f, a * g + b * h)
    assert lhs == pytest.approx(a * inner_product(f, g) + b * inner_product(f, h), rel=1e-10, abs=1e-10)
    lhs = inner_product(a * g + b * h, f)
    rhs = a.conjugate() * inner_product(g, f) + b.conjugate() * inner_product(h, f)
    assert lhs == pytest.approx(rhs, rel=1e-10, abs=1e-10)


@given(funcexprs())
def test_derivative_integrates_to_boundary_values(f):
    f = f.times_power(0.25)           # leading power > 0
    sq = f.conj() * f
    val = integrate(differentiate(sq)).real
    assert val == pytest.approx(abs(f.value_at(1.0)) ** 2 - abs(f.value_at(0.0)) ** 2, abs=1e-9)


@given(funcexprs())
def test_json_roundtrip(f):
    g = FuncExpr.from_json(f.to_json(), f.interval)
    assert g.terms == f.terms


def test_l2_violations_flagged():
    assert P(-0.6).l2_violations()
    assert not P(-0.4).l2_violations()
    assert P(0.0, interval=HALF).l2_violations()
    d = differentiate(P(0.5))
    assert d.l2_violations()         # x^(-1/2) flagged, not rejected


def test_grid_function_interpolates():
    g = GridFunction(np.array([0.0, 1.0, 2.0]), np.array([0.0, 2.0, 0.0]))
    np.testing.assert_allclose(g(np.array([0.5, 1.5])), [1.0, 1.0])
