import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import iv, ivp

from dissext.errors import DomainViolation, TruncationTooSmall
from dissext.funcspace import FuncExpr
from dissext.schrodinger import (ACCRETIVE, BOUNDARY, HALF_LINE, NOT_ACCRETIVE, PotentialSpec,
                                 accretive_check, accretive_interval, friedrichs_form,
                                 krein_form, maximality_note, solve_eta)

import oracles


def E(alpha=0.0, c=1.0, beta=-1.0):
    return FuncExpr.power(alpha, c, beta, interval=HALF_LINE)


V1 = PotentialSpec.constant(1.0)
_ETA1 = solve_eta(V1)


@pytest.fixture(scope="module")
def eta1():
    return solve_eta(V1)


@pytest.mark.parametrize("value", [1.0, 4.0])
def test_eta_constant(value):
    sol = solve_eta(PotentialSpec.constant(value))
    assert sol.eta_prime_0 == pytest.approx(oracles.ETA_PRIME[value], abs=1e-8)
    x = sol.grid.nodes[:200]
    np.testing.assert_allclose(sol.grid.values[:200], np.exp(-math.sqrt(value) * x), atol=1e-8)
    assert sol.grid.values[0] == 1.0


def test_eta_truncation_independent():
    a = solve_eta(V1, L=40.0)
    b = solve_eta(V1, L=80.0)
    assert abs(a.eta_prime_0 - b.eta_prime_0) < 1e-10


def test_eta_variable_potential():
    pot = PotentialSpec.from_funcexpr(_one() + E(), 1.0, 2.0)        # 1 + e^{-x}
    sol = solve_eta(pot)
    ref = -ivp(2, 2.0) / iv(2, 2.0)
    assert ref == pytest.approx(oracles.ETA_PRIME_ONE_PLUS_EXP, abs=1e-13)
    assert sol.eta_prime_0 == pytest.approx(ref, abs=1e-9)


def _one():
    # constant 1 is not square-integrable on the half-line, but potentials need not be
    return FuncExpr.power(0.0, 1.0, 0.0, interval=HALF_LINE)


def test_eta_grid_potential_matches_constant():
    x = np.linspace(0, 100, 11)
    sol = solve_eta(PotentialSpec.from_grid(x, np.full(11, 4.0)))
    assert sol.eta_prime_0 == pytest.approx(-2.0, abs=1e-8)


def test_truncation_too_small():
    with pytest.raises(TruncationTooSmall):
        solve_eta(V1, L=5.0)


def test_potential_bounds_validated():
    with pytest.raises(ValueError):
        PotentialSpec.from_funcexpr(_one(), 2.0, 3.0)


def test_friedrichs_examples():
    val = friedrichs_form(E(1.0), V1)
    assert val == pytest.approx(oracles.FRIEDRICHS_X_EXP, rel=1e-12)
    assert friedrichs_form(FuncExpr.zero(HALF_LINE), V1) == 0
    assert friedrichs_form(2 * E(1.0), V1) == pytest.approx(4 * val)
    with pytest.raises(DomainViolation):
        friedrichs_form(E(0.0), V1)


SAMPLES = [E(1.0), E(2.0, 1j), E(1.0, 1, -2.0), E(0.6) + E(3.0, 2.0), E(1.0, 1 - 1j, -0.5),
           E(0.0, 1, -1) - E(0.0, 1, -2), E(1.5, 0.3), E(2.0) - E(1.0, 1, -3.0),
           E(4.0, 0.1, -1.5), E(0.75, 1j, -1.0)]


@pytest.mark.parametrize("f", SAMPLES)
def test_krein_equals_friedrichs_on_h10(f, eta1):
    a = krein_form(f, eta1.eta_prime_0, V1)
    b = friedrichs_form(f, V1)
    assert a == pytest.approx(b, rel=1e-9)


def test_krein_annihilates_eta(eta1):
    assert abs(krein_form(E(), eta1.eta_prime_0, V1)) <= 1e-6


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 3.0))
def test_krein_nonnegative(a, b, beta):
    f = E(0.0, complex(a, b), -beta) + E(1.0, 1.0, -1.0)
    assert krein_form(f, -1.0, V1) >= -1e-8 * max(1.0, abs(a) + abs(b))


def test_accretive_examples(eta1):
    rep = accretive_check(E(), FuncExpr.zero(HALF_LINE), V1, eta=eta1)
    assert rep.lhs == pytest.approx(oracles.ACCRETIVE_EQUALITY, abs=1e-9)
    assert rep.rhs == pytest.approx(oracles.ACCRETIVE_EQUALITY, abs=1e-12)
    assert rep.decision == BOUNDARY
    assert accretive_check(E(), E(1.0, 4.0), V1, eta=eta1).decision == ACCRETIVE
    assert accretive_check(E(), E(1.0, 9.0), V1, eta=eta1).decision == NOT_ACCRETIVE


def test_accretive_interval_matches_bisection(eta1):
    lo, hi = accretive_interval(E(), E(1.0), V1, eta1.eta_prime_0)
    assert (lo, hi) == (pytest.approx(0.0, abs=1e-9), pytest.approx(8.0, rel=1e-9))
    a, b = 4.0, 20.0
    for _ in range(60):
        m = 0.5 * (a + b)
        if accretive_check(E(), E(1.0, m), V1, eta=eta1).margin > 0:
            a = m
        else:
            b = m
    assert a == pytest.approx(hi, abs=1e-6)


@given(st.floats(0.1, 10.0), st.floats(-10, 10))
def test_scaling_invariance(lam, c):
    v, ell = E(), E(1.0, c)
    a = accretive_check(v, ell, V1, eta=_ETA1)
    b = accretive_check(lam * v, lam * ell, V1, eta=_ETA1)
    assert a.decision == b.decision
    assert b.margin == pytest.approx(lam ** 2 * a.margin, rel=1e-9, abs=1e-12)



def test_domain_checks():
    with pytest.raises(DomainViolation):
        accretive_check(E(2.0), FuncExpr.zero(HALF_LINE), V1, eta=_ETA1)   # v in H^2_0
    with pytest.raises(DomainViolation):
        accretive_check(E(), E(0.0), V1, eta=_ETA1)                       # l(0) != 0
    with pytest.raises(DomainViolation):
        accretive_check(E(), E(1.5), V1, eta=_ETA1)                       # l'' ~ x^(-1/2), not in L^2
    # v(0) = 0 with v'(0) != 0 is allowed
    assert accretive_check(E(1.0), FuncExpr.zero(HALF_LINE), V1, eta=_ETA1).decision == NOT_ACCRETIVE


def test_maximality_note():
    note = maximality_note(PotentialSpec.constant(4.0))
    assert note["defect_dimension"] == 1
