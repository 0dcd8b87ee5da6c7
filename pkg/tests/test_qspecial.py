import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidq.calculus import eval_commuting, realize
from braidq.qalgebra import COVECTOR, VECTOR, CommutingSeries, NCSeries
from braidq.qspecial import (derivative_identity_holds, factorization_holds, gaussian,
                             gaussian_analytic, gaussian_joint, hermite, phi11_identity_suite,
                             q_exponential)
from braidq.scalars import ONE, QScalar, current_q

import oracles

Q = QScalar.q_power(1)
Q2 = Q * Q
Q4 = Q2 * Q2


def test_q_exponential_examples():
    zero = NCSeries.zero(COVECTOR, 1, 4)
    assert q_exponential("small", Q4, zero) == NCSeries.one(COVECTOR, 1, 4)
    x1 = NCSeries.generator(COVECTOR, 1, 4, 1)
    expect = NCSeries.one(COVECTOR, 1, 4) - x1 * x1 * (1 / (1 - Q4)) + (x1 ** 4) * (1 / ((1 - Q4) * (1 - Q4 * Q4)))
    assert q_exponential("small", Q4, -(x1 * x1)) == expect


def test_q_exponential_on_commuting_series():
    z = CommutingSeries(1, 6, {(1,): ONE})
    e = q_exponential("big", Q2, z)
    assert e.coefficient((2,)) == Q2 / ((1 - Q2) * (1 - Q4))


def test_q_exponential_rejects_constant_term():
    with pytest.raises(ValueError):
        q_exponential("small", Q4, NCSeries.one(COVECTOR, 1, 4))


def test_small_and_big_exponentials_are_inverse():
    # e_Q(y) E_Q(-y) = 1
    y = NCSeries.generator(COVECTOR, 1, 8, 1)
    prod = q_exponential("small", Q4, y) * q_exponential("big", Q4, -y)
    assert prod == NCSeries.one(COVECTOR, 1, 8)


@pytest.mark.parametrize("kind,side", [("g", COVECTOR), ("G", COVECTOR), ("g", VECTOR), ("G", VECTOR)])
def test_gaussian_factorization(kind, side):
    assert factorization_holds(kind, 2, 6, side)


def test_gaussian_coefficient_x1sq_x2sq():
    g = gaussian("g", 2, 4)
    assert g.coefficient((2, 2)) == gaussian_joint("g", 2, 4).coefficient((2, 2))
    assert g.coefficient((2, 2)) == ONE / ((1 - Q4) * (1 - Q4))


def test_derivative_of_gaussian():
    assert derivative_identity_holds(2, 6)


def test_realized_small_gaussian_is_separable():
    q = current_q()
    pt = [mpmath.mpf("0.3"), mpmath.mpf("-0.4")]
    v = gaussian_analytic("g", 2).evaluate_realized(pt)
    expect = oracles.small_e(-pt[0] ** 2, q ** 4) * oracles.small_e(-pt[1] ** 2, q ** 4)
    assert abs(v - expect) < 1e-18


def test_realized_big_gaussian_matches_truncated_series():
    pt = [mpmath.mpf("0.3"), mpmath.mpf("0.2")]
    v = gaussian_analytic("G", 2).evaluate_realized(pt)
    series = eval_commuting(realize(gaussian("G", 2, 16)), pt, tol=1e-12)
    assert abs(v - series.value) < 1e-12


def test_hermite_examples():
    assert hermite("II", 0, Q2).coefficients == {0: ONE}
    assert hermite("II", 1, Q2).coefficients == {1: ONE}
    h2 = hermite("II", 2, Q2)
    assert h2.coefficient(2) == ONE and h2.coefficient(0) == -(QScalar.q_power(-2) * (1 - Q2))
    h2 = hermite("I", 2, Q2)
    assert h2.coefficient(2) == ONE and h2.coefficient(0) == -(1 - Q2)
    assert str(hermite("II", 3, Q2)) == "z^3 + (-q^(-6) + 1)*z"


@pytest.mark.parametrize("kind", ["I", "II"])
def test_hermite_recurrence(kind):
    b = float(current_q()) ** 2
    ref = oracles.hermite_recurrence(kind, 9, b)
    for l in range(10):
        got = hermite(kind, l, Q2).numeric()
        for m in set(got) | set(ref[l]):
            want = mpmath.mpf(ref[l].get(m, 0).numerator) / ref[l].get(m, 0).denominator if m in ref[l] else 0
            assert abs(got.get(m, 0) - want) <= 1e-25 * max(1, abs(want))


@given(st.integers(0, 10), st.sampled_from(["I", "II"]))
@settings(max_examples=30, deadline=None)
def test_hermite_is_monic_with_fixed_parity(l, kind):
    h = hermite(kind, l, Q2)
    assert h.degree == l
    assert h.coefficient(l) == ONE
    assert all(m % 2 == l % 2 for m in h.coefficients)


def test_phi11_identities():
    assert phi11_identity_suite(0)["exact"]
    assert phi11_identity_suite(6)["exact"]
    control = phi11_identity_suite(6, perturb=True)
    assert not control["exact"]
    assert control["joint_vs_ordered"][0] > 0
