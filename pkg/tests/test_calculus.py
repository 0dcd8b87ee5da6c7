from itertools import permutations

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidq.calculus import (INTEGRABLE, NOT_LATTICE_INTEGRABLE, DivergenceError, act_left,
                             commuting_order_integral, eval_commuting, global_integral,
                             indefinite_integral, integrability_probe, jackson_1d,
                             lattice_order_integral, order_shift_gamma, partial_left,
                             partial_right, permutation_length, realize, right_global_integral, suitable_lattice)
from braidq.factored import AnalyticSeries, OneVar
from braidq.qalgebra import COVECTOR, VECTOR, CommutingSeries, NCSeries
from braidq.qspecial import gaussian, gaussian_analytic
from braidq.scalars import ONE, QScalar, current_q, gauss_constant, q_number

import oracles

Q = QScalar.q_power(1)
Q2 = Q * Q


def x(i, n=2, N=8):
    return NCSeries.generator(COVECTOR, n, N, i)


def d(i, n=2, N=8):
    return NCSeries.generator(VECTOR, n, N, i)


def rel(a, b):
    return abs(mpmath.mpmathify(a) - mpmath.mpmathify(b)) / abs(mpmath.mpmathify(b))


def test_partial_left_examples():
    assert partial_left(NCSeries.one(COVECTOR, 2, 4), 1) == NCSeries.zero(COVECTOR, 2, 4)
    assert partial_left(x(1) * x(1), 1) == (1 + Q2) * x(1)
    assert partial_left(x(1) * x(2), 2) == Q * x(1)


def test_partial_right_examples():
    assert partial_right(d(1), 1) == NCSeries.one(VECTOR, 2, 8)
    assert partial_right(d(2) * d(1), 2) == Q * d(1)
    assert partial_right(d(1) * d(1), 1) == (1 + Q2) * d(1)


def test_indefinite_integral_examples():
    assert indefinite_integral(x(1) ** 2, 1) == x(1) ** 3 * (1 / q_number(3, Q2))
    expect = QScalar.q_power(-1) / q_number(2, Q2) * (x(1) * x(2) * x(2))
    assert indefinite_integral(x(1) * x(2), 2) == expect
    zero = NCSeries.zero(COVECTOR, 2, 8)
    assert indefinite_integral(zero, 1) == zero


@given(st.lists(st.integers(0, 2), min_size=3, max_size=3), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_derivative_inverts_integral(E, i):
    f = NCSeries.monomial(COVECTOR, 3, 8, tuple(E))
    assert partial_left(indefinite_integral(f, i), i) == f


def test_realize_examples():
    assert realize(x(1) * x(2)) == CommutingSeries(2, 8, {(1, 1): ONE})
    assert act_left(x(2), CommutingSeries(2, 8, {(1, 0): ONE})) == CommutingSeries(2, 8, {(1, 1): Q})


@given(st.lists(st.integers(0, 2), min_size=2, max_size=2), st.lists(st.integers(0, 2), min_size=2, max_size=2))
@settings(max_examples=40, deadline=None)
def test_realization_is_a_representation(E, F):
    f = NCSeries.monomial(COVECTOR, 2, 8, tuple(E))
    g = NCSeries.monomial(COVECTOR, 2, 8, tuple(F))
    assert realize(f * g) == act_left(f, realize(g))


def test_eval_commuting():
    one = CommutingSeries(1, 4, {(0,): ONE})
    assert eval_commuting(one, [1]).value == 1
    q = current_q()
    small = eval_commuting(realize(gaussian("g", 1, 24)), [mpmath.mpf("0.25")], tol=1e-10)
    assert small.converged
    assert rel(small.value, oracles.small_e(-mpmath.mpf("0.0625"), q ** 4)) < 1e-10
    big = eval_commuting(realize(gaussian("G", 1, 24)), [mpmath.mpf("1.5")])
    assert big.converged
    assert rel(big.value, oracles.big_E(-mpmath.mpf("2.25"), q ** 4)) < 1e-25
    geometric = CommutingSeries(1, 20, {(k,): ONE for k in range(21)})
    assert not eval_commuting(geometric, [2]).converged


def test_small_gaussian_series_diverges_on_its_circle():
    # e_{q^4}(-z^2) has radius 1 in z^2, so the truncated series does not settle at z = 1
    assert not eval_commuting(realize(gaussian("g", 1, 24)), [1]).converged


def test_jackson_1d():
    q = current_q()
    e = OneVar.gaussian("e", 1)
    res = jackson_1d(e, 1)
    assert rel(res.value, oracles.c_closed(1, q)) < 1e-20
    assert res.k_plus > 0 and res.k_minus < 0
    odd = OneVar.gaussian("e", 1, {1: 1})
    assert abs(jackson_1d(odd, 1).value) < 1e-30
    big = OneVar.gaussian("E", q ** 4)
    assert rel(jackson_1d(big, 1).value, gauss_constant("b").evaluate()) < 1e-18


def test_jackson_divergence_witness():
    with pytest.raises(DivergenceError) as info:
        jackson_1d(OneVar.monomial(2), 1)
    assert info.value.witness["direction"] == -1


def test_global_integral_one_dim():
    g = gaussian_analytic("g", 1)
    assert rel(global_integral(g, [1], "I"), gauss_constant("c", 1).evaluate()) < 1e-18


def test_global_integral_second_moment():
    q = current_q()
    g = gaussian_analytic("g", 2)
    base = global_integral(g, [1, 1], "I")
    moment = global_integral(gaussian_analytic("g", 2, polys=[{2: 1}, {0: 1}]), [1, 1], "I")
    assert rel(moment, q ** -2 * (1 - q ** 2) * base) < 1e-18
    # frozen value of the realized integral of g at gamma = (1, 1), q = 1/2
    assert abs(base - mpmath.mpf("1.80273048524977802456116946424153")) < 1e-30
    assert rel(base, oracles.c_closed(q, q) * oracles.c_closed(1, q)) < 1e-18


def test_odd_series_vanish_under_even_variant():
    odd = gaussian_analytic("g", 2, polys=[{1: 1}, {2: 1}])
    assert global_integral(odd, [1, 1], "I'") == 0
    assert right_global_integral(gaussian_analytic("g", 2, side=VECTOR, polys=[{1: 1}, {0: 1}]),
                                 [1, 1], "J'") == 0


def test_right_global_integral():
    q = current_q()
    gv = gaussian_analytic("g", 1, side=VECTOR)
    assert rel(right_global_integral(gv, [1], "J"), oracles.c_closed(1, q)) < 1e-18
    gv2 = gaussian_analytic("g", 2, side=VECTOR)
    expect = oracles.c_closed(q, q) * oracles.c_closed(1, q)
    assert rel(right_global_integral(gv2, [1, 1], "J'"), expect) < 1e-18


def test_lattice_order_integral_example():
    q = current_q()
    f = AnalyticSeries.product(COVECTOR, 2, [("f", 2, OneVar.gaussian("E", q ** 4)),
                                             ("f", 1, OneVar.gaussian("E", q ** 4))])
    b = oracles.b_closed(q)
    assert rel(lattice_order_integral(f, (1, 2), [1, q]), q * b * b) < 1e-18


@pytest.mark.parametrize("sigma", list(permutations((1, 2))))
def test_odd_series_vanish_for_every_order(sigma):
    f = gaussian_analytic("g", 2, polys=[{0: 1}, {3: 1}])
    assert lattice_order_integral(f, sigma, [1, 1]) == 0


def test_commuting_order_integral():
    q = current_q()
    assert commuting_order_integral(CommutingSeries(2, 4, {}), (1, 2), [1, 1]) == 0
    f = gaussian_analytic("g", 2)
    expect = oracles.c_closed(1, q) ** 2
    for sigma in permutations((1, 2)):
        assert rel(commuting_order_integral(f, sigma, [1, 1]), expect) < 1e-18


def test_order_helpers():
    q = current_q()
    assert permutation_length((3, 1, 2)) == 2
    assert order_shift_gamma((2, 1), [1, 1]) == [q, 1]


def test_probe_verdicts():
    q = current_q()
    ok = integrability_probe(gaussian_analytic("g", 2), [mpmath.mpf("0.8"), mpmath.mpf("1.3")])
    assert ok.verdict == INTEGRABLE
    bad = integrability_probe(gaussian_analytic("G", 2), [q, 1])
    assert bad.verdict == NOT_LATTICE_INTEGRABLE
    assert bad.witness["points"]
    assert "latticeOrder" in bad.to_json()


@pytest.mark.parametrize("sigma", list(permutations((1, 2))))
def test_scaled_big_gaussians_are_order_integrable(sigma):
    # zeros of the big exponential have to sit on the lattice, so the lattice depends on sigma
    f = gaussian_analytic("G", 2, scale=[Q2, Q2])
    lattice, value = suitable_lattice(f, sigma)
    assert value != 0
    assert rel(lattice_order_integral(f, sigma, lattice), value) == 0
