import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidq.qalgebra import (COVECTOR, VECTOR, CommutingSeries, NCSeries, Parity, TensorSeries,
                             format_series, normal_multiply, parity_project, psi_iso,
                             scale_arguments)
from braidq.qspecial import gaussian
from braidq.scalars import ONE, QScalar

import oracles

Q = QScalar.q_power(1)


def gen(i, n=3, N=8, kind=COVECTOR):
    return NCSeries.generator(kind, n, N, i)


def mono(E, kind=COVECTOR, N=12):
    return NCSeries.monomial(kind, len(E), N, tuple(E))


def test_normal_multiply_examples():
    x1, x2, x3 = gen(1), gen(2), gen(3)
    assert normal_multiply(x2, x1) == Q * x1 * x2
    assert normal_multiply(x1, x1) == mono((2, 0, 0), N=8)
    assert (x2 * x3) * (x1 * x1) == Q ** 4 * mono((2, 1, 1), N=8)


def test_vector_order_is_descending():
    d1, d2 = gen(1, 2, 4, VECTOR), gen(2, 2, 4, VECTOR)
    assert d1 * d2 == Q * (d2 * d1)
    assert str(d1 * d2) == "q*d2*d1"


def test_truncation_flag():
    x1 = gen(1, 1, 2)
    assert not (x1 * x1).truncated
    assert (x1 * x1 * x1).truncated


exponents = st.lists(st.integers(0, 2), min_size=3, max_size=3)


@given(exponents, exponents, st.sampled_from([COVECTOR, VECTOR]))
@settings(max_examples=80, deadline=None)
def test_product_matches_word_rewriting(E, F, kind):
    prod = mono(E, kind) * mono(F, kind)
    k, G = oracles.rewrite_word(oracles.word_of(E, kind) + oracles.word_of(F, kind), kind)
    G = tuple(G) + (0,) * (3 - len(G))
    assert prod == NCSeries.monomial(kind, 3, 12, G, Q ** k)


def series(draw_terms, kind=COVECTOR):
    return NCSeries(kind, 2, 6, {tuple(E): QScalar(c) for E, c in draw_terms})


small_series = st.lists(st.tuples(st.tuples(st.integers(0, 2), st.integers(0, 2)),
                                  st.integers(-3, 3)), max_size=4).map(series)


@given(small_series, small_series, small_series)
@settings(max_examples=50, deadline=None)
def test_multiplication_associative_and_distributive(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


def test_parity_projection():
    x1, x2 = gen(1, 2, 6), gen(2, 2, 6)
    assert parity_project(x1 + x1 * x1, Parity.even(2)) == x1 * x1
    f = x1 * x2 * x2 + x1 * x1
    assert parity_project(f, Parity.parse("-+")) == x1 * x2 * x2


@given(small_series, st.integers(0, 1))
@settings(max_examples=40, deadline=None)
def test_opposite_parity_projections_annihilate(f, j):
    plus = ["+", "+"]
    minus = ["+", "+"]
    minus[j] = "-"
    once = parity_project(parity_project(f, Parity(tuple(minus))), Parity(tuple(plus)))
    assert once == NCSeries.zero(COVECTOR, 2, 6)
    total = sum((parity_project(f, Parity(s)) for s in (("+", "+"), ("+", "-"), ("-", "+"), ("-", "-"))),
                NCSeries.zero(COVECTOR, 2, 6))
    assert total == f


def test_scale_arguments():
    x1, x2 = gen(1, 2, 6), gen(2, 2, 6)
    f = x1 * x2 + x1
    assert scale_arguments(f, [1, 1]) == f
    assert scale_arguments(x1 * x2, [2, 3]) == 6 * (x1 * x2)
    g = gaussian("g", 2, 6)
    assert scale_arguments(g, [Q, Q]) == gaussian("g", 2, 6, scale=[Q, Q])
    with pytest.raises(ValueError):
        scale_arguments(f, [1, 0])


def test_psi_examples():
    one = NCSeries.one(COVECTOR, 2, 4)
    assert psi_iso(one) == NCSeries.one(VECTOR, 2, 4)
    x1, x2 = gen(1, 2, 4), gen(2, 2, 4)
    assert psi_iso(x1) == QScalar.q_power(-0.5) * gen(2, 2, 4, VECTOR)
    assert psi_iso(x1 * x2) == psi_iso(x1) * psi_iso(x2)


@given(small_series, small_series)
@settings(max_examples=40, deadline=None)
def test_psi_is_multiplicative_and_invertible(f, g):
    assert psi_iso(f * g) == psi_iso(f) * psi_iso(g)
    assert psi_iso(psi_iso(f), "inverse") == f


def test_psi_wrong_kind():
    with pytest.raises(ValueError):
        psi_iso(gen(1, 2, 4, VECTOR))


def test_tensor_and_commuting_containers():
    x1 = gen(1, 2, 4)
    t = TensorSeries.pure(x1, NCSeries.one(VECTOR, 2, 4))
    assert t.terms == {((1, 0), (0, 0)): ONE}
    F = CommutingSeries(2, 3, {(1, 1): 2, (2, 2): 5})
    assert F.coefficient((1, 1)) == QScalar(2)
    assert F.coefficient((2, 2)).is_zero()


def test_format_series():
    x1, x2 = gen(1, 2, 4), gen(2, 2, 4)
    assert format_series(x2 * x1 - x1) == "-x1 + q*x1*x2"
