import json

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidq.factored import AnalyticSeries
from braidq.fourier import (CLOSED_FORM_CASES, case_deviation, case_transform, closed_form,
                            family_M, inverse_transform, psi_integral_sides, rescale_output,
                            roundtrip, scaled_input, transform)
from braidq.qalgebra import VECTOR
from braidq.qspecial import gaussian_analytic
from braidq.scalars import current_q

import oracles


def test_forward_transform_of_gaussian_times_x():
    # FS of e(-x^2) x at gamma = 1 is -i c(1) E(-q^4 d^2) d
    q = current_q()
    res = case_transform("fs-hermite-c", (1,), N=6)
    c = oracles.c_closed(1, q)
    expect = {1: -1j * c, 3: -1j * c * (-q ** 4) / (1 - q ** 4),
              5: -1j * c * q ** 4 * q ** 8 / ((1 - q ** 4) * (1 - q ** 8))}
    for m, v in expect.items():
        assert abs(res.coefficient((m,)) - v) < 1e-18 * abs(v)
    assert set(res.series.terms) == {(1,), (3,), (5,)}


@pytest.mark.parametrize("case", CLOSED_FORM_CASES)
@pytest.mark.parametrize("A", [(0,), (1,), (2,), (3,), (1, 0)])
def test_transforms_match_closed_forms(case, A):
    assert case_deviation(case, A, 6) < 1e-20


def test_odd_input_gives_odd_output():
    res = transform("FS", family_M((3,)), [1], 7)
    assert res.series.terms
    assert all(sum(E) % 2 == 1 for E in res.series.terms)


def test_plancherel_leg_depends_only_on_parity():
    a = closed_form("fs-hermite-int", (0, 2), [1, 1], 6).plancherel
    b = closed_form("fs-hermite-int", (2, 4), [1, 1], 6).plancherel
    c = closed_form("fs-hermite-int", (1, 2), [1, 1], 6).plancherel
    assert a == b
    assert abs(a - c) > 1e-3


def test_inverse_of_zero():
    zero = AnalyticSeries(VECTOR, 1, [])
    assert not inverse_transform("GS", zero, [1], 6).series.terms


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        closed_form("7.1", (1,))


def test_result_json_shape():
    res = case_transform("fs-hermite-c", (0,), N=4)
    data = json.loads(res.dumps())
    assert data["kind"] == "FS"
    assert data["terms"][0]["exponents"] == [0]
    assert data["reliableDegree"] == 4


def test_roundtrip_single_gaussian():
    rep = roundtrip("weak-forward", [{0: 1}], (1,), N=12)
    assert rep.ok(1e-9)
    # frozen constant for q = 1/2
    assert abs(rep.constant - mpmath.mpf("2.5577117370130648992")) < 1e-18


scales = st.floats(min_value=0.5, max_value=1.6)


@given(scales, scales, st.sampled_from([(0, 0), (0, 2), (1, 0), (2, 1)]))
@settings(max_examples=8, deadline=None)
def test_scaling_law(a1, a2, A):
    a = [mpmath.mpf(a1), mpmath.mpf(a2)]
    f = family_M(A)
    lhs = transform("FS", scaled_input(f, a), [1, 1], 5)
    rhs = rescale_output(transform("FS", f, a, 5), a)
    scale = max(abs(c.evaluate()) for c in rhs.terms.values())
    assert lhs.series.max_abs_difference(rhs) <= 1e-10 * scale


@pytest.mark.parametrize("w", [(1, 1), ("0.7", "1.3")])
def test_left_and_transported_right_integrals_agree(w):
    lhs, rhs = psi_integral_sides(gaussian_analytic("g", 2), [mpmath.mpf(x) for x in w])
    assert abs(lhs - rhs) < 1e-10 * abs(lhs)
