import json
import subprocess
import sys

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from braidq.cli import (Call, ExpressionError, Gen, Prod, evaluate, main, parse_expression,
                        run_command, to_text)
from braidq.qalgebra import COVECTOR, NCSeries
from braidq.qspecial import gaussian
from braidq.scalars import QScalar

import oracles

Q = QScalar.q_power(1)


def test_parse_product():
    node = parse_expression("x1*x2")
    assert isinstance(node, Prod)
    assert [f for _, f in node.factors] == [Gen("x", 1), Gen("x", 2)]
    x1 = NCSeries.generator(COVECTOR, 2, 4, 1)
    x2 = NCSeries.generator(COVECTOR, 2, 4, 2)
    assert evaluate("x1*x2", n=2, N=4).series == x1 * x2
    assert evaluate("x2*x1", n=2, N=4).series == Q * (x1 * x2)


def test_gaussian_builder_composition():
    v = evaluate("gauss_g() * x1^2", n=2, N=6)
    x1 = NCSeries.generator(COVECTOR, 2, 6, 1)
    assert v.series == gaussian("g", 2, 6) * (x1 * x1)
    assert v.analytic is not None
    assert isinstance(parse_expression("gauss_g()"), Call)


@pytest.mark.parametrize("text", ["x1 +", "x1^", "foo(x1)", "x1 / x2", "(x1", "x0*", "2**3"])
def test_parse_errors(text):
    with pytest.raises(ExpressionError):
        evaluate(text, n=2, N=4)


def test_q_shorthand_and_rational_powers():
    assert evaluate("q4", n=1, N=2).series == evaluate("q^4", n=1, N=2).series
    assert evaluate("q^(-1/2)*x1", n=1, N=2).series == QScalar.q_power(-0.5) * NCSeries.generator(COVECTOR, 1, 2, 1)


def test_check_hopf_command():
    code, out = run_command(["check", "--suite", "hopf", "--n", "2", "--deg", "4"])
    assert code == 0
    assert out.startswith("PASS")


def test_integrate_second_moment():
    code, out = run_command(["integrate", "--variant", "Ip", "--expr", "gauss_g()*x1^2",
                             "--gamma", "1,1", "--q", "0.5", "--json"])
    assert code == 0
    data = json.loads(out)
    q = mpmath.mpf("0.5")
    base = oracles.c_closed(q, q) * oracles.c_closed(1, q)
    # x1^2 sits to the right of e(-x2^2), which costs an extra q^-2 next to q^-2 (1 - q^2)
    value = mpmath.mpf(data["value"]["re"])
    assert abs(value - q ** -4 * (1 - q ** 2) * base) < 1e-18 * value
    assert data["reliableDigits"] >= 18


def test_integrate_interleaved_moment_matches_moment_formula():
    code, out = run_command(["integrate", "--variant", "I", "--expr",
                             "eq_small(q4,-x1^2)*x1^2*eq_small(q4,-x2^2)", "--gamma", "1,1", "--json"])
    q = mpmath.mpf("0.5")
    base = oracles.c_closed(q, q) * oracles.c_closed(1, q)
    assert code == 0
    value = mpmath.mpf(json.loads(out)["value"]["re"])
    assert abs(value - q ** -2 * (1 - q ** 2) * base) < 1e-18 * value


def test_transform_json_matches_closed_form():
    code, out = run_command(["transform", "--kind", "FS", "--expr", "eq_small(q4,-x1^2)", "--gamma", "1",
                             "--q", "0.5", "--deg", "8", "--json"])
    assert code == 0
    data = json.loads(out)
    terms = {tuple(t["exponents"]): mpmath.mpf(t["re"]) for t in data["terms"]}
    q = mpmath.mpf("0.5")
    c = oracles.c_closed(1, q)
    assert abs(terms[(0,)] - c) < 1e-18 * c
    assert abs(terms[(2,)] + c * q ** 4 / (1 - q ** 4)) < 1e-18 * c


def test_hermite_command():
    code, out = run_command(["hermite", "--kind", "II", "--l", "3"])
    assert code == 0
    assert out.endswith("z^3 + (-q^(-6) + 1)*z")


def test_probe_reports_witness():
    code, out = run_command(["probe", "--expr", "gauss_G()", "--gamma", "0.5,1", "--n", "2", "--json"])
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "not lattice integrable"
    assert data["witness"]


def test_error_exit_codes():
    assert run_command(["integrate", "--expr", "x1 +", "--gamma", "1"])[0] == 2
    assert run_command(["integrate", "--expr", "x1", "--gamma", "1", "--q", "2"])[0] == 2
    assert run_command(["hermite", "--kind", "III", "--l", "1"])[0] == 2
    code, out = run_command(["integrate", "--variant", "I", "--expr", "x1^2", "--gamma", "1", "--n", "1"])
    assert code == 1
    assert json.loads(out)["error"]["type"] == "DivergenceError"


def test_table_command():
    code, out = run_command(["table", "--case", "fs-hermite-c", "--A", "1"])
    assert code == 0
    assert "max rel deviation" in out


def test_main_prints_to_stdout(capsys):
    assert main(["hermite", "--kind", "I", "--l", "2"]) == 0
    assert "z^2" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "braidq", "hermite", "--kind", "I", "--l", "1"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert proc.stdout.strip().endswith("z")


atoms = st.one_of(
    st.integers(0, 9).map(str),
    st.sampled_from(["x1", "x2", "x3", "q", "q^2", "q4", "q^(-1/2)", "1/2", "0.25", "i"]),
)


def combine(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: f"{t[0]} + {t[1]}"),
        st.tuples(children, children).map(lambda t: f"{t[0]} - {t[1]}"),
        st.tuples(children, children).map(lambda t: f"{t[0]}*{t[1]}"),
        st.tuples(children, st.integers(0, 3)).map(lambda t: f"({t[0]})^{t[1]}"),
        children.map(lambda s: f"-({s})"),
        children.map(lambda s: f"({s})"),
    )


expressions = st.recursive(atoms, combine, max_leaves=8)


@given(expressions)
@settings(max_examples=120, deadline=None)
def test_print_parse_roundtrip(text):
    node = parse_expression(text)
    printed = to_text(node)
    assert parse_expression(printed) == node
    assert to_text(parse_expression(printed)) == printed


@given(expressions)
@settings(max_examples=60, deadline=None)
def test_printed_form_evaluates_the_same(text):
    a = evaluate(text, n=3, N=4).series
    b = evaluate(to_text(parse_expression(text)), n=3, N=4).series
    assert a == b


def test_unary_minus_binds_to_factor():
    x1 = NCSeries.generator(COVECTOR, 2, 4, 1)
    assert evaluate("-x1^2", n=2, N=4).series == -(x1 * x1)
    assert evaluate("0 + -(x1)", n=2, N=4).series == evaluate("-x1", n=2, N=4).series
