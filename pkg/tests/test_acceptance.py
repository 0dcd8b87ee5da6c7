"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

The suites in braidq.suites compute each identity two ways.  Where an
independent reference exists (brute-force Jackson sums, mpmath q-Pochhammer
products, the direct double sum for the realized big Gaussian) the test adds
that comparison on top.
"""

import mpmath
import pytest

from braidq import fourier
from braidq.calculus import global_integral, jackson_1d
from braidq.factored import OneVar
from braidq.qspecial import gaussian_analytic
from braidq.scalars import current_q
from braidq.suites import (FOURIER_GROUPS, counterexample_suite, fourier_suite, gaussian_moments_suite,
                           hopf_suite, order_bridge_suite, phi11_suite, psi_suite,
                           pseudo_inverse_suite, roundtrip_suite, translation_suite)

import oracles
from conftest import ACCEPTANCE_LINES


def report(number, title, passed, detail):
    line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}  {title:<28} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    return passed


def rel(a, b):
    a, b = mpmath.mpmathify(a), mpmath.mpmathify(b)
    return float(abs(a - b) / abs(b))


def test_criterion_01_hopf_axioms():
    res = hopf_suite(dims=(1, 2, 3), max_degree=4)
    ok = res.passed and res.seconds < 30
    assert report(1, "Hopf axioms", ok, f"{res.summary}, {res.seconds:.1f}s (limit 30s)")


def test_criterion_02_pseudo_inverse():
    res = pseudo_inverse_suite(dims=(1, 2, 3), max_degree=6)
    assert report(2, "pseudo-inverse", res.passed, res.summary)


def test_criterion_03_gaussian_moments():
    res = gaussian_moments_suite(max_a=4, gamma=(1, 1), rel_tol=1e-10, odd_tol=1e-12)
    # brute-force reference: product of one-variable moments on the lattices q^(n-j) gamma_j
    q = current_q()
    worst = 0.0
    for A in [(0, 0), (2, 0), (0, 4), (2, 2), (4, 4)]:
        f = gaussian_analytic("g", 2, polys=[{a: 1} for a in A])
        v = global_integral(f, [1, 1], "I")
        expect = oracles.gaussian_moment(A[0], q, q) * oracles.gaussian_moment(A[1], 1, q)
        worst = max(worst, rel(v, expect))
    ok = res.passed and worst <= 1e-10
    assert report(3, "Gaussian moments", ok, f"{res.summary}, brute-force rel {worst:.1e}")


def test_criterion_04_translation_invariance():
    res = translation_suite(max_a=3, max_order=3, gamma=(1, 1), tol=1e-10)
    assert report(4, "translation invariance", res.passed, res.summary)


def test_criterion_05_counterexample():
    res = counterexample_suite(range(3, 9), min_ratio=2.0)
    q = current_q()
    G = gaussian_analytic("G", 2)
    worst = 0.0
    for r in range(3, 9):
        z = (q ** (2 - 2 * r), q ** (-2 * r))
        worst = max(worst, rel(G.evaluate_realized(z), oracles.realized_big_gaussian_2d(*z, q)))
    ok = res.passed and worst <= 1e-10
    assert report(5, "counterexample", ok, f"{res.summary}, direct double sum rel {worst:.1e}")


def test_criterion_06_order_bridge():
    res = order_bridge_suite(n=3, tol=1e-10)
    q = current_q()
    one_dim = jackson_1d(OneVar.gaussian("E", 1), 1).value
    gap = rel(one_dim, oracles.big_gaussian_integral(q))
    ok = res.passed and gap <= 1e-10
    assert report(6, "lattice-order bridge", ok, f"{res.summary}, one-dim value rel {gap:.1e}")


@pytest.mark.parametrize("group", list(FOURIER_GROUPS))
def test_criterion_07_fourier_oracles(group):
    res = fourier_suite(group, max_a=3, dims=(1, 2), N=6, tol=1e-10)
    ok = res.passed and res.seconds < 60
    assert report(7, f"Fourier {group}", ok, f"{res.summary}, {res.seconds:.1f}s (limit 60s)")


def test_criterion_08_roundtrips():
    res = roundtrip_suite(dims=(1, 2), N=12, tol=1e-9, agree_tol=1e-10)
    # n = 1, even Gaussian: the constant is b (integral of E(-q^4 x^2)) times c(1)
    q = current_q()
    rep = fourier.roundtrip("weak-forward", [{0: 1}], (1,), N=12)
    gap = rel(rep.constant, oracles.b_closed(q) * oracles.c_closed(1, q))
    ok = res.passed and gap <= 1e-9
    assert report(8, "round trips", ok, f"{res.summary}, n=1 constant vs b*c rel {gap:.1e}")


def test_criterion_09_phi11():
    res = phi11_suite(N=8)
    assert report(9, "1phi1 identities", res.passed, res.summary)


def test_criterion_10_psi_symmetry():
    res = psi_suite(tol=1e-10)
    # at w = (1, 1) the left side is the Gaussian integral on gamma = (q^(-1/2), q^(-5/2))
    q = current_q()
    lhs = global_integral(gaussian_analytic("g", 2), [q ** -0.5, q ** -2.5], "I")
    gap = rel(lhs, oracles.c_closed(q ** 0.5, q) * oracles.c_closed(q ** -2.5, q))
    ok = res.passed and gap <= 1e-10
    assert report(10, "psi symmetry", ok, f"{res.summary}, left side vs closed form rel {gap:.1e}")
