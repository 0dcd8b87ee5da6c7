"""Verification suites: each one recomputes an identity two ways and reports the gap.

Every suite returns a SuiteResult; `run_suite(name)` dispatches by name and is
what the `check` subcommand calls.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from itertools import permutations, product

import mpmath

from . import calculus, fourier
from .calculus import (DivergenceError, commuting_order_integral, derivative_integral,
                       global_integral, indefinite_integral, integrability_probe, jackson_1d,
                       lattice_order_integral, order_shift_gamma, partial_left,
                       permutation_length, suitable_lattice)
from .factored import AnalyticSeries, OneVar
from .hopf import hopf_axiom_report
from .qalgebra import COVECTOR, NCSeries, indices_up_to
from .qspecial import gaussian_analytic, phi11_identity_suite
from .scalars import current_q, q_factorial


@dataclass
class SuiteResult:
    name: str
    passed: bool
    seconds: float
    summary: str
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name:<16} {self.seconds:7.2f}s  {self.summary}"

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "seconds": round(self.seconds, 3),
                "summary": self.summary, "details": self.details}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, default=str)


def _rel(a, b):
    a, b = mpmath.mpmathify(a), mpmath.mpmathify(b)
    return float(abs(a - b) / abs(b)) if b else float(abs(a))


def _finish(name, start, passed, summary, details):
    return SuiteResult(name, bool(passed), time.perf_counter() - start, summary, details)


# --------------------------------------------------------------------------


def hopf_suite(dims=(1, 2, 3), max_degree: int = 4) -> SuiteResult:
    start = time.perf_counter()
    details = {n: hopf_axiom_report(n, max_degree) for n in dims}
    failures = sum(sum(r.values()) for r in details.values())
    return _finish("hopf", start, failures == 0,
                   f"{failures} failing checks, n in {list(dims)}, degree <= {max_degree}", details)


def pseudo_inverse_suite(dims=(1, 2, 3), max_degree: int = 6) -> SuiteResult:
    """d_i of the integral from 0 to x_i returns every monomial unchanged."""
    start = time.perf_counter()
    bad = []
    count = 0
    for n in dims:
        for E in indices_up_to(n, max_degree):
            f = NCSeries.monomial(COVECTOR, n, max_degree + 1, E)
            for i in range(1, n + 1):
                count += 1
                if partial_left(indefinite_integral(f, i), i) != f:
                    bad.append((n, E, i))
    return _finish("pseudo-inverse", start, not bad, f"{count - len(bad)}/{count} exact",
                   {"failures": bad[:20]})


def _even_ceiling(A):
    return tuple(a + a % 2 for a in A)


def gaussian_moments_suite(max_a: int = 4, gamma=(1, 1), rel_tol=1e-10, odd_tol=1e-12) -> SuiteResult:
    """Realized moments against q^(-sum a^2/2) prod (q^2; q^4)_(a/2) times the integral of g.

    The moment family interleaves the factors, e(-x_1^2) x_1^a_1 e(-x_2^2) x_2^a_2,
    so that every monomial stays next to its own Gaussian.
    """
    start = time.perf_counter()
    q = current_q()
    base = global_integral(gaussian_analytic("g", 2), gamma, "I")
    values = {}
    worst_even = worst_odd = 0.0
    for A in product(range(max_a + 1), repeat=2):
        f = gaussian_analytic("g", 2, polys=[{a: 1} for a in A])
        values[A] = global_integral(f, gamma, "I")
    for A, v in values.items():
        if all(a % 2 == 0 for a in A):
            expect = base * q ** (-sum(a * a for a in A) / 2)
            for a in A:
                expect *= mpmath.qp(q ** 2, q ** 4, a // 2)
            worst_even = max(worst_even, _rel(v, expect))
        else:
            scale = abs(values.get(_even_ceiling(A)) or global_integral(
                gaussian_analytic("g", 2, polys=[{a: 1} for a in _even_ceiling(A)]), gamma, "I"))
            worst_odd = max(worst_odd, float(abs(v) / scale))
    ok = worst_even <= rel_tol and worst_odd <= odd_tol
    return _finish("gaussian-moments", start, ok,
                   f"even rel {worst_even:.1e}, odd/scale {worst_odd:.1e}",
                   {"integral_of_g": mpmath.nstr(base, 20), "evenRel": worst_even, "oddScaled": worst_odd})


def translation_suite(max_a: int = 3, max_order: int = 3, gamma=(1, 1), tol=1e-10,
                      shift=(mpmath.mpf("0.3"), mpmath.mpf("-0.7"))) -> SuiteResult:
    """I'(d^J (g x^A)) vanishes for J != 0, so the Taylor sum of I'(f(x + y)) is I'(f)."""
    start = time.perf_counter()
    q = current_q()
    g = gaussian_analytic("g", 2)
    worst = worst_taylor = 0.0
    orders = [J for J in indices_up_to(2, max_order) if any(J)]
    for A in product(range(max_a + 1), repeat=2):
        f = g.times_monomial(A, "right")
        lead = global_integral(f, gamma, "I'")
        scale = abs(global_integral(g.times_monomial(_even_ceiling(A), "right"), gamma, "I'"))
        assembled = lead
        for J in orders:
            v = derivative_integral(f, J, gamma, "I'")
            worst = max(worst, float(abs(v) / scale))
            w = mpmath.mpf(1)
            for y, j in zip(shift, J):
                w *= y ** j / q_factorial(j, q ** 2).evaluate().real
            assembled += w * v
        worst_taylor = max(worst_taylor, float(abs(assembled - lead) / scale))
    ok = worst <= tol and worst_taylor <= tol
    return _finish("translation", start, ok,
                   f"max |I'(d^J f)|/scale {worst:.1e}, Taylor remainder {worst_taylor:.1e}",
                   {"derivativeScaled": worst, "taylorScaled": worst_taylor, "orders": len(orders)})


def counterexample_suite(r_range=range(3, 9), min_ratio: float = 2.0) -> SuiteResult:
    """G(q^2) realized grows along (q^(2-2r), q^(-2r)); the ascending product of big exponentials does not."""
    start = time.perf_counter()
    q = current_q()
    G = gaussian_analytic("G", 2)
    vals = [abs(G.evaluate_realized([q ** (2 - 2 * r), q ** (-2 * r)])) for r in r_range]
    ratios = [vals[k + 1] / vals[k] if vals[k] else mpmath.inf for k in range(len(vals) - 1)]
    grows = all(r >= min_ratio for r in ratios)
    # gamma = (q, 1) puts the lattice on the ray (q^(2-2r), q^(-2r))
    probe = integrability_probe(G, [q, 1])
    wanted = [(q ** (2 - 2 * r), q ** (-2 * r)) for r in r_range]
    seen = [tuple(mpmath.mpf(x) for x in pt) for pt in probe.witness.get("points", [])]
    on_ray = all(any(all(abs(a - b) <= 1e-9 * b for a, b in zip(w, pt)) for pt in seen) for w in wanted)
    asc = AnalyticSeries.product(COVECTOR, 2, [("f", 1, OneVar.gaussian("E", 1)),
                                               ("f", 2, OneVar.gaussian("E", 1))])
    probe_asc = integrability_probe(asc, [q, 1])
    ok = grows and probe.verdict == calculus.NOT_LATTICE_INTEGRABLE and on_ray \
        and probe_asc.verdict == calculus.INTEGRABLE
    return _finish("counterexample", start, ok,
                   f"min ratio {mpmath.nstr(min(ratios), 6)}, G: {probe.verdict}, ascending: {probe_asc.verdict}",
                   {"values": [mpmath.nstr(v, 10) for v in vals], "ratios": [mpmath.nstr(r, 8) for r in ratios],
                    "probe": probe.to_json(), "ascendingProbe": probe_asc.to_json()})


def order_bridge_suite(n: int = 3, tol=1e-10) -> SuiteResult:
    """Lattice-order integrals of reordered big-exponential products, against two oracles.

    f = E(-x_rho(1)^2) ... E(-x_rho(n)^2) with rho = tau^-1.  The first oracle is
    q^(l(sigma)+l(tau)) times the n-th power of the one-variable Jackson value,
    the second q^l(sigma) times the commuting-variable order integral of the
    realization on the order-shifted lattice.
    """
    start = time.perf_counter()
    q = current_q()
    phi = OneVar.gaussian("E", 1)
    one = jackson_1d(phi, 1).value
    worst_product = worst_commuting = 0.0
    rows = []
    for tau in permutations(range(1, n + 1)):
        rho = [0] * n
        for i, t in enumerate(tau, 1):
            rho[t - 1] = i
        f = AnalyticSeries.product(COVECTOR, n, [("f", r, phi) for r in rho])
        for sigma in permutations(range(1, n + 1)):
            lat, v = suitable_lattice(f, sigma)
            expect = q ** (permutation_length(sigma) + permutation_length(tau)) * one ** n
            comm = q ** permutation_length(sigma) * commuting_order_integral(
                f.realize(), sigma, order_shift_gamma(sigma, lat))
            worst_product = max(worst_product, _rel(v, expect))
            worst_commuting = max(worst_commuting, _rel(comm, v))
            rows.append({"tau": tau, "sigma": sigma, "value": mpmath.nstr(v, 15)})
    ok = worst_product <= tol and worst_commuting <= tol
    return _finish("order-bridge", start, ok,
                   f"{len(rows)} orders, product rel {worst_product:.1e}, commuting rel {worst_commuting:.1e}",
                   {"rows": rows, "productRel": worst_product, "commutingRel": worst_commuting})


FOURIER_GROUPS = {
    "FS": ("fs-hermite-c", "fs-hermite-int", "fs-monomial-int", "fs-monomial-c", "fs-joint-c", "fs-joint-int"),
    "F''": ("weak-hermite", "weak-monomial"),
    "GS": ("gs-hermite", "gs-monomial"),
    "G''": ("weak-inverse-hermite", "weak-inverse-monomial"),
}


def fourier_suite(group: str, max_a: int = 3, dims=(1, 2), N: int = 6, tol=1e-10) -> SuiteResult:
    """Transforms of the Gaussian families against their closed forms, coefficients through degree N."""
    start = time.perf_counter()
    worst = 0.0
    bad = []
    for n in dims:
        for A in product(range(max_a + 1), repeat=n):
            for case in FOURIER_GROUPS[group]:
                d = fourier.case_deviation(case, A, N)
                worst = max(worst, d)
                if d > tol:
                    bad.append((case, A, d))
    return _finish(f"fourier {group}", start, not bad, f"max rel deviation {worst:.1e}",
                   {"failures": bad, "maxRelativeDeviation": worst})


def _parity_polys(bit: int, max_degree: int = 2):
    if bit:
        return [{m: 1} for m in range(1, max_degree + 1, 2)]
    return [{0: 1}] + [{m: 1, 0: -1} for m in range(2, max_degree + 1, 2)]


def roundtrip_suite(dims=(1, 2), N: int = 12, tol=1e-9, agree_tol=1e-10) -> SuiteResult:
    start = time.perf_counter()
    worst_dev = worst_const = worst_agree = 0.0
    reports = []
    for kind in ("weak-forward", "weak-inverse"):
        for n in dims:
            for sigma in permutations(range(1, n + 1)):
                for bits in product((0, 1), repeat=n):
                    consts = []
                    for polys in product(*[_parity_polys(b) for b in bits]):
                        r = fourier.roundtrip(kind, list(polys), sigma, N=N)
                        worst_dev = max(worst_dev, r.deviation)
                        worst_const = max(worst_const, r.constant_error)
                        consts.append(r.constant)
                        reports.append(r.to_json())
                    for c in consts[1:]:
                        worst_agree = max(worst_agree, _rel(c, consts[0]))
    ok = worst_dev <= tol and worst_const <= tol and worst_agree <= agree_tol
    return _finish("roundtrip", start, ok,
                   f"{len(reports)} cases, dev {worst_dev:.1e}, constant {worst_const:.1e}, "
                   f"across degrees {worst_agree:.1e}",
                   {"reports": reports})


def phi11_suite(N: int = 8) -> SuiteResult:
    start = time.perf_counter()
    report = phi11_identity_suite(N)
    control = phi11_identity_suite(N, perturb=True)
    ok = report["exact"] and not control["exact"]
    return _finish("phi11", start, ok, f"exact through degree {N}: {report['exact']}, "
                   f"perturbed control rejected: {not control['exact']}", {"report": report})


def psi_suite(scales=((1, 1), (mpmath.mpf("0.7"), mpmath.mpf("1.3"))), tol=1e-10) -> SuiteResult:
    start = time.perf_counter()
    g = gaussian_analytic("g", 2)
    worst = 0.0
    rows = []
    for w in scales:
        lhs, rhs = fourier.psi_integral_sides(g, list(w))
        worst = max(worst, _rel(rhs, lhs))
        rows.append({"w": [mpmath.nstr(x, 6) for x in w], "left": mpmath.nstr(lhs, 20),
                     "right": mpmath.nstr(rhs, 20)})
    return _finish("psi", start, worst <= tol, f"max rel gap {worst:.1e}", {"rows": rows})


SUITES = {
    "hopf": hopf_suite,
    "pseudo-inverse": pseudo_inverse_suite,
    "gaussian-moments": gaussian_moments_suite,
    "translation": translation_suite,
    "counterexample": counterexample_suite,
    "order-bridge": order_bridge_suite,
    "fourier": None,
    "roundtrip": roundtrip_suite,
    "phi11": phi11_suite,
    "psi": psi_suite,
}


def run_suite(name: str, **kwargs) -> list:
    """Run one suite (or 'all'); returns a list of SuiteResult."""
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(run_suite(key))
        return out
    if name == "fourier":
        return [fourier_suite(group, **kwargs) for group in FOURIER_GROUPS]
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return [SUITES[name](**kwargs)]


__all__ = ["SuiteResult", "SUITES", "FOURIER_GROUPS", "run_suite", "DivergenceError",
           "lattice_order_integral"]
