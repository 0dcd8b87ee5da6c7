"""Braided Fourier transforms between covector and vector series, their inverses,
closed-form oracles for Gaussian families and round-trip checks.

Every transform is computed coefficient by coefficient from its definition:
the weight of an output monomial comes from the coevaluation element with the
dressed arguments (and the antipode for the S-variants), and the attached
number is a realized integral of the input times that monomial.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from itertools import permutations

import mpmath

from .calculus import (
    DivergenceError, global_integral, integrability_probe, lattice_order_integral,
    permutation_length, right_global_integral, NOT_LATTICE_INTEGRABLE,
)
from .factored import AnalyticSeries, OneVar
from .hopf import antipode_weight, exp_element
from .qalgebra import COVECTOR, VECTOR, NCSeries, Parity, indices_up_to, upper_sum
from .qspecial import OneVarPoly, gaussian_analytic, hermite, q_exponential
from .scalars import (
    I_UNIT, ONE, QScalar, current_params, current_q, gauss_constant, use_params,
)

FORWARD = ("F", "FS")
WEAK_FORWARD = ("F''", "FS''")
INVERSE = ("G", "GS")
WEAK_INVERSE = ("G''", "GS''")


def canonical_kind(kind: str) -> str:
    k = kind.replace('"', "''").replace("pp", "''").replace("_S", "S")
    if k not in FORWARD + WEAK_FORWARD + INVERSE + WEAK_INVERSE:
        raise ValueError(f"unknown transform kind {kind!r}")
    return k


def _q(k):
    return QScalar.q_power(k)


# --------------------------------------------------------------------------
# results


@dataclass
class TransformResult:
    kind: str
    series: NCSeries
    gamma: list
    N: int
    reliable_degree: int
    sigma: tuple | None = None
    beta: Parity | None = None
    plancherel: object = None
    plancherel_description: str = ""

    def coefficient(self, E):
        return self.series.coefficient(tuple(E)).evaluate()

    def max_relative_deviation(self, other: "TransformResult", degree: int | None = None) -> float:
        """max |a_E - b_E| / max |b_E| over monomials of degree <= degree."""
        d = self.reliable_degree if degree is None else degree
        keys = {E for E in set(self.series.terms) | set(other.series.terms) if sum(E) <= d}
        scale = max((abs(other.coefficient(E)) for E in keys), default=mpmath.mpf(0))
        if scale == 0:
            scale = max((abs(self.coefficient(E)) for E in keys), default=mpmath.mpf(1)) or 1
        return float(max((abs(self.coefficient(E) - other.coefficient(E)) for E in keys),
                         default=mpmath.mpf(0)) / scale)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "beta": None if self.beta is None else str(self.beta)}
        if self.sigma is not None:
            out["sigma"] = list(self.sigma)
        out["gamma"] = [mpmath.nstr(mpmath.mpmathify(g), 20) for g in self.gamma]
        out["N"] = self.N
        out["reliableDegree"] = self.reliable_degree
        value = None
        if self.plancherel is not None:
            v = mpmath.mpmathify(self.plancherel)
            value = {"re": mpmath.nstr(mpmath.re(v), 30), "im": mpmath.nstr(mpmath.im(v), 30)}
        out["plancherel"] = {"value": value, "description": self.plancherel_description}
        terms = []
        for E in sorted(self.series.terms, key=lambda E: (sum(E), E)):
            v = self.coefficient(E)
            terms.append({"exponents": list(E), "re": mpmath.nstr(mpmath.re(v), 30),
                          "im": mpmath.nstr(mpmath.im(v), 30)})
        out["terms"] = terms
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


# --------------------------------------------------------------------------
# weights from the coevaluation element


def _dressing(kind: str, n: int) -> list:
    """Argument scale of d_j inside the coevaluation element."""
    i_over = I_UNIT / (ONE - _q(2))
    if kind.startswith(("FS", "GS")):
        return [i_over * _q(2 + n - j) for j in range(1, n + 1)]
    if kind.startswith("G"):
        # the Gaussian closed forms of G'' and the F_S round trip need the
        # q^(n-j) dressing with d_1^e_1 ... d_n^e_n (ascending) paired to x^E
        return [i_over * _q(n - j) for j in range(1, n + 1)]
    return [i_over * _q(1 - j) for j in range(1, n + 1)]


def _ascending_factor(E) -> QScalar:
    """d_1^e_1 ... d_n^e_n = q^(sum_{i<j} e_i e_j) d_n^e_n ... d_1^e_1."""
    return _q(sum(E[i] * E[j] for i in range(len(E)) for j in range(i + 1, len(E))))


def transform_weights(kind: str, n: int, N: int) -> dict:
    """Exact weight attached to each normal-form output monomial of degree <= N."""
    kind = canonical_kind(kind)
    dress = _dressing(kind, n)
    with_antipode = kind.startswith(("FS", "GS"))
    out = {}
    for (E, _), c in exp_element(n, 2 * N).terms.items():
        w = c
        for a, e in zip(dress, E):
            if e:
                w = w * a ** e
        if with_antipode:
            w = w * antipode_weight(sum(E))
        elif kind.startswith("G"):
            w = w * _ascending_factor(E)
        out[E] = w
    return out


# --------------------------------------------------------------------------
# parity detection


def fixed_parity(f: AnalyticSeries) -> Parity | None:
    """The parity vector of f when it has one, else None."""
    from itertools import product

    found = None
    for bits in product((0, 1), repeat=f.n):
        if not f.parity_project(bits).is_zero():
            if found is not None:
                return None
            found = bits
    return None if found is None else Parity(tuple("-" if b else "+" for b in found))


def _as_input(f, kind_side):
    if isinstance(f, NCSeries):
        f = AnalyticSeries.from_ncseries(f)
    if not isinstance(f, AnalyticSeries):
        raise TypeError(f"cannot transform a {type(f).__name__}")
    if f.kind != kind_side:
        raise ValueError(f"expected a {kind_side} series")
    return f


def _output_indices(n, N, beta):
    for E in indices_up_to(n, N):
        if beta is None or beta.matches(E):
            yield E


def _assemble(kind_out, n, N, weights, values):
    terms = {}
    for E, v in values.items():
        if v == 0:
            continue
        terms[E] = weights[E] * QScalar.numeric(v)
    return NCSeries(kind_out, n, N, terms)


# --------------------------------------------------------------------------
# forward transforms


def transform(kind: str, f, gamma, N: int, check: bool = True) -> TransformResult:
    """F or FS: coefficient of d^E is I'(f x^E) realized at gamma times the exact weight."""
    kind = canonical_kind(kind)
    if kind not in FORWARD:
        raise ValueError("transform computes F or FS")
    f = _as_input(f, COVECTOR)
    n = f.n
    if check:
        report = integrability_probe(f, gamma)
        if report.verdict == NOT_LATTICE_INTEGRABLE:
            raise DivergenceError("input is not integrable on this lattice", report.witness)
    beta = fixed_parity(f)
    weights = transform_weights(kind, n, N)
    values = {E: global_integral(f.times_monomial(E, "right"), gamma, "I'", check=False)
              for E in _output_indices(n, N, beta)}
    return TransformResult(kind, _assemble(VECTOR, n, N, weights, values), list(gamma), N, N,
                           beta=beta, plancherel_description="folded into the coefficients")


def weak_transform(kind: str, f, sigma, gamma, N: int) -> TransformResult:
    """F'' or FS'': as transform with the lattice-order integral for sigma and gamma."""
    kind = canonical_kind(kind)
    if kind not in WEAK_FORWARD:
        raise ValueError("weak_transform computes F'' or FS''")
    f = _as_input(f, COVECTOR)
    n = f.n
    beta = fixed_parity(f)
    weights = transform_weights(kind, n, N)
    values = {E: lattice_order_integral(f.times_monomial(E, "right"), sigma, gamma, "left")
              for E in _output_indices(n, N, beta)}
    return TransformResult(kind, _assemble(VECTOR, n, N, weights, values), list(gamma), N, N,
                           sigma=tuple(sigma), beta=beta,
                           plancherel_description="folded into the coefficients")


def inverse_transform(kind: str, g, delta, N: int, check: bool = True) -> TransformResult:
    """G or GS: coefficient of x^E is J'(d^E g) realized at delta times the exact weight."""
    kind = canonical_kind(kind)
    if kind not in INVERSE:
        raise ValueError("inverse_transform computes G or GS")
    g = _as_input(g, VECTOR)
    n = g.n
    beta = fixed_parity(g)
    weights = transform_weights(kind, n, N)
    values = {E: right_global_integral(g.times_monomial(E, "left"), delta, "J'", check=check)
              for E in _output_indices(n, N, beta)}
    return TransformResult(kind, _assemble(COVECTOR, n, N, weights, values), list(delta), N, N,
                           beta=beta, plancherel_description="folded into the coefficients")


def weak_inverse(kind: str, g, sigma, gamma, N: int) -> TransformResult:
    """G'' or GS'': as inverse_transform with the right lattice-order integral."""
    kind = canonical_kind(kind)
    if kind not in WEAK_INVERSE:
        raise ValueError("weak_inverse computes G'' or GS''")
    g = _as_input(g, VECTOR)
    n = g.n
    beta = fixed_parity(g)
    weights = transform_weights(kind, n, N)
    values = {E: lattice_order_integral(g.times_monomial(E, "left"), sigma, gamma, "right")
              for E in _output_indices(n, N, beta)}
    return TransformResult(kind, _assemble(COVECTOR, n, N, weights, values), list(gamma), N, N,
                           sigma=tuple(sigma), beta=beta,
                           plancherel_description="folded into the coefficients")


# --------------------------------------------------------------------------
# input families


def beta_of(A) -> Parity:
    return Parity.of(A)


def family_M(A, side: str = COVECTOR) -> AnalyticSeries:
    """e(-y_1^2) y_1^a_1 ... e(-y_n^2) y_n^a_n, written in increasing order."""
    n = len(A)
    return gaussian_analytic("g", n, side=side, order=range(1, n + 1),
                             polys=[{a: 1} for a in A])


def family_H(A, side: str = COVECTOR) -> AnalyticSeries:
    """e(-y_1^2) h~_a1(y_1) ... e(-y_n^2) h~_an(y_n), increasing order."""
    n = len(A)
    return gaussian_analytic("g", n, side=side, order=range(1, n + 1),
                             polys=[hermite("II", a) for a in A])


def family_joint(A) -> AnalyticSeries:
    """e(-(x_1^2 + ... + x_n^2)) x_1^a_1 ... x_n^a_n (covector)."""
    return gaussian_analytic("g", len(A)).times_monomial(tuple(A), "right")


def family_N(A, side: str = COVECTOR, hermite_kind: str | None = None) -> AnalyticSeries:
    """E(-q^4 y_n^2) p_n(y_n) ... E(-q^4 y_1^2) p_1(y_1) in decreasing order, p = monomial or Hermite I."""
    n = len(A)
    polys = [{a: 1} if hermite_kind is None else hermite(hermite_kind, a) for a in A]
    return gaussian_analytic("G", n, scale=_q(2), side=side, order=range(n, 0, -1), polys=polys)


def family_vector_g(A, hermite_kind: str | None = None) -> AnalyticSeries:
    """e(-d_n^2) p_n(d_n) ... e(-d_1^2) p_1(d_1) (vector side, decreasing order)."""
    n = len(A)
    polys = [{a: 1} if hermite_kind is None else hermite(hermite_kind, a) for a in A]
    return gaussian_analytic("g", n, side=VECTOR, order=range(n, 0, -1), polys=polys)


def family_vector_G(A, hermite_kind: str | None = None) -> AnalyticSeries:
    """E(-q^4 d_1^2) p_1(d_1) ... E(-q^4 d_n^2) p_n(d_n) (vector side, increasing order)."""
    n = len(A)
    polys = [{a: 1} if hermite_kind is None else hermite(hermite_kind, a) for a in A]
    return gaussian_analytic("G", n, scale=_q(2), side=VECTOR, order=range(1, n + 1), polys=polys)


def weak_lattice(A, sigma=None, side: str = COVECTOR) -> list:
    """gamma with gamma_sigma(k) = q^(S_sigma(k) + k - 1 + #{j<k : sigma(j) > sigma(k)}).

    S is the upper sum A^s on covectors (decreasing products) and the lower sum
    A_s on vectors (increasing products), the exponents that reach each variable.
    """
    n = len(A)
    sigma = tuple(range(1, n + 1)) if sigma is None else tuple(sigma)
    q = current_q()
    out = [None] * n
    for k, s in enumerate(sigma):
        inv = sum(1 for j in range(k) if sigma[j] > s)
        shift = upper_sum(A, s) if side == COVECTOR else sum(A[:s - 1])
        out[s - 1] = q ** (shift + k + inv)
    return out


# --------------------------------------------------------------------------
# closed forms


def _one_var(side, n, N, v, poly, gauss, c) -> NCSeries:
    """poly(y_v) * G(c y_v^2) as an exact series (one variable commutes with itself)."""
    p = NCSeries.zero(side, n, N)
    for m, a in poly.items():
        if m <= N:
            p = p + NCSeries.generator(side, n, N, v, m) * a
    if gauss is None:
        return p
    arg = NCSeries.generator(side, n, N, v, 2) * (-c)
    return p * q_exponential("small" if gauss == "e" else "big", _q(4), arg)


def _hermite_poly(kind, a, scale=ONE) -> dict:
    h = hermite(kind, a)
    return {m: c * scale ** m for m, c in h.coefficients.items()}


def _ordered(side, n, N, factors) -> NCSeries:
    out = NCSeries.one(side, n, N)
    for f in factors:
        out = out * f
    return out


def _c_product(n, gamma, shifts):
    q = current_q()
    v = mpmath.mpf(1)
    for j in range(1, n + 1):
        v *= gauss_constant("c", q ** (n - j + shifts[j - 1]) * mpmath.mpmathify(gamma[j - 1])).evaluate()
    return v


def shifted_gaussian_integral(n, gamma, shifts, side: str = "left"):
    """Realized integral of g with extra bound scales q^shift_j, by iterated Jackson sums."""
    q = current_q()
    scales = [q ** s for s in shifts]
    if side == "left":
        return global_integral(gaussian_analytic("g", n), gamma, "I", check=False, bound_scales=scales)
    return right_global_integral(gaussian_analytic("g", n, side=VECTOR), gamma, "J", check=False,
                                 bound_scales=scales)


def weak_gaussian_leg(n, sigma, gamma, side: str = "left"):
    """Lattice-order integral of G(q^2 y) (I'' on covectors, J'' on vectors)."""
    G = gaussian_analytic("G", n, scale=_q(2), side=COVECTOR if side == "left" else VECTOR)
    return lattice_order_integral(G, sigma, gamma, side)


CLOSED_FORM_CASES = ("fs-hermite-c", "fs-hermite-int", "fs-monomial-int", "fs-monomial-c", "fs-joint-c", "fs-joint-int", "weak-hermite", "weak-monomial", "gs-hermite", "gs-monomial", "weak-inverse-hermite", "weak-inverse-monomial")


def closed_form(case: str, A, gamma=None, N: int = 8, sigma=None) -> TransformResult:
    """Right-hand side of a closed-form transform identity, expanded to degree N.

    gamma is the lattice of the corresponding transform (delta for the inverse
    ones); the weak cases default to the lattice q^(k-1+A^k).
    """
    if case not in CLOSED_FORM_CASES:
        raise ValueError(f"unknown closed-form case {case!r}")
    A = tuple(int(a) for a in A)
    if any(a < 0 for a in A):
        raise ValueError("exponents must be nonnegative")
    n = len(A)
    beta = Parity.of(A)
    B = [beta.lower(j) for j in range(1, n + 1)]
    absA = sum(A)
    q4 = _q(4)
    minus_i_A = (-I_UNIT) ** absA
    i_A = I_UNIT ** absA
    sq_minus = sum(a * a - a for a in A)  # sum (a_j^2 - a_j)
    if case in ("weak-hermite", "weak-monomial", "weak-inverse-hermite", "weak-inverse-monomial"):
        if sigma not in (None, tuple(range(1, n + 1))):
            raise ValueError("weak closed forms are stated for sigma = id")
        sigma = tuple(range(1, n + 1))
        if gamma is None:
            gamma = weak_lattice(A, side=COVECTOR if case in ("weak-hermite", "weak-monomial") else VECTOR)
    gamma = [1] * n if gamma is None else list(gamma)
    up = range(1, n + 1)
    down = range(n, 0, -1)

    if case in ("fs-hermite-c", "fs-hermite-int", "fs-monomial-int", "fs-monomial-c"):
        if case in ("fs-hermite-c", "fs-hermite-int"):
            factors = [_one_var(VECTOR, n, N, k, _hermite_poly("I", A[k - 1]), "E", q4) for k in up]
        else:
            factors = [_one_var(VECTOR, n, N, k, {A[k - 1]: ONE}, "E", q4) for k in up]
        body = _ordered(VECTOR, n, N, factors) * (minus_i_A * _q(-sq_minus))
        if case in ("fs-hermite-c", "fs-monomial-c"):
            leg = _c_product(n, gamma, B)
            desc = "product of c(q^(n-j+B_j) gamma_j)"
        else:
            leg = shifted_gaussian_integral(n, gamma, B)
            desc = "integral of g with bounds shifted by q^B_j"
        kind_out = VECTOR
        name = "FS"
    elif case in ("fs-joint-c", "fs-joint-int"):
        Al = [sum(A[:j - 1]) for j in up]  # lower sums A_j
        factors = [_one_var(VECTOR, n, N, k, _hermite_poly("I", A[k - 1], _q(-Al[k - 1])), "E",
                            _q(4 - 2 * Al[k - 1])) for k in up]
        pre = _q(-sum((a + 1) * l for a, l in zip(A, Al)) - sq_minus)
        body = _ordered(VECTOR, n, N, factors) * (minus_i_A * pre)
        if case == "fs-joint-c":
            leg = _c_product(n, gamma, [0] * n)
            desc = "product of c(q^(n-j) gamma_j)"
        else:
            leg = shifted_gaussian_integral(n, gamma, [0] * n)
            desc = "integral of g"
        kind_out = VECTOR
        name = "FS"
    elif case in ("weak-hermite", "weak-monomial"):
        if case == "weak-hermite":
            factors = [_one_var(VECTOR, n, N, k, _hermite_poly("II", A[k - 1]), "e", ONE) for k in down]
            b = gauss_constant("b").evaluate()
            leg = b ** n * current_q() ** (n * (n - 1) // 2)
            desc = "b^n q^(n choose 2)"
        else:
            factors = [_one_var(VECTOR, n, N, k, {A[k - 1]: ONE}, "e", ONE) for k in down]
            q = current_q()
            tilde = [q ** upper_sum(A, k) * mpmath.mpmathify(gamma[k - 1]) for k in up]
            leg = weak_gaussian_leg(n, sigma, tilde, "left")
            desc = "I''(G(q^2 x)) at gamma_k q^(A^k)"
        body = _ordered(VECTOR, n, N, factors) * (i_A * _q(sq_minus))
        kind_out = VECTOR
        name = "F''"
    elif case in ("gs-hermite", "gs-monomial"):
        if case == "gs-hermite":
            factors = [_one_var(COVECTOR, n, N, k, _hermite_poly("I", A[k - 1]), "E", q4) for k in down]
        else:
            factors = [_one_var(COVECTOR, n, N, k, {A[k - 1]: ONE}, "E", q4) for k in down]
        body = _ordered(COVECTOR, n, N, factors) * (minus_i_A * _q(-sq_minus))
        leg = shifted_gaussian_integral(n, gamma, B, side="right")
        desc = "right integral of g with bounds shifted by q^B_j"
        kind_out = COVECTOR
        name = "GS"
    else:  # weak inverse
        if case == "weak-inverse-hermite":
            factors = [_one_var(COVECTOR, n, N, k, _hermite_poly("II", A[k - 1]), "e", ONE) for k in up]
        else:
            factors = [_one_var(COVECTOR, n, N, k, {A[k - 1]: ONE}, "e", ONE) for k in up]
        body = _ordered(COVECTOR, n, N, factors) * (i_A * _q(sq_minus))
        q = current_q()
        leg = weak_gaussian_leg(n, sigma, [q ** (k - 1) for k in up], "right")
        desc = "J''(G(q^2 d)) at q^(k-1)"
        kind_out = COVECTOR
        name = "G''"
    series = body.to_numeric() * QScalar.numeric(leg)
    return TransformResult(name, NCSeries(kind_out, n, N, series.terms), gamma, N, N, sigma=sigma,
                           beta=beta, plancherel=leg, plancherel_description=desc)


def case_transform(case: str, A, N: int = 6, gamma=None) -> TransformResult:
    """Run the transform whose output the closed form `case` describes, on its input family."""
    A = tuple(int(a) for a in A)
    n = len(A)
    ident = tuple(range(1, n + 1))
    flat = [1] * n if gamma is None else list(gamma)
    if case in ("fs-hermite-c", "fs-hermite-int"):
        return transform("FS", family_M(A), flat, N)
    if case in ("fs-monomial-int", "fs-monomial-c"):
        return transform("FS", family_H(A), flat, N)
    if case in ("fs-joint-c", "fs-joint-int"):
        return transform("FS", family_joint(A), flat, N)
    if case in ("weak-hermite", "weak-monomial"):
        lat = weak_lattice(A) if gamma is None else list(gamma)
        f = family_N(A) if case == "weak-hermite" else family_N(A, hermite_kind="I")
        return weak_transform("F''", f, ident, lat, N)
    if case in ("gs-hermite", "gs-monomial"):
        g = family_vector_g(A) if case == "gs-hermite" else family_vector_g(A, "II")
        return inverse_transform("GS", g, flat, N)
    if case in ("weak-inverse-hermite", "weak-inverse-monomial"):
        lat = weak_lattice(A, side=VECTOR) if gamma is None else list(gamma)
        g = family_vector_G(A) if case == "weak-inverse-hermite" else family_vector_G(A, "I")
        return weak_inverse("G''", g, ident, lat, N)
    raise ValueError(f"unknown closed-form case {case!r}")


def case_deviation(case: str, A, N: int = 6) -> float:
    """Largest relative coefficient deviation between a computed transform and its closed form."""
    got = case_transform(case, A, N)
    return float(got.max_relative_deviation(closed_form(case, A, got.gamma, N), N))


# --------------------------------------------------------------------------
# round trips


def _basis_element(side, n, K, order, gauss, c):
    """prod over `order` of y_v^k_v G(c y_v^2): leading term is the normal monomial y^K."""
    items = []
    for v in order:
        if K[v - 1]:
            items.append(("x", v, K[v - 1]))
        items.append(("f", v, OneVar.gaussian(gauss, c)))
    return AnalyticSeries.product(side, n, items)


def resum_gaussian(series: NCSeries, order, gauss: str = "e", c=1) -> AnalyticSeries:
    """Rewrite a truncated series as sum_K d_K prod_v y_v^k_v G(c y_v^2) (triangular peel).

    The d_K with |K| <= N are determined exactly by the coefficients through N.
    """
    n, N, side = series.n, series.N, series.kind
    rest = series.to_numeric()
    total = AnalyticSeries(side, n, [])
    for d in range(N + 1):
        for K in [E for E in indices_up_to(n, d) if sum(E) == d]:
            a = rest.coefficient(K).evaluate()
            if abs(a) == 0:
                continue
            phi = _basis_element(side, n, K, order, gauss, c)
            rest = rest - phi.to_ncseries(N) * QScalar.numeric(a)
            total = total + phi.scaled_by(a)
    return total


@dataclass
class RoundTripReport:
    kind: str
    beta: Parity
    sigma: tuple
    constant: object
    expected: object
    deviation: float
    constant_error: float
    degree: int
    details: dict = field(default_factory=dict)

    def ok(self, tol=1e-9) -> bool:
        return self.deviation <= tol and self.constant_error <= tol

    def to_json(self):
        return {"kind": self.kind, "beta": str(self.beta), "sigma": list(self.sigma),
                "constant": mpmath.nstr(self.constant, 20), "expected": mpmath.nstr(self.expected, 20),
                "maxRelativeDeviation": self.deviation, "constantError": self.constant_error,
                "checkedDegree": self.degree}


def _constant_fit(out: NCSeries, ref: NCSeries, degree: int):
    """Least-deviation ratio out/ref over monomials up to degree (ratio of largest coefficient)."""
    keys = [E for E in ref.terms if sum(E) <= degree]
    E0 = max(keys, key=lambda E: abs(ref.coefficient(E).evaluate()))
    const = out.coefficient(E0).evaluate() / ref.coefficient(E0).evaluate()
    scale = max(abs(ref.coefficient(E).evaluate()) for E in keys) * abs(const)
    dev = mpmath.mpf(0)
    for E in set(out.terms) | set(ref.terms):
        if sum(E) <= degree:
            dev = max(dev, abs(out.coefficient(E).evaluate() - const * ref.coefficient(E).evaluate()))
    return const, float(dev / scale)


def roundtrip(kind: str, polys, sigma=None, N: int = 12, delta=None, precision=None) -> RoundTripReport:
    """Compose a weak transform with the matching inverse on a Gaussian-times-polynomial family.

    kind 'weak-forward': GS after F''(sigma, gamma) on E(-q^4 x_n^2) p_n(x_n) ... E(-q^4 x_1^2) p_1(x_1).
    kind 'weak-inverse': FS after G''(sigma, gamma) on E(-q^4 d_1^2) p_1(d_1) ... E(-q^4 d_n^2) p_n(d_n).
    polys: one dict degree -> coefficient per variable, each of fixed parity.

    The inverse transform of y^K e(-y^2) grows like q^(-|K|^2), so rounding
    noise in the peeled coefficients is amplified; unless `precision` is given
    the computation runs with about N^2 log2(1/q) extra bits.
    """
    params = current_params()
    if precision is None:
        extra = math.ceil(N * N * math.log2(1 / float(params.q)))
        precision = max(params.precision, 128 + extra)
    inner_params = replace(params, precision=precision,
                           tol=min(params.tol, 2.0 ** (-(precision - 32))))
    with use_params(inner_params):
        report = _roundtrip(kind, polys, sigma, N, delta)
    report.details["precision"] = precision
    return report


def _roundtrip(kind, polys, sigma, N, delta):
    n = len(polys)
    sigma = tuple(range(1, n + 1)) if sigma is None else tuple(sigma)
    delta = [1] * n if delta is None else list(delta)
    bits = []
    for p in polys:
        pars = {m % 2 for m in p}
        if len(pars) != 1:
            raise ValueError("each polynomial must have a fixed parity")
        bits.append(pars.pop())
    beta = Parity(tuple("-" if b else "+" for b in bits))
    B_up = [beta.upper(k) for k in range(1, n + 1)]
    B_low = [beta.lower(k) for k in range(1, n + 1)]
    q = current_q()
    half = N // 2
    if kind == "weak-forward":
        gamma = weak_lattice(bits, sigma)
        f = gaussian_analytic("G", n, scale=_q(2), order=range(n, 0, -1), polys=polys)
        mid = weak_transform("F''", f, sigma, gamma, N)
        g = resum_gaussian(mid.series, range(n, 0, -1), "e", 1)
        back = inverse_transform("GS", g, delta, N, check=False)
        ref = f.to_ncseries(N)
        side = "left"
        tilde = [gamma[k] * q ** B_up[k] for k in range(n)]
        outer = shifted_gaussian_integral(n, delta, B_low, side="right")
    elif kind == "weak-inverse":
        gamma = weak_lattice(bits, sigma, VECTOR)
        g = gaussian_analytic("G", n, scale=_q(2), side=VECTOR, order=range(1, n + 1), polys=polys)
        mid = weak_inverse("G''", g, sigma, gamma, N)
        f = resum_gaussian(mid.series, range(1, n + 1), "e", 1)
        back = transform("FS", f, delta, N, check=False)
        ref = g.to_ncseries(N)
        side = "right"
        tilde = [gamma[k] * q ** B_low[k] for k in range(n)]
        outer = shifted_gaussian_integral(n, delta, B_low, side="left")
    else:
        raise ValueError(f"unknown round trip {kind!r}")
    inner = weak_gaussian_leg(n, sigma, tilde, side)
    expected = inner * outer
    const, dev = _constant_fit(back.series, ref, half)
    err = float(abs(const - expected) / abs(expected))
    return RoundTripReport(kind, beta, sigma, const, expected, dev, err, half,
                           {"inner": inner, "outer": outer, "lengthSigma": permutation_length(sigma)})


def sigma_orders(n):
    return list(permutations(range(1, n + 1)))


# --------------------------------------------------------------------------
# scaling law


def scaled_input(f: AnalyticSeries, a) -> AnalyticSeries:
    return f.scale_arguments(a)


def rescale_output(result: TransformResult, a) -> NCSeries:
    """Substitute d_j -> a_j^-1 d_j and divide by prod a_j."""
    a = [mpmath.mpmathify(x) for x in a]
    pref = 1 / mpmath.fprod(a)
    terms = {}
    for E, c in result.series.terms.items():
        w = pref
        for x, e in zip(a, E):
            w /= x ** e
        terms[E] = c * QScalar.numeric(w)
    return NCSeries(result.series.kind, result.series.n, result.series.N, terms)


def gaussian_family_polys(A) -> list:
    return [OneVarPoly({a: ONE}, _q(2)) for a in A]


# --------------------------------------------------------------------------
# the covector/vector symmetry


def psi_analytic(f: AnalyticSeries) -> AnalyticSeries:
    """Image of a covector series under x_j -> c_j d_(n+1-j), c_j = q^(-j + (n-1)/2)."""
    if f.kind != COVECTOR:
        raise ValueError("psi maps covector series")
    n = f.n
    q = current_q()
    c = [q ** (mpmath.mpf(n - 1) / 2 - j) for j in range(1, n + 1)]
    terms = []
    for t in f.terms:
        items = []
        coeff = t.coeff
        for j, e in enumerate(t.mono, start=1):
            if e:
                items.append(("x", n + 1 - j, e))
                coeff *= c[j - 1] ** e
        items.extend(("f", n + 1 - v, phi.scaled(c[v - 1])) for v, phi in t.factors)
        terms.extend(AnalyticSeries.product(VECTOR, n, items, coeff).terms)
    return AnalyticSeries(VECTOR, n, terms)


def psi_integral_sides(f: AnalyticSeries, w) -> tuple:
    """Both sides of psi(I f) = q^-n [psi(f) <| integral with bounds q^(2j-n-1) d_j].

    The left side is I f realized at z_j = c_j q^(1-j) w_(n+1-j) (the point whose
    lattice psi carries onto the right-hand bounds); the right side is the right
    global integral of psi(f) realized at w.
    """
    n = f.n
    q = current_q()
    w = [mpmath.mpmathify(x) for x in w]
    c = [q ** (mpmath.mpf(n - 1) / 2 - j) for j in range(1, n + 1)]
    gamma = [c[j - 1] * q ** (1 - j) * w[n - j] for j in range(1, n + 1)]
    lhs = global_integral(f, gamma, "I")
    scales = [q ** (2 * j - n - 1 - (n - j)) for j in range(1, n + 1)]
    rhs = q ** (-n) * right_global_integral(psi_analytic(f), w, "J", bound_scales=scales)
    return lhs, rhs
