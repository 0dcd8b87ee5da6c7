"""Analytic series kept as ordered products of one-variable functions.

A one-variable factor is p(t) * G(c t^2), where p is a polynomial and G is
1, the small exponential e_{q^4}(-c t^2) = 1/(-c t^2; q^4)_inf, or the big
exponential E_{q^4}(-c t^2) = (c t^2; q^4)_inf.  Point values use the product
formulas, so the functions can be evaluated far outside the disc where their
power series are numerically usable.

A `Term` is coeff * (normal-form monomial) * phi_1(y_v1) * ... * phi_m(y_vm)
in written order, one factor per variable.  When the written order disagrees
with the normal order the realized function couples the summation indices:
a pair of factors written out of order contributes q^(k_s k_t).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iproduct

import mpmath

from .qalgebra import COVECTOR, VECTOR, NCSeries, inversion_weight, lower_sum, upper_sum
from .scalars import QScalar, current_q, current_tol, qpoch_finite


def _mp(x):
    if isinstance(x, QScalar):
        return x.evaluate()
    return mpmath.mpmathify(x)


def _zero_threshold():
    return mpmath.ldexp(1, -mpmath.mp.prec + 12)


def big_exp_product(x, q4=None):
    """E_{q^4}(-x) = (x; q^4)_inf, exactly zero when x hits a point q^(-4m)."""
    q4 = current_q() ** 4 if q4 is None else q4
    tol = current_tol()
    thr = _zero_threshold()
    out = mpmath.mpf(1)
    p = mpmath.mpmathify(x)
    guard = 0
    while guard < 5:
        f = 1 - p
        if abs(f) < thr * max(1, abs(p)):
            return mpmath.mpf(0)
        out *= f
        if abs(p) < tol:
            guard += 1
        p *= q4
    return out


def small_exp_product(x, q4=None):
    """e_{q^4}(-x) = 1 / (-x; q^4)_inf (meromorphic continuation of the series)."""
    q4 = current_q() ** 4 if q4 is None else q4
    tol = current_tol()
    out = mpmath.mpf(1)
    p = mpmath.mpmathify(x)
    guard = 0
    while guard < 5:
        out *= 1 + p
        if abs(p) < tol:
            guard += 1
        p *= q4
    if out == 0:
        raise ZeroDivisionError("small q-exponential evaluated at a pole")
    return 1 / out


class OneVar:
    """p(t) * G(c t^2) with G in {1, e_{q^4}(-.), E_{q^4}(-.)}."""

    __slots__ = ("poly", "gauss", "c")

    def __init__(self, poly=None, gauss=None, c=0):
        if gauss not in (None, "e", "E"):
            raise ValueError(f"unknown gaussian type {gauss!r}")
        poly = {0: 1} if poly is None else poly
        self.poly = {m: _mp(a) for m, a in poly.items() if _mp(a) != 0}
        self.gauss = gauss
        self.c = _mp(c) if gauss else mpmath.mpf(0)

    @classmethod
    def monomial(cls, m=0, a=1):
        return cls({m: a})

    @classmethod
    def gaussian(cls, kind, c=1, poly=None):
        return cls(poly, kind, c)

    def is_zero(self):
        return not self.poly

    def key(self):
        return (tuple(sorted(self.poly.items())), self.gauss, self.c)

    def is_polynomial(self):
        return self.gauss is None

    def scaled(self, s) -> "OneVar":
        """t -> s t."""
        s = _mp(s)
        return OneVar({m: a * s ** m for m, a in self.poly.items()}, self.gauss, self.c * s * s)

    def times_poly(self, poly: dict) -> "OneVar":
        out: dict = {}
        for m1, a in self.poly.items():
            for m2, b in poly.items():
                out[m1 + m2] = out.get(m1 + m2, 0) + a * _mp(b)
        return OneVar(out, self.gauss, self.c)

    def times_monomial(self, m: int, a=1) -> "OneVar":
        return OneVar({k + m: v * _mp(a) for k, v in self.poly.items()}, self.gauss, self.c)

    def times_scalar(self, a) -> "OneVar":
        return self.times_monomial(0, a)

    def parity_part(self, parity: int) -> "OneVar":
        return OneVar({m: a for m, a in self.poly.items() if m % 2 == parity}, self.gauss, self.c)

    def gauss_value(self, t):
        if self.gauss is None:
            return mpmath.mpf(1)
        x = self.c * t * t
        if self.gauss == "e":
            return small_exp_product(x)
        return big_exp_product(x)

    def __call__(self, t):
        if not self.poly:
            return mpmath.mpf(0)
        p = mpmath.mpf(0)
        for m, a in self.poly.items():
            p += a * t ** m
        if p == 0:
            return p
        return p * self.gauss_value(t)

    def gauss_coefficient(self, k: int):
        """Coefficient of t^(2k) in the gaussian factor."""
        if self.gauss is None:
            return mpmath.mpf(1 if k == 0 else 0)
        q = current_q()
        q4 = q ** 4
        a = (-self.c) ** k / qpoch_finite(q4, q4, k)
        if self.gauss == "E":
            a *= q ** (2 * k * (k - 1))
        return a

    def series(self, K: int) -> dict:
        """Power-series coefficients up to degree K."""
        out: dict = {}
        g = [self.gauss_coefficient(k) for k in range(K // 2 + 1)] if self.gauss else [1]
        for m, a in self.poly.items():
            for k, b in enumerate(g):
                d = m + 2 * k
                if d > K:
                    break
                out[d] = out.get(d, 0) + a * b
        return {d: v for d, v in out.items() if v != 0}

    def derivative(self) -> "OneVar":
        """D_{q^2} phi(t) = (phi(t) - phi(q^2 t)) / ((1 - q^2) t)."""
        q2 = current_q() ** 2
        if self.gauss == "E":
            raise NotImplementedError("q-derivative of the big exponential factor is not supported")
        # e(-c q^4 t^2) = (1 + c t^2) e(-c t^2), so the result is again poly * e(-c t^2)
        shifted = {m: a * q2 ** m for m, a in self.poly.items()}
        if self.gauss == "e":
            extra = {m + 2: a * self.c for m, a in shifted.items()}
            for m, a in extra.items():
                shifted[m] = shifted.get(m, 0) + a
        num = dict(self.poly)
        for m, a in shifted.items():
            num[m] = num.get(m, 0) - a
        out = {}
        for m, a in num.items():
            if a == 0:
                continue
            if m == 0:
                if abs(a) > _zero_threshold():
                    raise ArithmeticError("q-derivative numerator is not divisible by t")
                continue
            out[m - 1] = a / (1 - q2)
        return OneVar(out, self.gauss, self.c)

    def __repr__(self):
        poly = " + ".join(f"{mpmath.nstr(a, 6)}*t^{m}" for m, a in sorted(self.poly.items()))
        g = "" if self.gauss is None else f" * {self.gauss}_q4(-{mpmath.nstr(self.c, 6)} t^2)"
        return f"OneVar({poly or '0'}{g})"


def inverted(kind: str, a: int, b: int) -> bool:
    """True when writing generator a before generator b is out of normal order."""
    return a > b if kind == COVECTOR else a < b


@dataclass(frozen=True)
class Term:
    coeff: object
    mono: tuple
    factors: tuple  # ((var, OneVar), ...) in written order, distinct variables


@dataclass(frozen=True)
class RealizedTerm:
    coeff: object
    factors: dict  # var -> OneVar
    couplings: frozenset  # frozenset of (a, b) variable pairs with a < b

    def partners(self, v):
        out = []
        for a, b in self.couplings:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def is_coupled(self):
        return bool(self.couplings)


def _expand_items(items):
    """Split pure-polynomial factors into monomials: list of (coeff, items) alternatives."""
    choices = []
    for it in items:
        if it[0] == "f" and it[2].is_polynomial():
            v, phi = it[1], it[2]
            choices.append([(a, ("x", v, m)) for m, a in phi.poly.items()] or [(0, None)])
        else:
            choices.append([(1, it)])
    out = []
    for combo in iproduct(*choices):
        c = mpmath.mpf(1)
        seq = []
        for a, it in combo:
            c *= a
            if it is not None:
                seq.append(it)
        if c != 0:
            out.append((c, seq))
    return out


def normalize_product(kind: str, n: int, coeff, items) -> list:
    """Turn a written product into normalized Terms.

    items: ('m', E) normal-form monomial, ('x', var, power) single generator power,
    or ('f', var, OneVar).
    """
    q = current_q()
    terms = []
    for c0, seq in _expand_items(items):
        coeff_t = _mp(coeff) * c0
        mono = (0,) * n
        factors: list = []
        ok = True
        for it in seq:
            if it[0] == "f":
                v, phi = it[1], it[2]
                if any(w == v for w, _ in factors):
                    raise NotImplementedError(
                        f"two gaussian factors in variable {v}; merge them before building the product")
                if phi.is_zero():
                    ok = False
                    break
                factors.append((v, phi))
                continue
            if it[0] == "m":
                E = it[1]
                order = range(n) if kind == COVECTOR else range(n - 1, -1, -1)
                gens = [(j + 1, E[j]) for j in order if E[j]]
            else:
                gens = [(it[1], it[2])] if it[2] else []
            for i, m in gens:
                pos = next((p for p, (w, _) in enumerate(factors) if w == i), None)
                stop = pos + 1 if pos is not None else 0
                for p in range(len(factors) - 1, stop - 1, -1):
                    w, phi = factors[p]
                    s = 1 if inverted(kind, w, i) else -1
                    factors[p] = (w, phi.scaled(q ** (s * m)))
                if pos is not None:
                    w, phi = factors[pos]
                    factors[pos] = (w, phi.times_monomial(m))
                else:
                    F = tuple(m if j == i - 1 else 0 for j in range(n))
                    wgt = inversion_weight(kind, mono, F)
                    coeff_t *= q ** wgt
                    mono = tuple(a + b for a, b in zip(mono, F))
        if ok and coeff_t != 0:
            terms.append(Term(coeff_t, mono, tuple(factors)))
    return terms


class AnalyticSeries:
    """A finite sum of normalized factored terms of one kind."""

    def __init__(self, kind: str, n: int, terms=()):
        if kind not in (COVECTOR, VECTOR):
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.n = n
        self.terms = tuple(terms)

    # -- construction ----------------------------------------------------

    @classmethod
    def product(cls, kind, n, items, coeff=1) -> "AnalyticSeries":
        return cls(kind, n, normalize_product(kind, n, coeff, items))

    @classmethod
    def from_ncseries(cls, f: NCSeries) -> "AnalyticSeries":
        terms = []
        for E, c in f.terms.items():
            terms.extend(normalize_product(f.kind, f.n, c.evaluate(), [("m", E)]))
        return cls(f.kind, f.n, terms)

    def _items(self, term):
        items = [("m", term.mono)] if any(term.mono) else []
        items.extend(("f", v, phi) for v, phi in term.factors)
        return items

    def __add__(self, o):
        if o.kind != self.kind or o.n != self.n:
            raise ValueError("series kinds or dimensions differ")
        return AnalyticSeries(self.kind, self.n, self.terms + o.terms)

    def __neg__(self):
        return self.scaled_by(-1)

    def __sub__(self, o):
        return self + (-o)

    def scaled_by(self, a) -> "AnalyticSeries":
        a = _mp(a)
        return AnalyticSeries(self.kind, self.n,
                              [Term(t.coeff * a, t.mono, t.factors) for t in self.terms])

    def __mul__(self, o):
        if isinstance(o, AnalyticSeries):
            return self.multiply(o)
        if isinstance(o, NCSeries):
            return self.multiply(AnalyticSeries.from_ncseries(o))
        return self.scaled_by(o)

    def __rmul__(self, o):
        if isinstance(o, NCSeries):
            return AnalyticSeries.from_ncseries(o).multiply(self)
        return self.scaled_by(o)

    def multiply(self, o: "AnalyticSeries") -> "AnalyticSeries":
        if o.kind != self.kind or o.n != self.n:
            raise ValueError("series kinds or dimensions differ")
        terms = []
        for s in self.terms:
            for t in o.terms:
                terms.extend(normalize_product(self.kind, self.n, s.coeff * t.coeff,
                                               self._items(s) + self._items(t)))
        return AnalyticSeries(self.kind, self.n, terms)

    def times_monomial(self, E, side="right") -> "AnalyticSeries":
        terms = []
        for t in self.terms:
            items = self._items(t)
            items = items + [("m", tuple(E))] if side == "right" else [("m", tuple(E))] + items
            terms.extend(normalize_product(self.kind, self.n, t.coeff, items))
        return AnalyticSeries(self.kind, self.n, terms)

    def scale_arguments(self, a) -> "AnalyticSeries":
        """f(a_1 y_1, ..., a_n y_n)."""
        a = [_mp(x) for x in a]
        terms = []
        for t in self.terms:
            c = t.coeff
            for x, e in zip(a, t.mono):
                c *= x ** e
            terms.append(Term(c, t.mono, tuple((v, phi.scaled(a[v - 1])) for v, phi in t.factors)))
        return AnalyticSeries(self.kind, self.n, terms)

    def parity_project(self, bits) -> "AnalyticSeries":
        """Keep the part with exponent parities `bits` (0 even, 1 odd) in every variable."""
        terms = []
        for t in self.terms:
            need = list(bits)
            for j, e in enumerate(t.mono):
                need[j] = (need[j] - e) % 2
            factors = []
            alive = True
            for v, phi in t.factors:
                part = phi.parity_part(need[v - 1])
                need[v - 1] = 0
                if part.is_zero():
                    alive = False
                    break
                factors.append((v, part))
            if alive and not any(need):
                terms.append(Term(t.coeff, t.mono, tuple(factors)))
        return AnalyticSeries(self.kind, self.n, terms)

    def even_part(self):
        return self.parity_project((0,) * self.n)

    def is_zero(self):
        return not self.terms

    # -- expansions ------------------------------------------------------

    def to_ncseries(self, N: int) -> NCSeries:
        """Truncated normal-form expansion with numeric coefficients."""
        total = NCSeries.zero(self.kind, self.n, N)
        for t in self.terms:
            acc = NCSeries.monomial(self.kind, self.n, N, t.mono, QScalar.numeric(t.coeff))
            for v, phi in t.factors:
                ser = {}
                for d, a in phi.series(N).items():
                    E = tuple(d if j == v - 1 else 0 for j in range(self.n))
                    ser[E] = QScalar.numeric(a)
                acc = acc * NCSeries(self.kind, self.n, N, ser)
            total = total + acc
        return total

    def realize(self) -> list:
        """Realized terms: coeff * prod phi_v(z_v) with index couplings."""
        q = current_q()
        out = []
        for t in self.terms:
            n = self.n
            if self.kind == COVECTOR:
                shift = [upper_sum(t.mono, j) for j in range(1, n + 1)]
            else:
                shift = [lower_sum(t.mono, j) for j in range(1, n + 1)]
            factors = {}
            for v, phi in t.factors:
                factors[v] = phi.scaled(q ** shift[v - 1])
            for j, e in enumerate(t.mono):
                if e:
                    v = j + 1
                    factors[v] = factors[v].times_monomial(e) if v in factors else OneVar.monomial(e)
            couplings = set()
            for s in range(len(t.factors)):
                for u in range(s + 1, len(t.factors)):
                    a, b = t.factors[s][0], t.factors[u][0]
                    if inverted(self.kind, a, b):
                        couplings.add((min(a, b), max(a, b)))
            out.append(RealizedTerm(t.coeff, factors, frozenset(couplings)))
        return out

    def evaluate_realized(self, point):
        """Value of the realized function f |> 1 (or 1 <| g) at a numeric point."""
        point = [_mp(z) for z in point]
        return sum((evaluate_realized_term(rt, point) for rt in self.realize()), mpmath.mpf(0))

    def __repr__(self):
        return f"AnalyticSeries({self.kind}, n={self.n}, {len(self.terms)} terms)"


def _scaled_term(rt: RealizedTerm, drop, scales: dict, coeff=None) -> RealizedTerm:
    factors = {}
    for v, phi in rt.factors.items():
        if v == drop:
            continue
        s = scales.get(v)
        factors[v] = phi.scaled(s) if s is not None else phi
    couplings = frozenset(p for p in rt.couplings if drop not in p)
    return RealizedTerm(rt.coeff if coeff is None else coeff, factors, couplings)


def evaluate_realized_term(rt: RealizedTerm, point, max_terms: int = 4000):
    """Point value of a realized term, expanding coupled factors as power series."""
    base_prec = mpmath.mp.prec
    guard = 40
    for _ in range(6):
        with mpmath.workprec(base_prec + guard):
            val, biggest = _eval_rt(rt, point, max_terms)
        need = 20
        if val != 0 and biggest > 0:
            need = int(mpmath.log(biggest / abs(val), 2)) + 24
        elif biggest > 0:
            need = int(mpmath.log(biggest, 2)) + base_prec
        if need <= guard:
            return +val
        guard = need + 8
    return +val


def _eval_rt(rt: RealizedTerm, point, max_terms):
    if not rt.couplings:
        val = rt.coeff
        for v, phi in rt.factors.items():
            val *= phi(point[v - 1])
            if val == 0:
                break
        return val, abs(val)
    counts = {}
    for a, b in rt.couplings:
        counts[a] = counts.get(a, 0) + 1
        counts[b] = counts.get(b, 0) + 1
    def usable(u):
        phi = rt.factors.get(u)
        z = abs(point[u - 1])
        # the small exponential's series only converges for |c z^2| < 1
        ok = phi is None or phi.gauss != "e" or abs(phi.c) * z * z < 1
        return (ok, counts[u], -z)

    v = max(sorted(counts), key=usable)
    if v not in rt.factors:
        return _eval_rt(_scaled_term(rt, v, {}), point, max_terms)
    phi = rt.factors[v]
    partners = rt.partners(v)
    q = current_q()
    z = point[v - 1]
    tol = current_tol()
    total = mpmath.mpf(0)
    biggest = mpmath.mpf(0)
    small_run = 0
    prev = None
    K = 64
    coeffs = phi.series(K)
    k = 0
    while True:
        if k > K:
            K *= 2
            if K > max_terms:
                from .calculus import DivergenceError
                raise DivergenceError("coupled expansion did not settle", {"variable": v})
            coeffs = phi.series(K)
        a = coeffs.get(k)
        if a is not None:
            sub = _scaled_term(rt, v, {p: q ** k for p in partners}, rt.coeff * a * z ** k)
            val, big = _eval_rt(sub, point, max_terms)
            total += val
            biggest = max(biggest, big, abs(val))
            mag = abs(val)
            if biggest > 0 and mag <= tol * biggest * mpmath.mpf(10) ** -5 and prev is not None and mag <= prev:
                small_run += 1
            else:
                small_run = 0
            prev = mag
            if small_run >= 5:
                break
            if phi.gauss is None and k >= max(phi.poly):
                break
        elif phi.gauss is None and k >= max(phi.poly, default=0):
            break
        k += 1
    return total, biggest
