"""q-exponentials, the q^2-Gaussians g and G, discrete q-Hermite polynomials and
the two 1phi1 identities in q-commuting variables."""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .factored import AnalyticSeries, OneVar
from .qalgebra import COVECTOR, CommutingSeries, NCSeries
from .scalars import ONE, ZERO, QScalar, as_scalar


def _q(k):
    return QScalar.q_power(k)


def _poch_self(base: QScalar, k: int) -> QScalar:
    """(base; base)_k."""
    out = ONE
    for j in range(1, k + 1):
        out = out * (ONE - base ** j)
    return out


def _series_power(arg, k, cache):
    if k not in cache:
        cache[k] = _series_power(arg, k - 1, cache) * arg
    return cache[k]


def q_exponential(kind: str, base, arg, N: int | None = None):
    """sum_k arg^k / (base; base)_k (small) or sum_k base^(k(k-1)/2) arg^k / (base; base)_k (big).

    `arg` is an NCSeries or CommutingSeries with zero constant term; products
    use the series' own multiplication, so noncommuting order is respected.
    """
    if kind not in ("small", "big"):
        raise ValueError(f"kind must be small or big, got {kind!r}")
    base = as_scalar(base)
    if not arg.coefficient((0,) * arg.n).is_zero():
        raise ValueError("q-exponential argument must have zero constant term")
    if N is not None and N != arg.N:
        arg = _with_N(arg, N)
    N = arg.N
    total = _one_like(arg)
    powers = {0: _one_like(arg)}
    for k in range(1, N + 1):
        pk = _series_power(arg, k, powers)
        if not pk.terms:
            break
        w = ONE / _poch_self(base, k)
        if kind == "big":
            w = w * base ** (k * (k - 1) // 2)
        total = total + _scale(pk, w)
    return total


def _one_like(s):
    if isinstance(s, NCSeries):
        return NCSeries.one(s.kind, s.n, s.N)
    return CommutingSeries(s.n, s.N, {(0,) * s.n: ONE})


def _with_N(s, N):
    if isinstance(s, NCSeries):
        return s.with_N(N)
    return CommutingSeries(s.n, N, {E: c for E, c in s.terms.items() if sum(E) <= N})


def _scale(s, w):
    if isinstance(s, NCSeries):
        return s * w
    return CommutingSeries(s.n, s.N, {E: c * w for E, c in s.terms.items() if not (c * w).is_zero()})


# --------------------------------------------------------------------------
# Gaussians


def _default_order(kind: str, side: str, n: int) -> list:
    """Variable order of the one-variable factors that equals the joint-argument form."""
    up = list(range(1, n + 1))
    increasing = (kind == "g") == (side == COVECTOR)
    return up if increasing else up[::-1]


def _scales(scale, n):
    if scale is None:
        return [ONE] * n
    if not isinstance(scale, (list, tuple)):
        scale = [scale] * n
    if len(scale) != n:
        raise ValueError(f"need {n} scales")
    return [as_scalar(s) for s in scale]


def gaussian(kind: str, n: int, N: int, scale=None, side: str = COVECTOR, order=None) -> NCSeries:
    """Ordered product of one-variable q^4-exponentials e(-(s_j y_j)^2) (kind g) or E(-(s_j y_j)^2) (kind G).

    By default the factors are ordered so that the product equals the
    joint form of sum_j (s_j y_j)^2: increasing for g on covectors, decreasing
    for G; the vector side is mirrored.
    """
    if kind not in ("g", "G"):
        raise ValueError(f"gaussian kind must be g or G, got {kind!r}")
    s = _scales(scale, n)
    order = _default_order(kind, side, n) if order is None else list(order)
    q4 = _q(4)
    out = NCSeries.one(side, n, N)
    for j in order:
        arg = NCSeries.generator(side, n, N, j, 2) * (-(s[j - 1] ** 2))
        out = out * q_exponential("small" if kind == "g" else "big", q4, arg)
    return out


def gaussian_joint(kind: str, n: int, N: int, scale=None, side: str = COVECTOR) -> NCSeries:
    """The single q-exponential of -sum_j (s_j y_j)^2 (test oracle for the factorization)."""
    s = _scales(scale, n)
    arg = NCSeries.zero(side, n, N)
    for j in range(1, n + 1):
        arg = arg + NCSeries.generator(side, n, N, j, 2) * (-(s[j - 1] ** 2))
    return q_exponential("small" if kind == "g" else "big", _q(4), arg)


def factorization_holds(kind: str, n: int, N: int, side: str = COVECTOR) -> bool:
    return gaussian(kind, n, N, side=side) == gaussian_joint(kind, n, N, side=side)


def gaussian_analytic(kind: str, n: int, scale=None, side: str = COVECTOR, order=None,
                      polys=None) -> AnalyticSeries:
    """Point-evaluable form of the same ordered product.

    `polys` optionally attaches a one-variable polynomial (dict degree -> coefficient,
    or a OneVarPoly) to each variable's factor, e.g. x_j^a_j or a Hermite polynomial.
    """
    s = [x.evaluate() for x in _scales(scale, n)]
    order = _default_order(kind, side, n) if order is None else list(order)
    gauss = "e" if kind == "g" else "E"
    items = []
    for j in order:
        p = None if polys is None else polys[j - 1]
        if isinstance(p, OneVarPoly):
            p = p.numeric()
        items.append(("f", j, OneVar.gaussian(gauss, s[j - 1] ** 2, p)))
    return AnalyticSeries.product(side, n, items)


# --------------------------------------------------------------------------
# discrete q-Hermite polynomials


@dataclass(frozen=True)
class OneVarPoly:
    coefficients: dict  # degree -> QScalar
    base: QScalar
    kind: str = ""
    index: int = 0

    @property
    def degree(self) -> int:
        return max(self.coefficients, default=-1)

    def coefficient(self, m: int) -> QScalar:
        return self.coefficients.get(m, ZERO)

    def numeric(self) -> dict:
        return {m: c.evaluate() for m, c in self.coefficients.items()}

    def __call__(self, z):
        z = mpmath.mpmathify(z)
        return sum((c * z ** m for m, c in self.numeric().items()), mpmath.mpf(0))

    def parity(self) -> int:
        return self.degree % 2

    def __str__(self):
        from .scalars import format_scalar, is_atomic_text
        parts = []
        for m in sorted(self.coefficients, reverse=True):
            c = format_scalar(self.coefficients[m])
            if not is_atomic_text(c):
                c = f"({c})"
            mono = "" if m == 0 else ("z" if m == 1 else f"z^{m}")
            if not mono:
                parts.append(c)
            elif c == "1":
                parts.append(mono)
            elif c == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


def hermite(kind: str, l: int, base=None) -> OneVarPoly:
    """Discrete q-Hermite polynomial from its explicit finite sum, base b (default q^2).

    I:  (b;b)_l sum_k (-1)^k b^(k(k-1)) z^(l-2k) / ((b^2;b^2)_k (b;b)_(l-2k))
    II: (b;b)_l sum_k (-1)^k b^(-2kl+k(2k+1)) z^(l-2k) / ((b^2;b^2)_k (b;b)_(l-2k))
    """
    if kind not in ("I", "II"):
        raise ValueError(f"Hermite kind must be I or II, got {kind!r}")
    if l < 0:
        raise ValueError("Hermite index must be nonnegative")
    b = _q(2) if base is None else as_scalar(base)
    lead = _poch_self(b, l)
    coeffs = {}
    for k in range(l // 2 + 1):
        e = k * (k - 1) if kind == "I" else -2 * k * l + k * (2 * k + 1)
        c = lead * b ** e / (_poch_self(b * b, k) * _poch_self(b, l - 2 * k))
        if k % 2:
            c = -c
        coeffs[l - 2 * k] = c
    return OneVarPoly(coeffs, b, kind, l)


# --------------------------------------------------------------------------
# 1phi1 identities in two q-commuting variables (x2 x1 = q x1 x2)


def _inverse_finite_poch(n: int, N: int, x: int, l: int) -> NCSeries:
    """1/(x_x; q)_l as a power series in the single variable x_x."""
    out = NCSeries.one(COVECTOR, n, N)
    for j in range(l):
        geo = {tuple(m if i == x - 1 else 0 for i in range(n)): _q(j * m) for m in range(N + 1)}
        out = out * NCSeries(COVECTOR, n, N, geo)
    return out


def phi11_identity_suite(N: int, perturb: bool = False) -> dict:
    """Expand both sides of the 1phi1 identities to degree N and report discrepancies.

    1. E_q(-x1-x2) = E_q(-x2) E_q(-x1) = E_q(-x1) 1phi1(0; x1; q, x2)
    2. sum_l (-1)^l q^(l(l-1)/2) x1^l (x2; q)_l / (q;q)_l = E_q(x1 x2) E_q(-x1)
    with x1 written before x2.  perturb=True uses base q^2 on one side (a negative control).
    """
    n = 2
    q = _q(1)
    other = _q(2) if perturb else q
    x1 = NCSeries.generator(COVECTOR, n, N, 1)
    x2 = NCSeries.generator(COVECTOR, n, N, 2)
    one = NCSeries.one(COVECTOR, n, N)

    joint = q_exponential("big", other, -(x1 + x2))
    ordered = q_exponential("big", q, -x2) * q_exponential("big", q, -x1)
    phi = NCSeries.zero(COVECTOR, n, N)
    for l in range(N + 1):
        w = q ** (l * (l - 1) // 2) / _poch_self(q, l)
        if l % 2:
            w = -w
        phi = phi + _inverse_finite_poch(n, N, 1, l) * (x2 ** l) * w
    via_phi = q_exponential("big", q, -x1) * phi

    lhs2 = NCSeries.zero(COVECTOR, n, N)
    for l in range(N + 1):
        poch = one
        for j in range(l):
            poch = poch * (one - x2 * q ** j)
        w = other ** (l * (l - 1) // 2) / _poch_self(other, l)
        if l % 2:
            w = -w
        lhs2 = lhs2 + (x1 ** l) * poch * w
    rhs2 = q_exponential("big", q, x1 * x2) * q_exponential("big", q, -x1)

    def gap(a, b):
        d = a - b
        return len(d.terms), d.max_abs_difference(NCSeries.zero(COVECTOR, n, N)) if d.terms else 0.0

    report = {
        "N": N,
        "joint_vs_ordered": gap(joint, ordered),
        "ordered_vs_phi11": gap(ordered, via_phi),
        "second_identity": gap(lhs2, rhs2),
    }
    report["exact"] = all(v[0] == 0 for k, v in report.items() if isinstance(v, tuple))
    return report


def derivative_identity_holds(n: int, N: int) -> bool:
    """d_j g = -x_j/(1-q^2) g through degree N-1 for every j."""
    from .calculus import partial_left

    g = gaussian("g", n, N)
    for j in range(1, n + 1):
        lhs = partial_left(g, j).with_N(N - 1)
        rhs = (NCSeries.generator(COVECTOR, n, N, j) * g) * (-(ONE / (ONE - _q(2))))
        if lhs != rhs.with_N(N - 1):
            return False
    return True

