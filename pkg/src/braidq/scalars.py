"""Scalars in the deformation parameter q.

An exact scalar is a ratio N(t)/D(t) with t = q^(1/2): N is a Laurent
polynomial with Gaussian-rational coefficients and D is a product of
cyclotomic polynomials.  Every denominator that shows up in q-calculus
(q-numbers, q-factorials, (q^a; q^b)_k) is of that shape, so the form is
canonical and equality is structural.

A numeric scalar wraps an mpmath complex number.  Mixing the two promotes
the exact one through the active value of q (see `use_params`).
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import mpmath
from mpmath import mp

mp.prec = 128


# --------------------------------------------------------------------------
# parameters and the active numeric context


@dataclass(frozen=True)
class Params:
    q: Fraction = Fraction(1, 2)
    n: int = 2
    N: int = 8
    precision: int = 128
    tol: float = 1e-20

    def __post_init__(self):
        q = Fraction(self.q) if not isinstance(self.q, Fraction) else self.q
        object.__setattr__(self, "q", q)
        if not 0 < q < 1:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        if self.n < 1:
            raise ValueError("dimension n must be at least 1")
        if self.N < 0:
            raise ValueError("truncation degree N must be nonnegative")
        if self.precision < 16:
            raise ValueError("precision below 16 bits is not supported")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def q_mp(self):
        return mpmath.mpf(self.q.numerator) / self.q.denominator


_active = {"params": Params()}


def current_params() -> Params:
    return _active["params"]


def current_q():
    return current_params().q_mp()


def current_tol():
    return mpmath.mpf(current_params().tol)


@contextmanager
def use_params(params: Params):
    """Make `params` the active q / precision / tolerance inside the block."""
    saved = _active["params"]
    _active["params"] = params
    with mpmath.workprec(params.precision):
        try:
            yield params
        finally:
            _active["params"] = saved


# --------------------------------------------------------------------------
# Gaussian rationals


class GaussQ:
    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if not isinstance(other, GaussQ):
            other = GaussQ(other)
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, o):
        return GaussQ(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussQ(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __mul__(self, o):
        if not o.im and not self.im:
            return GaussQ(self.re * o.re)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussQ(self.re / n, -self.im / n)

    def to_mp(self):
        re = mpmath.mpf(self.re.numerator) / self.re.denominator
        if not self.im:
            return mpmath.mpc(re, 0)
        return mpmath.mpc(re, mpmath.mpf(self.im.numerator) / self.im.denominator)

    def __repr__(self):
        return f"GaussQ({self.re}, {self.im})"


_ONE = GaussQ(1)


# --------------------------------------------------------------------------
# Laurent polynomials in t, stored as {exponent: GaussQ}


def _padd(a: dict, b: dict, sign=1) -> dict:
    out = dict(a)
    for e, c in b.items():
        v = out.get(e)
        v = (c if sign > 0 else -c) if v is None else (v + c if sign > 0 else v - c)
        if v:
            out[e] = v
        else:
            out.pop(e, None)
    return out


def _pmul(a: dict, b: dict) -> dict:
    out: dict = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            v = out.get(e)
            p = c1 * c2
            out[e] = p if v is None else v + p
    return {e: c for e, c in out.items() if c}


def _int_poly(coeffs) -> dict:
    return {i: GaussQ(c) for i, c in enumerate(coeffs) if c}


@lru_cache(maxsize=None)
def cyclotomic(d: int) -> tuple:
    """Integer coefficients (lowest degree first) of the d-th cyclotomic polynomial."""
    num = [-1] + [0] * (d - 1) + [1]
    for e in range(1, d):
        if d % e == 0:
            num, rem = _int_divmod(num, list(cyclotomic(e)))
            assert not any(rem)
    return tuple(num)


def _int_divmod(num, den):
    num = list(num)
    dn = len(den) - 1
    if len(num) - 1 < dn:
        return [0], num
    quot = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i] // den[-1]
        quot[i - dn] = c
        if c:
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    return quot, num[:dn]


@lru_cache(maxsize=None)
def _cyclo_power(d: int, k: int) -> tuple:
    p = {0: _ONE}
    cp = _int_poly(cyclotomic(d))
    for _ in range(k):
        p = _pmul(p, cp)
    return tuple(sorted(p.items()))


def _den_poly(den) -> dict:
    p = {0: _ONE}
    for d, k in den:
        p = _pmul(p, dict(_cyclo_power(d, k)))
    return p


def _try_divide(num: dict, d: int):
    """Exact division of a Laurent polynomial by Phi_d, or None."""
    if not num:
        return {}
    lo = min(num)
    hi = max(num)
    dense = [num.get(lo + i, GaussQ()) for i in range(hi - lo + 1)]
    cp = cyclotomic(d)
    dn = len(cp) - 1
    if len(dense) - 1 < dn:
        return None
    quot = [GaussQ()] * (len(dense) - dn)
    for i in range(len(dense) - 1, dn - 1, -1):
        c = dense[i]  # Phi_d is monic
        quot[i - dn] = c
        if c:
            for j, cj in enumerate(cp):
                if cj:
                    dense[i - dn + j] = dense[i - dn + j] - c * GaussQ(cj)
    if any(dense[:dn]):
        return None
    return {lo + i: c for i, c in enumerate(quot) if c}


def _totient(d: int) -> int:
    r, m, p = d, d, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            r -= r // p
        p += 1
    if m > 1:
        r -= r // m
    return r


def _factor_polynomial(num: dict):
    """Write num = c * t^s * prod Phi_d^k; raise if num has other factors."""
    if not num:
        raise ZeroDivisionError("division by zero")
    key = tuple(sorted(num.items(), key=lambda kv: kv[0]))
    return _factor_cached(tuple((e, c.re, c.im) for e, c in key))


@lru_cache(maxsize=4096)
def _factor_cached(key):
    rest = {e: GaussQ(re, im) for e, re, im in key}
    factors = []
    d = 1
    while True:
        deg = max(rest) - min(rest)
        if deg == 0:
            break
        if d > 4 * deg + 8:
            raise ValueError("denominator is not a product of cyclotomic polynomials")
        if _totient(d) <= deg:
            k = 0
            while True:
                quot = _try_divide(rest, d)
                if quot is None:
                    break
                rest = quot
                k += 1
            if k:
                factors.append((d, k))
        d += 1
    (s, c), = rest.items()
    return c, s, tuple(factors)


def _merge_den(a, b, sign=1):
    out = dict(a)
    for d, k in b:
        out[d] = out.get(d, 0) + sign * k
    return tuple(sorted((d, k) for d, k in out.items() if k))


# --------------------------------------------------------------------------
# QScalar


class QScalar:
    """A scalar in q: exact (rational function with cyclotomic denominator) or numeric."""

    __slots__ = ("_num", "_den", "_val")

    def __init__(self, value=0):
        if isinstance(value, QScalar):
            self._num, self._den, self._val = value._num, value._den, value._val
            return
        self._num = None
        self._den = ()
        self._val = None
        if isinstance(value, GaussQ):
            self._num = {0: value} if value else {}
        elif isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            self._num = {0: GaussQ(value)} if value else {}
        elif isinstance(value, (float, complex, mpmath.mpf, mpmath.mpc)):
            self._val = mpmath.mpc(value)
        else:
            raise TypeError(f"cannot build a QScalar from {type(value).__name__}")

    # -- constructors ----------------------------------------------------

    @classmethod
    def _exact(cls, num: dict, den=()):
        s = cls.__new__(cls)
        s._val = None
        if not num:
            s._num, s._den = {}, ()
            return s
        den = dict(den)
        for d in list(den):
            while den[d] > 0:
                quot = _try_divide(num, d)
                if quot is None:
                    break
                num = quot
                den[d] -= 1
        s._num = num
        s._den = tuple(sorted((d, k) for d, k in den.items() if k))
        return s

    @classmethod
    def numeric(cls, value):
        s = cls.__new__(cls)
        s._num, s._den, s._val = None, (), mpmath.mpc(value)
        return s

    @classmethod
    def q_power(cls, exponent) -> "QScalar":
        """q**exponent for an integer or half-integer exponent."""
        e2 = Fraction(exponent) * 2
        if e2.denominator != 1:
            raise ValueError(f"q exponents must be half-integers, got {exponent}")
        return cls._exact({int(e2): _ONE})

    @classmethod
    def imag_unit(cls) -> "QScalar":
        return cls._exact({0: GaussQ(0, 1)})

    # -- queries ---------------------------------------------------------

    @property
    def is_exact(self) -> bool:
        return self._val is None

    def is_zero(self) -> bool:
        if self._val is None:
            return not self._num
        return self._val == 0

    def __bool__(self):
        return not self.is_zero()

    def laurent_terms(self) -> dict:
        """Numerator terms keyed by q-exponent (half-integers) when the denominator is trivial."""
        if self._val is not None:
            raise ValueError("numeric scalar has no Laurent expansion")
        if self._den:
            raise ValueError("scalar has a nontrivial denominator")
        return {Fraction(e, 2): c for e, c in self._num.items()}

    def denominator_factors(self) -> tuple:
        """Cyclotomic factors (d, k) of the denominator, as polynomials in q^(1/2)."""
        return self._den

    # -- conversion ------------------------------------------------------

    def evaluate(self, q=None):
        """Complex value at numeric q (defaults to the active q)."""
        if self._val is not None:
            return self._val
        if q is None:
            q = current_q()
        q = mpmath.mpf(q)
        t = mpmath.sqrt(q)
        num = mpmath.mpc(0)
        for e, c in self._num.items():
            # integer powers of q stay exact when q is a dyadic rational
            num += c.to_mp() * (q ** (e // 2) if e % 2 == 0 else t ** e)
        if self._den:
            den = mpmath.mpf(1)
            for d, k in self._den:
                den *= mpmath.polyval(list(reversed(cyclotomic(d))), t) ** k
            num /= den
        return num

    def to_numeric(self, q=None) -> "QScalar":
        return QScalar.numeric(self.evaluate(q))

    def __complex__(self):
        return complex(self.evaluate())

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(o):
        if isinstance(o, QScalar):
            return o
        return QScalar(o)

    _SCALAR_TYPES = (int, Fraction, float, complex, mpmath.mpf, mpmath.mpc, GaussQ)

    def __add__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        o = self._coerce(o)
        if self._val is not None or o._val is not None:
            return QScalar.numeric(self.evaluate() + o.evaluate())
        if not self._den and not o._den:
            return QScalar._exact(_padd(self._num, o._num))
        if self._den == o._den:
            return QScalar._exact(_padd(self._num, o._num), self._den)
        common = dict(self._den)
        for d, k in o._den:
            common[d] = max(common.get(d, 0), k)
        common = tuple(sorted(common.items()))
        a = _pmul(self._num, _den_poly(_merge_den(common, self._den, -1)))
        b = _pmul(o._num, _den_poly(_merge_den(common, o._den, -1)))
        return QScalar._exact(_padd(a, b), common)

    __radd__ = __add__

    def __neg__(self):
        if self._val is not None:
            return QScalar.numeric(-self._val)
        return QScalar._exact({e: -c for e, c in self._num.items()}, self._den)

    def __sub__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        return self._coerce(o) + (-self)

    def __mul__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        o = self._coerce(o)
        if self._val is not None or o._val is not None:
            return QScalar.numeric(self.evaluate() * o.evaluate())
        return QScalar._exact(_pmul(self._num, o._num), _merge_den(self._den, o._den))

    __rmul__ = __mul__

    def reciprocal(self) -> "QScalar":
        if self._val is not None:
            if self._val == 0:
                raise ZeroDivisionError("division by zero")
            return QScalar.numeric(1 / self._val)
        unit, shift, factors = _factor_polynomial(self._num)
        num = {-shift: unit.inverse()}
        num = _pmul(num, _den_poly(self._den))
        return QScalar._exact(num, factors)

    def __truediv__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        return self * self._coerce(o).reciprocal()

    def __rtruediv__(self, o):
        if not isinstance(o, QScalar) and not isinstance(o, QScalar._SCALAR_TYPES):
            return NotImplemented
        return self._coerce(o) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are supported")
        if k < 0:
            return self.reciprocal() ** (-k)
        out = QScalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "QScalar":
        """Complex conjugate, treating q as real."""
        if self._val is not None:
            return QScalar.numeric(mpmath.conj(self._val))
        return QScalar._exact({e: GaussQ(c.re, -c.im) for e, c in self._num.items()}, self._den)

    # -- comparison ------------------------------------------------------

    def __eq__(self, o):
        try:
            o = self._coerce(o)
        except TypeError:
            return NotImplemented
        if self._val is None and o._val is None:
            return self._den == o._den and self._num == o._num
        return self.evaluate() == o.evaluate()

    def __hash__(self):
        if self._val is not None:
            return hash(self._val)
        return hash((tuple(sorted(self._num.items(), key=lambda kv: kv[0])), self._den))

    def isclose(self, o, rel=1e-12, abs_tol=0.0) -> bool:
        a = self.evaluate()
        b = self._coerce(o).evaluate()
        return abs(a - b) <= max(rel * max(abs(a), abs(b)), abs_tol)

    # -- text ------------------------------------------------------------

    def __repr__(self):
        return f"QScalar({format_scalar(self)})"

    def __str__(self):
        return format_scalar(self)


ZERO = QScalar(0)
ONE = QScalar(1)
Q = QScalar.q_power(1)
I_UNIT = QScalar.imag_unit()


def as_scalar(x) -> QScalar:
    return x if isinstance(x, QScalar) else QScalar(x)


# --------------------------------------------------------------------------
# formatting


def _fmt_frac(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _fmt_gauss(c: GaussQ) -> str:
    if not c.im:
        return _fmt_frac(c.re)
    if not c.re:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{_fmt_frac(c.im)}*i"
    im = f"{_fmt_frac(abs(c.im))}*i" if abs(c.im) != 1 else "i"
    return f"({_fmt_frac(c.re)}{' - ' if c.im < 0 else ' + '}{im})"


def _fmt_qpow(e2: int) -> str:
    if e2 == 2:
        return "q"
    if e2 % 2 == 0:
        return f"q^{e2 // 2}" if e2 > 0 else f"q^({e2 // 2})"
    return f"q^({e2}/2)"


def _fmt_laurent(num: dict) -> str:
    if not num:
        return "0"
    parts = []
    for e2 in sorted(num):
        c = num[e2]
        cs = _fmt_gauss(c)
        neg = False
        if cs.startswith("-"):
            neg, cs = True, cs[1:]
        if e2 == 0:
            body = cs
        elif cs == "1":
            body = _fmt_qpow(e2)
        else:
            body = f"{cs}*{_fmt_qpow(e2)}"
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _fmt_numeric(v) -> str:
    digits = max(int(mp.prec * 0.30103) + 2, 10)
    re, im = mpmath.nstr(v.real, digits), mpmath.nstr(v.imag, digits)
    if v.imag == 0:
        return re
    if v.real == 0:
        return f"{im}*i"
    return f"({re} + {im}*i)" if v.imag > 0 else f"({re} - {mpmath.nstr(-v.imag, digits)}*i)"


def format_scalar(s: QScalar) -> str:
    """Canonical text form; parseable by the command-line expression reader."""
    if not s.is_exact:
        return _fmt_numeric(s._val)
    num = _fmt_laurent(s._num)
    if not s._den:
        return num
    if not is_atomic_text(num):
        num = f"({num})"
    return f"{num}/({_fmt_laurent(_den_poly(s._den))})"


def is_atomic_text(text: str) -> bool:
    """True when the formatted scalar needs no parentheses as a product factor."""
    depth = 0
    for pos, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and pos > 0 and ch in "+-/":
            return False
    return True


# --------------------------------------------------------------------------
# q-numbers and friends


def q_number(m: int, base) -> QScalar:
    """[m]_base = 1 + base + ... + base^(m-1)."""
    if m < 0:
        raise ValueError("q_number needs m >= 0")
    base = as_scalar(base)
    out, p = QScalar(0), QScalar(1)
    for _ in range(m):
        out = out + p
        p = p * base
    return out


def q_factorial(m: int, base) -> QScalar:
    if m < 0:
        raise ValueError("q_factorial needs m >= 0")
    out = QScalar(1)
    for j in range(1, m + 1):
        out = out * q_number(j, base)
    return out


def q_binomial(a: int, b: int, base) -> QScalar:
    """Gaussian binomial, built by the Pascal rule so it stays a polynomial."""
    if not 0 <= b <= a:
        raise ValueError(f"q_binomial needs 0 <= b <= a, got a={a}, b={b}")
    base = as_scalar(base)
    row = [QScalar(1)]
    for r in range(1, a + 1):
        new = [QScalar(1)] * (r + 1)
        for k in range(1, r):
            # [r, k] = [r-1, k-1] + base^k [r-1, k]
            new[k] = row[k - 1] + base ** k * row[k]
        row = new
    return row[b]


class TruncatedProduct(NamedTuple):
    value: QScalar
    index: int  # number of factors multiplied, guard factors included


GUARD_FACTORS = 5


def q_pochhammer(a, base, k, tol=None):
    """(a; base)_k.  For k = math.inf returns a TruncatedProduct."""
    a, base = as_scalar(a), as_scalar(base)
    if k == math.inf:
        val, idx = qpoch_inf(a.evaluate(), base.evaluate(), tol)
        return TruncatedProduct(QScalar.numeric(val), idx)
    if not isinstance(k, int) or k < 0:
        raise ValueError("k must be a nonnegative integer or math.inf")
    out, p = QScalar(1), a
    for _ in range(k):
        out = out * (1 - p)
        p = p * base
    return out


def qpoch_inf(a, base, tol=None):
    """Raw mpmath (a; base)_inf: stops once |a base^l| < tol, plus guard factors."""
    base = mpmath.mpmathify(base)
    if abs(base) >= 1:
        raise ValueError("infinite q-Pochhammer needs |base| < 1")
    tol = current_tol() if tol is None else mpmath.mpf(tol)
    out = mpmath.mpf(1)
    p = mpmath.mpmathify(a)
    l = 0
    while abs(p) >= tol:
        out *= 1 - p
        p *= base
        l += 1
    for _ in range(GUARD_FACTORS):
        out *= 1 - p
        p *= base
        l += 1
    return out, l


def qpoch_inf_value(a, base, tol=None):
    return qpoch_inf(a, base, tol)[0]


def qpoch_finite(a, base, k: int):
    """Raw mpmath (a; base)_k."""
    out = mpmath.mpf(1)
    p = mpmath.mpmathify(a)
    for _ in range(k):
        out *= 1 - p
        p *= base
    return out


def gauss_constant(kind: str, gamma=None, q=None, tol=None) -> QScalar:
    """Closed forms of the one-variable Jackson integrals of the q^2-Gaussians.

    kind 'c': integral of e_{q^4}(-t^2) over the lattice through gamma.
    kind 'b': integral of E_{q^4}(-q^4 t^2) over the lattice through 1.
    """
    q = current_q() if q is None else mpmath.mpf(q)
    q2, q4 = q * q, q ** 4
    P = lambda a, b: qpoch_inf_value(a, b, tol)
    if kind == "c":
        if gamma is None or gamma == 0:
            raise ValueError("gauss_constant('c') needs a nonzero gamma")
        g = mpmath.mpmathify(gamma)
        g2, gm2 = g * g, 1 / (g * g)
        num = 2 * g * (1 - q2) * P(q4, q4) * P(-q2 * g2, q4) * P(-q2 * gm2, q4)
        den = P(-g2, q4) * P(-q4 * gm2, q4) * P(q2, q4)
        return QScalar.numeric(num / den)
    if kind == "b":
        return QScalar.numeric((1 - q2) * P(q2, q2) * P(-q2, q2) * P(-1, q2))
    raise ValueError(f"unknown gauss_constant kind {kind!r}")


def eval_exact(s: QScalar, q, precision: int | None = None) -> QScalar:
    """Substitute a numeric q into an exact scalar."""
    if precision is None:
        return s.to_numeric(q)
    with mpmath.workprec(precision):
        return s.to_numeric(q)
