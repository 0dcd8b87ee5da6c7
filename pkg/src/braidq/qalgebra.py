"""Normal-form series in the q-commuting covector (x) and vector (d) algebras.

Covector generators satisfy x_i x_j = q x_j x_i for i > j and are stored in
ascending order x1^e1 ... xn^en.  Vector generators satisfy d_i d_j = q d_j d_i
for i < j and are stored in descending order dn^en ... d1^e1.  Series are
truncated at total degree N; a product that drops terms sets `truncated`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as iproduct

from .scalars import ONE, ZERO, QScalar, as_scalar, format_scalar, is_atomic_text

COVECTOR = "covector"
VECTOR = "vector"
KINDS = (COVECTOR, VECTOR)


# --------------------------------------------------------------------------
# multi-indices (plain tuples, generators numbered from 1)


def lower_sum(E, i: int) -> int:
    """E_i = sum of e_j over j < i."""
    return sum(E[: i - 1])


def upper_sum(E, i: int) -> int:
    """E^i = sum of e_j over j > i."""
    return sum(E[i:])


def unit_index(n: int, i: int) -> tuple:
    return tuple(1 if j == i - 1 else 0 for j in range(n))


def indices_up_to(n: int, N: int):
    """All multi-indices of length n and total degree <= N, by degree then lexicographically."""
    out = []
    for d in range(N + 1):
        out.extend(indices_of_degree(n, d))
    return out


def indices_of_degree(n: int, d: int):
    if n == 1:
        return [(d,)]
    out = []
    for e in range(d, -1, -1):
        for rest in indices_of_degree(n - 1, d - e):
            out.append((e,) + rest)
    return out


def add_indices(E, F):
    return tuple(a + b for a, b in zip(E, F))


def inversion_weight(kind: str, E, F) -> int:
    """Exponent w with mono(E) * mono(F) = q^w mono(E + F) in normal form."""
    n = len(E)
    w = 0
    if kind == COVECTOR:
        acc = 0  # sum of f_j over j < i
        for i in range(n):
            w += E[i] * acc
            acc += F[i]
    else:
        acc = 0  # sum of f_j over j > i
        for i in range(n - 1, -1, -1):
            w += E[i] * acc
            acc += F[i]
    return w


def _qpow_cached(k: int, _cache={}):
    s = _cache.get(k)
    if s is None:
        s = QScalar.q_power(k)
        _cache[k] = s
    return s


# --------------------------------------------------------------------------
# parity vectors


@dataclass(frozen=True)
class Parity:
    """A vector of signs; '+' is even, '-' is odd."""

    signs: tuple

    def __post_init__(self):
        if any(s not in "+-" for s in self.signs):
            raise ValueError(f"parity signs must be '+' or '-', got {self.signs}")

    @classmethod
    def parse(cls, text: str) -> "Parity":
        return cls(tuple(text.replace(",", "").strip()))

    @classmethod
    def of(cls, E) -> "Parity":
        return cls(tuple("-" if e % 2 else "+" for e in E))

    @classmethod
    def even(cls, n: int) -> "Parity":
        return cls(("+",) * n)

    @property
    def n(self) -> int:
        return len(self.signs)

    def bits(self) -> tuple:
        """B(beta) in {0,1}^n."""
        return tuple(1 if s == "-" else 0 for s in self.signs)

    def lower(self, k: int) -> int:
        return lower_sum(self.bits(), k)

    def upper(self, k: int) -> int:
        return upper_sum(self.bits(), k)

    def matches(self, E) -> bool:
        return all(e % 2 == b for e, b in zip(E, self.bits()))

    def __str__(self):
        return "".join(self.signs)


# --------------------------------------------------------------------------
# series types


def _clean(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if not v.is_zero()}


@dataclass(frozen=True, eq=False)
class NCSeries:
    kind: str
    n: int
    N: int
    terms: dict = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        clean = {}
        for E, c in self.terms.items():
            E = tuple(E)
            if len(E) != self.n or any(e < 0 for e in E):
                raise ValueError(f"bad multi-index {E} for n={self.n}")
            c = as_scalar(c)
            if sum(E) <= self.N and not c.is_zero():
                clean[E] = c
        object.__setattr__(self, "terms", clean)

    # -- constructors ----------------------------------------------------

    @classmethod
    def zero(cls, kind, n, N):
        return cls(kind, n, N, {})

    @classmethod
    def one(cls, kind, n, N):
        return cls(kind, n, N, {(0,) * n: ONE})

    @classmethod
    def monomial(cls, kind, n, N, E, coeff=ONE):
        return cls(kind, n, N, {tuple(E): as_scalar(coeff)})

    @classmethod
    def generator(cls, kind, n, N, i, power=1):
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} out of range 1..{n}")
        E = [0] * n
        E[i - 1] = power
        return cls.monomial(kind, n, N, E)

    # -- basic queries ---------------------------------------------------

    def coefficient(self, E) -> QScalar:
        return self.terms.get(tuple(E), ZERO)

    def is_exact(self) -> bool:
        return all(c.is_exact for c in self.terms.values())

    def degree(self) -> int:
        return max((sum(E) for E in self.terms), default=-1)

    def constant_term(self) -> QScalar:
        return self.coefficient((0,) * self.n)

    def _like(self, terms, truncated=None):
        return NCSeries(self.kind, self.n, self.N, terms,
                        self.truncated if truncated is None else truncated)

    def with_N(self, N: int) -> "NCSeries":
        lost = any(sum(E) > N for E in self.terms)
        return NCSeries(self.kind, self.n, N, self.terms, self.truncated or lost)

    def map_coefficients(self, fn) -> "NCSeries":
        return self._like({E: fn(E, c) for E, c in self.terms.items()})

    def to_numeric(self, q=None) -> "NCSeries":
        return self.map_coefficients(lambda E, c: c.to_numeric(q))

    # -- arithmetic ------------------------------------------------------

    def _check(self, o):
        if not isinstance(o, NCSeries) or o.kind != self.kind or o.n != self.n:
            raise ValueError("series kinds or dimensions differ")

    def __add__(self, o):
        if not isinstance(o, NCSeries):
            return self + NCSeries.one(self.kind, self.n, self.N) * as_scalar(o)
        self._check(o)
        terms = dict(self.terms)
        for E, c in o.terms.items():
            terms[E] = terms[E] + c if E in terms else c
        return NCSeries(self.kind, self.n, min(self.N, o.N), _clean(terms),
                        self.truncated or o.truncated)

    __radd__ = __add__

    def __neg__(self):
        return self._like({E: -c for E, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        if isinstance(o, NCSeries):
            return normal_multiply(self, o)
        s = as_scalar(o)
        return self._like({E: c * s for E, c in self.terms.items()})

    def __rmul__(self, o):
        s = as_scalar(o)
        return self._like({E: s * c for E, c in self.terms.items()})

    def __pow__(self, k: int):
        out = NCSeries.one(self.kind, self.n, self.N)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, NCSeries):
            return NotImplemented
        return (self.kind, self.n) == (o.kind, o.n) and self.terms == o.terms

    def __hash__(self):
        return hash((self.kind, self.n, frozenset(self.terms.items())))

    def max_abs_difference(self, o) -> float:
        keys = set(self.terms) | set(o.terms)
        return max((abs((self.coefficient(E) - o.coefficient(E)).evaluate()) for E in keys),
                   default=0)

    def __str__(self):
        return format_series(self)

    def __repr__(self):
        return f"NCSeries({self.kind}, n={self.n}, N={self.N}: {format_series(self)})"


def normal_multiply(f: NCSeries, g: NCSeries) -> NCSeries:
    """Product in normal form; each term pair picks up q^(inversion count)."""
    if not isinstance(g, NCSeries) or f.kind != g.kind or f.n != g.n:
        raise ValueError("normal_multiply needs two series of the same kind and dimension")
    N = min(f.N, g.N)
    terms: dict = {}
    lost = f.truncated or g.truncated
    for E, a in f.terms.items():
        dE = sum(E)
        for F, b in g.terms.items():
            if dE + sum(F) > N:
                lost = True
                continue
            K = add_indices(E, F)
            w = inversion_weight(f.kind, E, F)
            c = a * b if w == 0 else a * b * _qpow_cached(w)
            terms[K] = terms[K] + c if K in terms else c
    return NCSeries(f.kind, f.n, N, _clean(terms), lost)


@dataclass(frozen=True, eq=False)
class TensorSeries:
    left_kind: str
    right_kind: str
    n: int
    N: int
    terms: dict = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        clean = {}
        for (E, F), c in self.terms.items():
            c = as_scalar(c)
            if sum(E) + sum(F) <= self.N and not c.is_zero():
                clean[(tuple(E), tuple(F))] = c
        object.__setattr__(self, "terms", clean)

    @classmethod
    def pure(cls, a: NCSeries, b: NCSeries) -> "TensorSeries":
        """a (x) b for two series."""
        N = min(a.N, b.N)
        terms = {}
        lost = a.truncated or b.truncated
        for E, c in a.terms.items():
            for F, d in b.terms.items():
                if sum(E) + sum(F) > N:
                    lost = True
                    continue
                terms[(E, F)] = c * d
        return cls(a.kind, b.kind, a.n, N, terms, lost)

    def _like(self, terms):
        return TensorSeries(self.left_kind, self.right_kind, self.n, self.N, terms, self.truncated)

    def __add__(self, o):
        terms = dict(self.terms)
        for k, c in o.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return TensorSeries(self.left_kind, self.right_kind, self.n, min(self.N, o.N),
                            _clean(terms), self.truncated or o.truncated)

    def __neg__(self):
        return self._like({k: -c for k, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def __rmul__(self, s):
        s = as_scalar(s)
        return self._like({k: s * c for k, c in self.terms.items()})

    def __eq__(self, o):
        if not isinstance(o, TensorSeries):
            return NotImplemented
        return ((self.left_kind, self.right_kind, self.n) == (o.left_kind, o.right_kind, o.n)
                and self.terms == o.terms)

    def __hash__(self):
        return hash((self.left_kind, self.right_kind, frozenset(self.terms.items())))

    def map_legs(self, left_fn, right_fn, left_kind=None, right_kind=None, N=None):
        """Apply linear maps (monomial -> NCSeries) to each leg and re-expand."""
        lk = left_kind or self.left_kind
        rk = right_kind or self.right_kind
        N = self.N if N is None else N
        out: dict = {}
        for (E, F), c in self.terms.items():
            L = left_fn(E)
            R = right_fn(F)
            for E2, a in L.terms.items():
                for F2, b in R.terms.items():
                    if sum(E2) + sum(F2) > N:
                        continue
                    k = (E2, F2)
                    v = c * a * b
                    out[k] = out[k] + v if k in out else v
        return TensorSeries(lk, rk, self.n, N, _clean(out), self.truncated)

    def __str__(self):
        parts = []
        for (E, F), c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0][0]) + sum(kv[0][1]), kv[0])):
            parts.append(f"{_coeff_prefix(c)}[{_mono_text(self.left_kind, E)} (x) {_mono_text(self.right_kind, F)}]")
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


@dataclass(frozen=True, eq=False)
class CommutingSeries:
    n: int
    N: int
    terms: dict = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        clean = {}
        for E, c in self.terms.items():
            c = as_scalar(c)
            if sum(E) <= self.N and not c.is_zero():
                clean[tuple(E)] = c
        object.__setattr__(self, "terms", clean)

    def coefficient(self, E) -> QScalar:
        return self.terms.get(tuple(E), ZERO)

    def __add__(self, o):
        terms = dict(self.terms)
        for E, c in o.terms.items():
            terms[E] = terms[E] + c if E in terms else c
        return CommutingSeries(self.n, min(self.N, o.N), _clean(terms), self.truncated or o.truncated)

    def __neg__(self):
        return CommutingSeries(self.n, self.N, {E: -c for E, c in self.terms.items()}, self.truncated)

    def __sub__(self, o):
        return self + (-o)

    def __mul__(self, o):
        if not isinstance(o, CommutingSeries):
            s = as_scalar(o)
            return CommutingSeries(self.n, self.N, {E: c * s for E, c in self.terms.items()},
                                   self.truncated)
        N = min(self.N, o.N)
        terms: dict = {}
        lost = self.truncated or o.truncated
        for E, a in self.terms.items():
            for F, b in o.terms.items():
                if sum(E) + sum(F) > N:
                    lost = True
                    continue
                K = add_indices(E, F)
                terms[K] = terms[K] + a * b if K in terms else a * b
        return CommutingSeries(self.n, N, _clean(terms), lost)

    __rmul__ = __mul__

    def __eq__(self, o):
        if not isinstance(o, CommutingSeries):
            return NotImplemented
        return self.n == o.n and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        parts = []
        for E, c in sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
            mono = "*".join(f"z{j + 1}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(E) if e)
            parts.append(f"{_coeff_prefix(c)}{mono}" if mono else format_scalar(c))
        return " + ".join(parts) if parts else "0"

    __repr__ = __str__


# --------------------------------------------------------------------------
# operations


def parity_project(f, beta: Parity):
    """Keep the terms whose exponents have the parities in beta."""
    if beta.n != f.n:
        raise ValueError("parity vector length differs from the dimension")
    terms = {E: c for E, c in f.terms.items() if beta.matches(E)}
    if isinstance(f, NCSeries):
        return f._like(terms)
    return CommutingSeries(f.n, f.N, terms, f.truncated)


def even_part(f):
    return parity_project(f, Parity.even(f.n))


def scale_arguments(f, a):
    """f(a1 y1, ..., an yn): the coefficient of E gets prod a_j^e_j."""
    a = [as_scalar(x) for x in a]
    if len(a) != f.n:
        raise ValueError("need one scale per variable")
    if any(x.is_zero() for x in a):
        raise ValueError("scales must be nonzero")

    def weight(E):
        w = ONE
        for x, e in zip(a, E):
            if e:
                w = w * x ** e
        return w

    terms = {E: c * weight(E) for E, c in f.terms.items()}
    if isinstance(f, NCSeries):
        return f._like(terms)
    return CommutingSeries(f.n, f.N, terms, f.truncated)


def psi_constant(n: int, j: int) -> QScalar:
    """c_j = q^(-j + (n-1)/2)."""
    from fractions import Fraction
    return QScalar.q_power(Fraction(-2 * j + n - 1, 2))


def psi_iso(f: NCSeries, direction: str = "forward") -> NCSeries:
    """The algebra isomorphism x_j -> c_j d_(n+1-j) (forward) or its inverse."""
    n = f.n
    if direction == "forward":
        if f.kind != COVECTOR:
            raise ValueError("forward psi takes a covector series")
        target, sign = VECTOR, 1
    elif direction == "inverse":
        if f.kind != VECTOR:
            raise ValueError("inverse psi takes a vector series")
        target, sign = COVECTOR, -1
    else:
        raise ValueError(f"direction must be forward or inverse, got {direction!r}")
    consts = [psi_constant(n, j) for j in range(1, n + 1)]
    terms = {}
    for E, c in f.terms.items():
        # x1^e1 ... xn^en maps to dn^e1 ... d1^en, already descending
        F = tuple(reversed(E))
        src = E if sign > 0 else F
        w = ONE
        for cj, e in zip(consts, src):
            if e:
                w = w * cj ** (sign * e)
        terms[F] = c * w
    return NCSeries(target, n, f.N, terms, f.truncated)


# --------------------------------------------------------------------------
# text form


def _mono_text(kind: str, E) -> str:
    letter = "x" if kind == COVECTOR else "d"
    order = range(len(E)) if kind == COVECTOR else range(len(E) - 1, -1, -1)
    parts = [f"{letter}{j + 1}" + (f"^{E[j]}" if E[j] > 1 else "") for j in order if E[j]]
    return "*".join(parts) if parts else "1"


def _coeff_prefix(c: QScalar) -> str:
    text = format_scalar(c)
    if text == "1":
        return ""
    if text == "-1":
        return "-"
    if not is_atomic_text(text):
        text = f"({text})"
    return text + "*"


def format_series(f: NCSeries) -> str:
    """Canonical text: terms by degree, then exponents, as coeff*monomial."""
    if not f.terms:
        return "0"
    parts = []
    for E in sorted(f.terms, key=lambda E: (sum(E), tuple(-e for e in E))):
        c = f.terms[E]
        mono = _mono_text(f.kind, E)
        if mono == "1":
            text = format_scalar(c)
            if not is_atomic_text(text):
                text = f"({text})"
        else:
            text = _coeff_prefix(c) + mono
        parts.append(text)
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def monomial_text(kind: str, E) -> str:
    return _mono_text(kind, E)


def all_monomials(kind: str, n: int, N: int, max_degree: int):
    return [NCSeries.monomial(kind, n, N, E) for E in indices_up_to(n, max_degree)]


def sign_vectors(n: int):
    return [Parity(s) for s in iproduct("+-", repeat=n)]
