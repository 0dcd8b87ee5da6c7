"""Command-line front end and the small expression language it reads.

Grammar (noncommutative products keep their written order):

    expr   := ['-'] term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | atom ['^' uint]
    atom   := number | 'i' | 'q' ['^' rational] | 'q'uint | generator
            | builtin '(' args ')' | '(' expr ')'
    generator := ('x' | 'd') uint

Numbers are read exactly (0.5 is 1/2).  Division is only by scalars.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, replace
from fractions import Fraction

import mpmath

from .calculus import (DivergenceError, global_integral, integrability_probe,
                       lattice_order_integral, right_global_integral)
from .factored import AnalyticSeries, OneVar
from .qalgebra import COVECTOR, VECTOR, NCSeries, monomial_text, scale_arguments
from .qspecial import gaussian, gaussian_analytic, hermite, q_exponential
from .scalars import I_UNIT, ONE, Params, QScalar, current_params, use_params

BUILTINS = ("eq_small", "eq_big", "gauss_g", "gauss_G", "hermiteI", "hermiteII", "scale")


class ExpressionError(ValueError):
    def __init__(self, message, position=None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"{message}{where}")
        self.position = position


# --------------------------------------------------------------------------
# syntax tree


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Imag:
    pass


@dataclass(frozen=True)
class QPow:
    exponent: Fraction


@dataclass(frozen=True)
class Gen:
    letter: str
    index: int


@dataclass(frozen=True)
class Sum:
    terms: tuple  # ((sign, node), ...)


@dataclass(frozen=True)
class Prod:
    factors: tuple  # ((op, node), ...), op in '*', '/'


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


def make_sum(terms):
    flat = []
    for sign, node in terms:
        if isinstance(node, Sum):
            flat.extend((sign * s, t) for s, t in node.terms)
        else:
            flat.append((sign, node))
    if len(flat) == 1 and flat[0][0] == 1:
        return flat[0][1]
    return Sum(tuple(flat))


def make_prod(factors):
    flat = []
    for op, node in factors:
        if isinstance(node, Prod):
            for op2, sub in node.factors:
                flat.append(("*" if (op == "*") == (op2 == "*") else "/", sub))
        else:
            flat.append((op, node))
    # scalars commute: gather the numeric factors into one leading coefficient
    coeff = Fraction(1)
    rest = []
    for op, node in flat:
        if isinstance(node, Num):
            if op == "/":
                if node.value == 0:
                    raise ExpressionError("division by zero")
                coeff /= node.value
            else:
                coeff *= node.value
        else:
            rest.append((op, node))
    if not rest:
        return Num(coeff)
    if coeff != 1 or rest[0][0] == "/":
        rest.insert(0, ("*", Num(coeff)))
    if len(rest) == 1:
        return rest[0][1]
    return Prod(tuple(rest))


def make_pow(base, k):
    if isinstance(base, QPow):
        return QPow(base.exponent * k)
    if k == 1:
        return base
    return Pow(base, k)


# --------------------------------------------------------------------------
# lexer and parser


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        ch = text[pos]
        if ch.isspace():
            pos += 1
        elif ch.isdigit() or (ch == "." and pos + 1 < len(text) and text[pos + 1].isdigit()):
            start = pos
            while pos < len(text) and (text[pos].isdigit() or text[pos] == "."):
                pos += 1
            word = text[start:pos]
            if word.count(".") > 1:
                raise ExpressionError(f"malformed number {word!r}", start)
            tokens.append(("num", word, start))
        elif ch.isalpha() or ch == "_":
            start = pos
            while pos < len(text) and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            tokens.append(("name", text[start:pos], start))
        elif ch in "+-*/^(),":
            tokens.append((ch, ch, pos))
            pos += 1
        else:
            raise ExpressionError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", "", len(text)))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            shown = tok[1] or "end of input"
            raise ExpressionError(f"expected {kind!r}, found {shown!r}", tok[2])
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExpressionError(f"unexpected {tok[1]!r}", tok[2])
        return node

    def expr(self):
        terms = []
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        terms.append((sign, self.term()))
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            terms.append((1 if op == "+" else -1, self.term()))
        return make_sum(terms)

    def term(self):
        factors = [("*", self.factor())]
        while self.peek()[0] in ("*", "/"):
            op = self.take()[0]
            factors.append((op, self.factor()))
        return make_prod(factors)

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return make_sum([(-1, self.factor())])
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.take("num")
            if not tok[1].isdigit():
                raise ExpressionError("powers must be nonnegative integers", tok[2])
            return make_pow(base, int(tok[1])) if int(tok[1]) != 1 else base
        return base

    def rational(self):
        if self.peek()[0] == "(":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            num = Fraction(self.take("num")[1])
            if self.peek()[0] == "/":
                self.take()
                num /= Fraction(self.take("num")[1])
            self.take(")")
            return sign * num
        sign = 1
        if self.peek()[0] == "-":
            self.take()
            sign = -1
        tok = self.take("num")
        if not tok[1].isdigit():
            raise ExpressionError("write fractional q exponents in parentheses, e.g. q^(1/2)", tok[2])
        return sign * Fraction(int(tok[1]))

    def atom(self):
        tok = self.peek()
        kind, word, pos = tok
        if kind == "num":
            self.take()
            return Num(Fraction(word))
        if kind == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if kind != "name":
            raise ExpressionError(f"unexpected {word or 'end of input'!r}", pos)
        self.take()
        if word == "i":
            return Imag()
        if word == "q":
            if self.peek()[0] == "^":
                self.take()
                return QPow(self.rational())
            return QPow(Fraction(1))
        if word[0] in "xdq" and word[1:].isdigit():
            k = int(word[1:])
            if word[0] == "q":
                return QPow(Fraction(k))
            if k < 1:
                raise ExpressionError(f"generator index must be >= 1 in {word!r}", pos)
            return Gen(word[0], k)
        if word in BUILTINS:
            self.take("(")
            args = []
            if self.peek()[0] != ")":
                args.append(self.expr())
                while self.peek()[0] == ",":
                    self.take()
                    args.append(self.expr())
            self.take(")")
            return Call(word, tuple(args))
        raise ExpressionError(f"unknown name {word!r}", pos)


def parse_expression(text: str):
    return Parser(text).parse()


# --------------------------------------------------------------------------
# canonical printing


def _frac_text(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def to_text(node) -> str:
    """Canonical serialization; parse(to_text(parse(s))) == parse(s)."""
    if isinstance(node, Num):
        return _frac_text(node.value)
    if isinstance(node, Imag):
        return "i"
    if isinstance(node, QPow):
        e = node.exponent
        if e == 1:
            return "q"
        if e.denominator == 1 and e > 0:
            return f"q^{e.numerator}"
        return f"q^({_frac_text(e)})"
    if isinstance(node, Gen):
        return f"{node.letter}{node.index}"
    if isinstance(node, Sum):
        out = ""
        for k, (sign, t) in enumerate(node.terms):
            text = to_text(t)
            if k == 0:
                out = ("-" if sign < 0 else "") + text
            else:
                out += (" - " if sign < 0 else " + ") + text
        return out
    if isinstance(node, Prod):
        out = ""
        for k, (op, f) in enumerate(node.factors):
            text = to_text(f)
            if isinstance(f, Sum) or (isinstance(f, Num) and f.value.denominator != 1):
                text = f"({text})"
            out += text if k == 0 else f"{op}{text}"
        return out
    if isinstance(node, Pow):
        b = node.base
        text = to_text(b)
        simple = isinstance(b, (Gen, Call, Imag)) or (isinstance(b, Num) and b.value.denominator == 1)
        if not simple:
            text = f"({text})"
        return f"{text}^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


def canonical(text: str) -> str:
    return to_text(parse_expression(text))


def _walk(node):
    yield node
    if isinstance(node, Sum):
        for _, t in node.terms:
            yield from _walk(t)
    elif isinstance(node, Prod):
        for _, f in node.factors:
            yield from _walk(f)
    elif isinstance(node, Pow):
        yield from _walk(node.base)
    elif isinstance(node, Call):
        for a in node.args:
            yield from _walk(a)


def generator_info(node):
    """(letters used, highest generator index)."""
    letters = set()
    top = 0
    for sub in _walk(node):
        if isinstance(sub, Gen):
            letters.add(sub.letter)
            top = max(top, sub.index)
    return letters, top


# --------------------------------------------------------------------------
# evaluation


@dataclass
class Value:
    """A series twice over: truncated exact expansion and, when available, a point-evaluable form."""
    series: NCSeries
    analytic: AnalyticSeries | None


class Evaluator:
    def __init__(self, kind: str, n: int, N: int):
        self.kind = kind
        self.n = n
        self.N = N

    def lift(self, s: QScalar) -> Value:
        series = NCSeries.one(self.kind, self.n, self.N) * s
        return Value(series, AnalyticSeries.product(self.kind, self.n, [], s.evaluate()))

    def as_value(self, v):
        return self.lift(v) if isinstance(v, QScalar) else v

    def scalar(self, v, what):
        if not isinstance(v, QScalar):
            raise ExpressionError(f"{what} must be a scalar")
        return v

    def eval(self, node):
        if isinstance(node, Num):
            return QScalar(node.value)
        if isinstance(node, Imag):
            return I_UNIT
        if isinstance(node, QPow):
            try:
                return QScalar.q_power(node.exponent)
            except ValueError as exc:
                raise ExpressionError(str(exc)) from None
        if isinstance(node, Gen):
            want = "x" if self.kind == COVECTOR else "d"
            if node.letter != want:
                raise ExpressionError("x and d generators cannot be mixed in one expression")
            if node.index > self.n:
                raise ExpressionError(f"index out of range: {node.letter}{node.index} with n = {self.n}")
            return Value(NCSeries.generator(self.kind, self.n, self.N, node.index),
                         AnalyticSeries.product(self.kind, self.n, [("x", node.index, 1)]))
        if isinstance(node, Sum):
            total = None
            for sign, t in node.terms:
                v = self.eval(t)
                if sign < 0:
                    v = self.neg(v)
                total = v if total is None else self.add(total, v)
            return total
        if isinstance(node, Prod):
            acc = None
            for op, f in node.factors:
                v = self.eval(f)
                if op == "/":
                    s = self.scalar(v, "a divisor")
                    if s.is_zero():
                        raise ExpressionError("division by zero")
                    v = s.reciprocal()
                acc = v if acc is None else self.mul(acc, v)
            return acc
        if isinstance(node, Pow):
            base = self.eval(node.base)
            if isinstance(base, QScalar):
                return base ** node.exponent
            acc = self.lift(ONE)
            for _ in range(node.exponent):
                acc = self.mul(acc, base)
            return acc
        if isinstance(node, Call):
            return self.call(node.name, [self.eval(a) for a in node.args])
        raise TypeError(f"not an expression node: {node!r}")

    def neg(self, v):
        if isinstance(v, QScalar):
            return -v
        return Value(-v.series, None if v.analytic is None else -v.analytic)

    def add(self, a, b):
        if isinstance(a, QScalar) and isinstance(b, QScalar):
            return a + b
        a, b = self.as_value(a), self.as_value(b)
        ana = None if a.analytic is None or b.analytic is None else a.analytic + b.analytic
        return Value(a.series + b.series, ana)

    def mul(self, a, b):
        if isinstance(a, QScalar) and isinstance(b, QScalar):
            return a * b
        if isinstance(b, QScalar):
            return Value(a.series * b, None if a.analytic is None else a.analytic.scaled_by(b.evaluate()))
        if isinstance(a, QScalar):
            return Value(b.series * a, None if b.analytic is None else b.analytic.scaled_by(a.evaluate()))
        ana = None
        if a.analytic is not None and b.analytic is not None:
            try:
                ana = a.analytic.multiply(b.analytic)
            except NotImplementedError:
                ana = None
        return Value(a.series * b.series, ana)

    # -- builtins --------------------------------------------------------

    def call(self, name, args):
        if name in ("eq_small", "eq_big"):
            if len(args) != 2:
                raise ExpressionError(f"{name}(base, argument) takes two arguments")
            base = self.scalar(args[0], f"the base of {name}")
            arg = self.as_value(args[1])
            try:
                series = q_exponential("small" if name == "eq_small" else "big", base, arg.series)
            except ValueError as exc:
                raise ExpressionError(str(exc)) from None
            return Value(series, self._gaussian_factor(name, base, arg))
        if name in ("gauss_g", "gauss_G"):
            scales = [self.scalar(a, f"a scale of {name}") for a in args]
            if len(scales) not in (0, 1, self.n):
                raise ExpressionError(f"{name} takes no scale, one scale or {self.n} scales")
            scale = None if not scales else (scales[0] if len(scales) == 1 else scales)
            kind = "g" if name == "gauss_g" else "G"
            return Value(gaussian(kind, self.n, self.N, scale, side=self.kind),
                         gaussian_analytic(kind, self.n, scale, side=self.kind))
        if name in ("hermiteI", "hermiteII"):
            if len(args) not in (2, 3):
                raise ExpressionError(f"{name}(l, argument[, base]) takes two or three arguments")
            l = self._nonneg_int(args[0], name)
            base = None if len(args) == 2 else self.scalar(args[2], f"the base of {name}")
            poly = hermite("I" if name == "hermiteI" else "II", l, base)
            arg = self.as_value(args[1])
            acc = self.lift(poly.coefficient(poly.degree))
            for m in range(poly.degree - 1, -1, -1):
                acc = self.add(self.mul(acc, arg), poly.coefficient(m))
            return acc
        if name == "scale":
            if len(args) < 2:
                raise ExpressionError("scale(a, expr) or scale(a_1, ..., a_n, expr)")
            factors = [self.scalar(a, "a scale factor") for a in args[:-1]]
            if len(factors) == 1:
                factors = factors * self.n
            if len(factors) != self.n:
                raise ExpressionError(f"scale needs one or {self.n} factors")
            v = self.as_value(args[-1])
            ana = None if v.analytic is None else v.analytic.scale_arguments([a.evaluate() for a in factors])
            return Value(scale_arguments(v.series, factors), ana)
        raise ExpressionError(f"unknown builtin {name!r}")

    def _nonneg_int(self, v, name):
        s = self.scalar(v, f"the degree of {name}")
        try:
            terms = s.laurent_terms()
        except ValueError:
            terms = None
        if terms is None or set(terms) - {0} or len(terms) > 1:
            raise ExpressionError(f"the degree of {name} must be a nonnegative integer")
        c = terms.get(0)
        value = 0 if c is None else c.re
        if c is not None and (c.im or value.denominator != 1 or value < 0):
            raise ExpressionError(f"the degree of {name} must be a nonnegative integer")
        return int(value)

    def _gaussian_factor(self, name, base, arg):
        """Point-evaluable form of a q^4-exponential of -c y_j^2, else None."""
        if base != QScalar.q_power(4) or arg.analytic is None:
            return None
        terms = arg.series.terms
        if len(terms) != 1 or arg.series.truncated:
            return None
        (E, c), = terms.items()
        nz = [j for j, e in enumerate(E) if e]
        if len(nz) != 1 or E[nz[0]] != 2:
            return None
        phi = OneVar.gaussian("e" if name == "eq_small" else "E", (-c).evaluate())
        return AnalyticSeries.product(self.kind, self.n, [("f", nz[0] + 1, phi)])


def evaluate(text_or_node, kind: str = COVECTOR, n: int | None = None, N: int | None = None) -> Value:
    """Evaluate an expression to a Value under the active parameters."""
    node = parse_expression(text_or_node) if isinstance(text_or_node, str) else text_or_node
    letters, top = generator_info(node)
    if len(letters) > 1:
        raise ExpressionError("x and d generators cannot be mixed in one expression")
    if letters:
        kind = COVECTOR if "x" in letters else VECTOR
    params = current_params()
    n = max(top, 1) if n is None else n
    if top > n:
        raise ExpressionError(f"index out of range: generator index {top} with n = {n}")
    out = Evaluator(kind, n, params.N if N is None else N).eval(node)
    if isinstance(out, QScalar):
        out = Evaluator(kind, n, params.N if N is None else N).lift(out)
    return out


# --------------------------------------------------------------------------
# numeric output


def _dps(bits: int) -> int:
    return max(int(bits * math.log10(2)), 1)


def reliable_digits(first, second, bits: int, tol) -> int:
    """Decimal digits on which two runs agree, capped by precision and tolerance."""
    cap = min(_dps(bits), int(-math.log10(float(tol))))
    diff = abs(first - second)
    size = max(abs(first), abs(second))
    if diff == 0 or size == 0:
        return cap if size else cap
    return max(0, min(cap, int(mpmath.floor(-mpmath.log10(diff / size)))))


def _with_refinement(params, fn):
    """Run fn under params and under 32 more bits with a tighter tolerance."""
    with use_params(params):
        first = fn()
    finer = replace(params, precision=params.precision + 32, tol=params.tol * 2.0 ** -32)
    with use_params(finer):
        second = fn()
    return first, second


def number_json(v, digits=None) -> dict:
    v = mpmath.mpmathify(v)
    d = digits or mpmath.mp.dps
    return {"re": mpmath.nstr(mpmath.re(v), d), "im": mpmath.nstr(mpmath.im(v), d)}


def _short(v) -> str:
    v = mpmath.mpmathify(v)
    if mpmath.im(v) == 0:
        return mpmath.nstr(mpmath.re(v), 16)
    if mpmath.re(v) == 0:
        return mpmath.nstr(mpmath.im(v), 16) + "*i"
    return f"{mpmath.nstr(mpmath.re(v), 12)}{mpmath.nstr(mpmath.im(v), 12):+}*i"


def number_text(v, bits) -> str:
    v = mpmath.mpmathify(v)
    d = _dps(bits)
    if mpmath.im(v) == 0:
        return mpmath.nstr(mpmath.re(v), d)
    return f"{mpmath.nstr(mpmath.re(v), d)} + {mpmath.nstr(mpmath.im(v), d)}*i"


# --------------------------------------------------------------------------
# commands


class UsageError(Exception):
    pass


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _number_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        try:
            out.append(Fraction(part))
        except (ValueError, ZeroDivisionError):
            try:
                out.append(mpmath.mpf(part))
            except (ValueError, TypeError):
                raise argparse.ArgumentTypeError(f"not a number list: {text!r}") from None
    return out


def _int_list(text):
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from None


def _params(args) -> Params:
    base = Params()
    return Params(q=args.q if args.q is not None else base.q,
                  n=args.n if args.n is not None else base.n,
                  N=args.deg if args.deg is not None else base.N,
                  precision=args.precision if args.precision is not None else base.precision,
                  tol=args.tol if args.tol is not None else base.tol)


def _build(args, kind, lattice=None):
    node = parse_expression(args.expr)
    letters, top = generator_info(node)
    n = args.n
    if n is None:
        n = max(top, len(lattice) if lattice else 0, 1)
    if lattice is not None and len(lattice) != n:
        raise UsageError(f"expected {n} lattice values, got {len(lattice)}")
    value = evaluate(node, kind, n)
    return node, value


def _analytic(value, what):
    if value.analytic is None:
        raise UsageError(f"{what} needs a point-evaluable expression: products of q^4-exponentials "
                         "of -c*y_j^2, gauss_g/gauss_G and polynomials")
    return value.analytic


def _lattice_arg(values):
    return [mpmath.mpf(v.numerator) / v.denominator if isinstance(v, Fraction) else v for v in values]


def cmd_integrate(args, params):
    variant = args.variant.replace("pp", "''").replace("p", "'")
    right = variant.startswith("J")
    base = variant[1:]
    if variant[:1] not in ("I", "J") or base not in ("", "'", "''"):
        raise UsageError(f"unknown variant {args.variant!r}")
    kind = VECTOR if right else COVECTOR
    gamma = _lattice_arg(args.gamma)
    with use_params(params):
        node, value = _build(args, kind, gamma)
        f = _analytic(value, "integrate")
    if (f.kind == VECTOR) != right:
        raise UsageError(f"variant {args.variant} integrates {'d' if right else 'x'} expressions")
    sigma = args.sigma or tuple(range(1, f.n + 1))

    def run():
        # rebuilt under each precision so that coefficients carry its full accuracy
        f = _analytic(_build(args, kind, gamma)[1], "integrate")
        if base == "''":
            return lattice_order_integral(f, sigma, gamma, side="right" if right else "left")
        if right:
            return right_global_integral(f, gamma, "J" + base)
        return global_integral(f, gamma, "I" + base)

    first, second = _with_refinement(params, run)
    digits = reliable_digits(first, second, params.precision, params.tol)
    report = {"command": "integrate", "variant": variant, "expression": to_text(node),
              "n": f.n, "gamma": [mpmath.nstr(g, 20) for g in gamma],
              "value": number_json(first, _dps(params.precision)), "reliableDigits": digits,
              "precisionBits": params.precision}
    if base == "''":
        report["sigma"] = list(sigma)
    text = f"{variant}[{to_text(node)}] = {number_text(first, params.precision)}\n" \
           f"reliable digits: {digits} (precision {params.precision} bits)"
    return report, text


def _transform_call(kind, f, args, gamma, N):
    from . import fourier

    k = fourier.canonical_kind(kind)
    n = f.n
    sigma = args.sigma or tuple(range(1, n + 1))
    if k in fourier.FORWARD:
        return fourier.transform(k, f, gamma, N)
    if k in fourier.WEAK_FORWARD:
        return fourier.weak_transform(k, f, sigma, gamma, N)
    if k in fourier.INVERSE:
        return fourier.inverse_transform(k, f, gamma, N)
    return fourier.weak_inverse(k, f, sigma, gamma, N)


def _series_report(args, params, command, side):
    from . import fourier

    kind = fourier.canonical_kind(args.kind)
    inverse = kind in fourier.INVERSE + fourier.WEAK_INVERSE
    if inverse != (command == "invert"):
        raise UsageError(f"kind {args.kind} belongs to the {'invert' if inverse else 'transform'} command")
    gamma = _lattice_arg(args.gamma)
    with use_params(params):
        node, value = _build(args, side, gamma)
        _analytic(value, command)
    N = params.N

    def run():
        f = _analytic(_build(args, side, gamma)[1], command)
        return _transform_call(kind, f, args, gamma, N)

    first, second = _with_refinement(params, run)
    digits = _dps(params.precision)
    for E in set(first.series.terms) | set(second.series.terms):
        a, b = first.coefficient(E), second.coefficient(E)
        digits = min(digits, reliable_digits(a, b, params.precision, params.tol))
    report = first.to_json()
    report.update({"command": command, "expression": to_text(node), "reliableDigits": digits,
                   "precisionBits": params.precision})
    rows = [f"{command} {kind} of {to_text(node)}  (N = {N}, reliable digits {digits})"]
    for E in sorted(first.series.terms, key=lambda E: (sum(E), E)):
        rows.append(f"  {monomial_text(first.series.kind, E):<16} {number_text(first.coefficient(E), params.precision)}")
    if first.plancherel is not None:
        rows.append(f"  constant: {first.plancherel_description} = {number_text(first.plancherel, params.precision)}")
    return report, "\n".join(rows)


def cmd_transform(args, params):
    return _series_report(args, params, "transform", COVECTOR)


def cmd_invert(args, params):
    return _series_report(args, params, "invert", VECTOR)


def cmd_probe(args, params):
    gamma = _lattice_arg(args.gamma)
    with use_params(params):
        node, value = _build(args, COVECTOR, gamma)
        f = _analytic(value, "probe")
        report = integrability_probe(f, gamma)
    out = report.to_json()
    out.update({"command": "probe", "expression": to_text(node)})
    if report.value is not None:
        out["value"] = number_json(report.value, _dps(params.precision))
    text = f"{to_text(node)}: {report.verdict}"
    if report.witness:
        text += f"\n  growth along direction {report.witness['direction']}, " \
                f"ratios {', '.join(report.witness['ratios'][-3:])}"
    if report.lattice_order:
        ok = [",".join(map(str, s)) for s, good in report.lattice_order.items() if good]
        text += f"\n  lattice-order integrable for sigma in: {', '.join(ok) or 'none'}"
    return out, text


def cmd_hermite(args, params):
    from .scalars import format_scalar

    with use_params(params):
        base = None
        if args.base:
            b = evaluate(args.base, n=1, N=0).series.constant_term()
            base = b
        poly = hermite(args.kind, args.l, base)
        coeffs = {m: format_scalar(c) for m, c in sorted(poly.coefficients.items(), reverse=True)}
        numeric = {m: number_json(c.evaluate(), 20) for m, c in poly.coefficients.items()}
    report = {"command": "hermite", "kind": args.kind, "l": args.l,
              "coefficients": {str(m): c for m, c in coeffs.items()},
              "numeric": {str(m): v for m, v in sorted(numeric.items(), reverse=True)}}
    return report, f"h{'~' if args.kind == 'II' else ''}_{args.l}(z) = {poly}"


def cmd_table(args, params):
    from . import fourier

    cases = fourier.CLOSED_FORM_CASES if args.case == "all" else (args.case,)
    for c in cases:
        if c not in fourier.CLOSED_FORM_CASES:
            raise UsageError(f"unknown case {c!r}; choose from {', '.join(fourier.CLOSED_FORM_CASES)} or all")
    A = args.A
    rows = []
    report = {"command": "table", "A": list(A), "N": params.N, "cases": []}
    with use_params(params):
        for c in cases:
            got = fourier.case_transform(c, A, params.N)
            want = fourier.closed_form(c, A, got.gamma, params.N)
            dev = got.max_relative_deviation(want, params.N)
            entry = {"case": c, "kind": got.kind, "maxRelativeDeviation": dev, "rows": []}
            rows.append(f"{c}  ({got.kind}, A = {A}, max rel deviation {dev:.2e})")
            rows.append(f"  {'monomial':<16} {'computed':>26} {'closed form':>26}")
            for E in sorted(set(got.series.terms) | set(want.series.terms), key=lambda E: (sum(E), E)):
                a, b = got.coefficient(E), want.coefficient(E)
                rows.append(f"  {monomial_text(got.series.kind, E):<16} {_short(a):>26} {_short(b):>26}")
                entry["rows"].append({"exponents": list(E), "computed": number_json(a, 20),
                                      "closedForm": number_json(b, 20)})
            report["cases"].append(entry)
    return report, "\n".join(rows)


def cmd_check(args, params):
    from .suites import run_suite

    kwargs = {}
    if args.suite in ("hopf", "pseudo-inverse"):
        if args.n is not None:
            kwargs["dims"] = (args.n,)
        if args.deg is not None:
            kwargs["max_degree"] = args.deg
    elif args.suite == "phi11" and args.deg is not None:
        kwargs["N"] = args.deg
    with use_params(params):
        results = run_suite(args.suite, **kwargs)
    report = {"command": "check", "suite": args.suite, "passed": all(r.passed for r in results),
              "results": [r.to_json() for r in results]}
    return report, "\n".join(r.line() for r in results)


COMMANDS = {"check": cmd_check, "integrate": cmd_integrate, "transform": cmd_transform,
            "invert": cmd_invert, "probe": cmd_probe, "hermite": cmd_hermite, "table": cmd_table}


def _global_flags(parser, default):
    parser.add_argument("--q", type=_fraction, default=default, help="deformation parameter in (0, 1)")
    parser.add_argument("--n", type=int, default=default, help="dimension")
    parser.add_argument("--deg", type=int, default=default, help="truncation degree N")
    parser.add_argument("--precision", type=int, default=default, help="working precision in bits")
    parser.add_argument("--tol", type=float, default=default, help="summation tolerance")
    parser.add_argument("--json", action="store_true", default=False if default is None else default,
                        help="print a JSON report")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="braidq", description="q-calculus on braided covector and vector algebras")
    _global_flags(p, None)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, argparse.SUPPRESS)

    c = sub.add_parser("check", parents=[common], help="run a verification suite")
    c.add_argument("--suite", required=True, help="hopf, pseudo-inverse, gaussian-moments, translation, "
                   "counterexample, order-bridge, fourier, roundtrip, phi11, psi or all")

    i = sub.add_parser("integrate", parents=[common], help="realized global or lattice-order integral")
    i.add_argument("--variant", default="Ip", help="I, Ip, Ipp (x expressions) or J, Jp, Jpp (d expressions)")
    i.add_argument("--expr", required=True)
    i.add_argument("--gamma", type=_number_list, required=True, help="comma separated lattice point")
    i.add_argument("--sigma", type=_int_list, help="integration order for Ipp / Jpp")

    for name, help_text in (("transform", "Fourier transform F, F'', FS, FS'' of an x expression"),
                            ("invert", "inverse transform G, G'', GS, GS'' of a d expression")):
        t = sub.add_parser(name, parents=[common], help=help_text)
        t.add_argument("--kind", required=True)
        t.add_argument("--expr", required=True)
        t.add_argument("--gamma", "--delta", dest="gamma", type=_number_list, required=True)
        t.add_argument("--sigma", type=_int_list)

    pr = sub.add_parser("probe", parents=[common], help="lattice integrability probe")
    pr.add_argument("--expr", required=True)
    pr.add_argument("--gamma", type=_number_list, required=True)

    h = sub.add_parser("hermite", parents=[common], help="discrete q-Hermite polynomial")
    h.add_argument("--kind", choices=("I", "II"), required=True)
    h.add_argument("--l", type=int, required=True)
    h.add_argument("--base", help="base expression, default q^2")

    tb = sub.add_parser("table", parents=[common], help="computed transforms beside their closed forms")
    tb.add_argument("--case", default="all")
    tb.add_argument("--A", type=_int_list, default=(0,), help="exponents, e.g. 2,1")
    return p


def run_command(argv) -> tuple:
    """Parse argv and run; returns (exit code, output text)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0), ""
    try:
        params = _params(args)
        if args.command == "hermite" and args.l < 0:
            raise UsageError("the Hermite index must be nonnegative")
        report, text = COMMANDS[args.command](args, params)
    except (ExpressionError, UsageError) as exc:
        return 2, f"braidq: error: {exc}"
    except (ArithmeticError, NotImplementedError) as exc:
        body = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if isinstance(exc, DivergenceError) and exc.witness:
            body["error"]["witness"] = exc.witness
        return 1, json.dumps(body, indent=2, default=str)
    except ValueError as exc:
        return 2, f"braidq: error: {exc}"
    out = json.dumps(report, indent=2, default=str) if args.json else text
    if args.command == "check" and not report["passed"]:
        return 1, out
    return 0, out


def main(argv=None) -> int:
    code, out = run_command(sys.argv[1:] if argv is None else argv)
    if out:
        stream = sys.stderr if code == 2 else sys.stdout
        print(out, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
