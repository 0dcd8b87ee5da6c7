"""Braided Hopf structure on the covector and vector algebras.

Braidings are given on generators and extended to monomials by the hexagon
rules; the coproduct is extended from generators as a braided algebra map.
Both are memoized per (kind, monomials).
"""

from __future__ import annotations

from functools import lru_cache

from .qalgebra import (COVECTOR, VECTOR, NCSeries, TensorSeries, indices_up_to,
                       inversion_weight)
from .scalars import ONE, QScalar, q_factorial

BRAID_KINDS = ("xx", "dd", "dx", "xd")
_LETTER = {COVECTOR: "x", VECTOR: "d"}
_KIND = {"x": COVECTOR, "d": VECTOR}


def braid_tag(left_kind: str, right_kind: str) -> str:
    return _LETTER[left_kind] + _LETTER[right_kind]


def _q(k):
    return QScalar.q_power(k)


@lru_cache(maxsize=None)
def _generator_braiding(tag: str, n: int, i: int, j: int):
    """Phi(a_i (x) b_j) as a tuple of (first-leg index, second-leg index, coefficient)."""
    q = _q(1)
    if tag == "xx":
        if i < j:
            return ((j, i, q),)
        if i == j:
            return ((i, i, q * q),)
        return ((i, j, q * q - 1), (j, i, q))
    if tag == "dd":
        if i > j:
            return ((j, i, q),)
        if i == j:
            return ((i, i, q * q),)
        return ((i, j, q * q - 1), (j, i, q))
    qm2 = _q(-2)
    if tag == "dx":
        if i != j:
            return ((j, i, _q(-1)),)
        return ((j, j, qm2),) + tuple((r, r, qm2 - 1) for r in range(j + 1, n + 1))
    if tag == "xd":
        if i != j:
            return ((j, i, _q(-1)),)
        return tuple((r, r, (qm2 - 1) * _q(-2 * (j - r))) for r in range(1, j)) + ((j, j, qm2),)
    raise ValueError(f"unknown braid kind {tag!r}")


def _first_letter(kind: str, E):
    """Index (1-based) of the leftmost generator of the normal-form monomial."""
    idx = range(len(E)) if kind == COVECTOR else range(len(E) - 1, -1, -1)
    for j in idx:
        if E[j]:
            return j + 1
    return None


def _minus(E, i):
    E = list(E)
    E[i - 1] -= 1
    return tuple(E)


def _unit(n, i):
    return tuple(1 if j == i - 1 else 0 for j in range(n))


def _mono_product(kind, E, F):
    """mono(E) * mono(F) = q^w mono(E+F)."""
    return tuple(a + b for a, b in zip(E, F)), inversion_weight(kind, E, F)


def _accumulate(out, key, c):
    if key in out:
        v = out[key] + c
        if v.is_zero():
            del out[key]
        else:
            out[key] = v
    elif not c.is_zero():
        out[key] = c


@lru_cache(maxsize=None)
def braid_monomials(tag: str, E: tuple, F: tuple):
    """Phi(mono(E) (x) mono(F)) as a tuple of ((F', E'), coeff) pairs."""
    n = len(E)
    a_kind, b_kind = _KIND[tag[0]], _KIND[tag[1]]
    if not any(E) or not any(F):
        return (((F, E), ONE),)
    out: dict = {}
    if sum(E) >= 2:
        # Phi(a u2 (x) v): braid u2 past v first, then a
        i = _first_letter(a_kind, E)
        u2 = _minus(E, i)
        for (v1, u2p), c1 in braid_monomials(tag, u2, F):
            for (v2, ap), c2 in braid_monomials(tag, _unit(n, i), v1):
                K, w = _mono_product(a_kind, ap, u2p)
                _accumulate(out, (v2, K), c1 * c2 * _q(w))
    elif sum(F) == 1:
        i = _first_letter(a_kind, E)
        j = _first_letter(b_kind, F)
        for r, s, c in _generator_braiding(tag, n, i, j):
            _accumulate(out, (_unit(n, r), _unit(n, s)), c)
    else:
        # Phi(a (x) b v2): braid a past b first, then past v2
        j = _first_letter(b_kind, F)
        v2 = _minus(F, j)
        for (bp, a1), c1 in braid_monomials(tag, E, _unit(n, j)):
            for (v2p, a2), c2 in braid_monomials(tag, a1, v2):
                K, w = _mono_product(b_kind, bp, v2p)
                _accumulate(out, (K, a2), c1 * c2 * _q(w))
    return tuple(out.items())


def braiding(kind: str, u: NCSeries, v: NCSeries) -> TensorSeries:
    """Phi(u (x) v) for the braid kind xx, dd, dx or xd."""
    if kind not in BRAID_KINDS:
        raise ValueError(f"unknown braid kind {kind!r}")
    if u.kind != _KIND[kind[0]] or v.kind != _KIND[kind[1]]:
        raise ValueError(f"braid kind {kind} does not match series kinds {u.kind}, {v.kind}")
    N = min(u.N, v.N)
    out: dict = {}
    for E, a in u.terms.items():
        for F, b in v.terms.items():
            if sum(E) + sum(F) > N:
                continue
            for key, c in braid_monomials(kind, E, F):
                _accumulate(out, key, a * b * c)
    return TensorSeries(v.kind, u.kind, u.n, N, out)


def braided_tensor_multiply(s: TensorSeries, t: TensorSeries) -> TensorSeries:
    """(a (x) b)(c (x) d) = sum a c' (x) b' d with Phi(b (x) c) = sum c' (x) b'."""
    if (s.left_kind, s.right_kind) != (t.left_kind, t.right_kind) or s.n != t.n:
        raise ValueError("tensor factors must have matching kinds and dimension")
    tag = braid_tag(s.right_kind, t.left_kind)
    N = min(s.N, t.N)
    lk, rk = s.left_kind, s.right_kind
    out: dict = {}
    lost = s.truncated or t.truncated
    for (A, B), c1 in s.terms.items():
        dA, dB = sum(A), sum(B)
        for (C, D), c2 in t.terms.items():
            if dA + dB + sum(C) + sum(D) > N:
                lost = True
                continue
            for (Cp, Bp), c3 in braid_monomials(tag, B, C):
                L, w1 = _mono_product(lk, A, Cp)
                R, w2 = _mono_product(rk, Bp, D)
                _accumulate(out, (L, R), c1 * c2 * c3 * _q(w1 + w2))
    return TensorSeries(lk, rk, s.n, N, out, lost)


def _generator_coproduct(kind, n, i):
    z = (0,) * n
    e = _unit(n, i)
    return TensorSeries(kind, kind, n, 1, {(e, z): ONE, (z, e): ONE})


@lru_cache(maxsize=None)
def coproduct_monomial(kind: str, E: tuple):
    """Delta(mono(E)) as a tuple of ((E1, E2), coeff) pairs."""
    n = len(E)
    d = sum(E)
    if d == 0:
        return ((((0,) * n, (0,) * n), ONE),)
    i = _first_letter(kind, E)
    rest = TensorSeries(kind, kind, n, d - 1, dict(coproduct_monomial(kind, _minus(E, i))))
    gen = _generator_coproduct(kind, n, i)
    gen = TensorSeries(kind, kind, n, d, gen.terms)
    rest = TensorSeries(kind, kind, n, d, rest.terms)
    return tuple(braided_tensor_multiply(gen, rest).terms.items())


def coproduct(f: NCSeries) -> TensorSeries:
    out: dict = {}
    for E, c in f.terms.items():
        for key, a in coproduct_monomial(f.kind, E):
            _accumulate(out, key, c * a)
    return TensorSeries(f.kind, f.kind, f.n, f.N, out, f.truncated)


def counit(f: NCSeries) -> QScalar:
    return f.constant_term()


def antipode_weight(d: int) -> QScalar:
    """(-1)^d q^(d^2 - d)."""
    w = _q(d * d - d)
    return -w if d % 2 else w


def antipode(f: NCSeries) -> NCSeries:
    return f.map_coefficients(lambda E, c: c * antipode_weight(sum(E)))


def factorial_weight(E) -> QScalar:
    """prod_j [e_j]_{q^2}!"""
    q2 = _q(2)
    out = ONE
    for e in E:
        if e > 1:
            out = out * q_factorial(e, q2)
    return out


def pairing(g: NCSeries, f: NCSeries) -> QScalar:
    """<d-monomial(E), x-monomial(F)> = delta_{E,F} prod [e_j]_{q^2}!, extended bilinearly."""
    if g.kind != VECTOR or f.kind != COVECTOR:
        raise ValueError("pairing takes a vector series and a covector series")
    out = QScalar(0)
    for E, c in g.terms.items():
        a = f.terms.get(E)
        if a is not None:
            out = out + c * a * factorial_weight(E)
    return out


def exp_element(n: int, N: int) -> TensorSeries:
    """sum over |E| <= N/2 of x^E (x) d^E / prod [e_j]_{q^2}!"""
    terms = {}
    for E in indices_up_to(n, N // 2):
        terms[(E, E)] = factorial_weight(E).reciprocal()
    return TensorSeries(COVECTOR, VECTOR, n, N, terms)


def braided_taylor(f: NCSeries) -> TensorSeries:
    """sum_E x^E (x) (dn^en ... d1^e1 acting on f) / prod [e_j]_{q^2}!"""
    from .calculus import partial_left

    if f.kind != COVECTOR:
        raise ValueError("braided_taylor takes a covector series")
    out: dict = {}
    for E in indices_up_to(f.n, max(f.degree(), 0)):
        g = f
        for j in range(1, f.n + 1):
            for _ in range(E[j - 1]):
                g = partial_left(g, j)
        if not g.terms:
            continue
        w = factorial_weight(E).reciprocal()
        for F, c in g.terms.items():
            _accumulate(out, (E, F), c * w)
    return TensorSeries(COVECTOR, COVECTOR, f.n, f.N, out, f.truncated)


# --------------------------------------------------------------------------
# helpers used by the axiom checks


def multiply_legs(t: TensorSeries) -> NCSeries:
    """m: A (x) A -> A."""
    if t.left_kind != t.right_kind:
        raise ValueError("multiplication needs equal leg kinds")
    out: dict = {}
    for (E, F), c in t.terms.items():
        K, w = _mono_product(t.left_kind, E, F)
        _accumulate(out, K, c * _q(w))
    return NCSeries(t.left_kind, t.n, t.N, out, t.truncated)


def coproduct_series(kind, n, N, E) -> TensorSeries:
    return coproduct(NCSeries.monomial(kind, n, N, E))


def tensor_apply_left_coproduct(t: TensorSeries):
    """(Delta (x) id) t as a dict keyed by triples."""
    out: dict = {}
    for (E, F), c in t.terms.items():
        for (A, B), a in coproduct_monomial(t.left_kind, E):
            _accumulate(out, (A, B, F), c * a)
    return out


def tensor_apply_right_coproduct(t: TensorSeries):
    out: dict = {}
    for (E, F), c in t.terms.items():
        for (A, B), a in coproduct_monomial(t.right_kind, F):
            _accumulate(out, (E, A, B), c * a)
    return out


def hopf_axiom_report(n: int, max_degree: int, kinds=(COVECTOR, VECTOR)) -> dict:
    """Exact checks of the bialgebra and antipode laws on every monomial up to max_degree.

    Returns {check name: number of failing monomials}.
    """
    from .qalgebra import indices_up_to as idx

    fails = {"coassociativity": 0, "counit": 0, "antipode": 0, "multiplicativity": 0,
             "braid_relation": 0, "unit_braiding": 0}
    z = (0,) * n
    for kind in kinds:
        monos = idx(n, max_degree)
        for E in monos:
            D = coproduct_series(kind, n, max_degree, E)
            if tensor_apply_left_coproduct(D) != tensor_apply_right_coproduct(D):
                fails["coassociativity"] += 1
            left = {F: c for (A, F), c in D.terms.items() if A == z}
            right = {A: c for (A, F), c in D.terms.items() if F == z}
            if left != {E: ONE} or right != {E: ONE}:
                fails["counit"] += 1
            target = {z: ONE} if not any(E) else {}
            for side in ("left", "right"):
                acc: dict = {}
                for (A, F), c in D.terms.items():
                    if side == "left":
                        c = c * antipode_weight(sum(A))
                    else:
                        c = c * antipode_weight(sum(F))
                    K, w = _mono_product(kind, A, F)
                    _accumulate(acc, K, c * _q(w))
                if acc != target:
                    fails["antipode"] += 1
            u = NCSeries.monomial(kind, n, 2 * max_degree, E)
            one = NCSeries.one(kind, n, 2 * max_degree)
            tag = braid_tag(kind, kind)
            if braiding(tag, u, one) != TensorSeries.pure(one, u) or \
                    braiding(tag, one, u) != TensorSeries.pure(u, one):
                fails["unit_braiding"] += 1
        half = [E for E in monos if sum(E) <= max(max_degree // 2, 1)] if max_degree >= 2 else monos
        for E in half:
            for F in half:
                if sum(E) + sum(F) > max_degree:
                    continue
                f = NCSeries.monomial(kind, n, max_degree, E)
                g = NCSeries.monomial(kind, n, max_degree, F)
                lhs = coproduct(f * g)
                rhs = braided_tensor_multiply(coproduct(f), coproduct(g))
                if lhs != rhs:
                    fails["multiplicativity"] += 1
        if braid_relation_failures(braid_tag(kind, kind), n):
            fails["braid_relation"] += 1
    return fails


def _apply_braid_at(tag, triple_terms, pos):
    """Apply Phi to legs (pos, pos+1) of a dict keyed by monomial triples."""
    out: dict = {}
    for key, c in triple_terms.items():
        a, b = key[pos], key[pos + 1]
        for (bp, ap), d in braid_monomials(tag, a, b):
            new = list(key)
            new[pos], new[pos + 1] = bp, ap
            _accumulate(out, tuple(new), c * d)
    return out


def braid_relation_failures(tag: str, n: int) -> int:
    """Count generator triples violating the Yang-Baxter relation for a same-kind braiding."""
    if tag[0] != tag[1]:
        raise ValueError("the braid relation check needs a same-kind braiding")
    bad = 0
    gens = [_unit(n, i) for i in range(1, n + 1)]
    for a in gens:
        for b in gens:
            for c in gens:
                start = {(a, b, c): ONE}
                lhs = _apply_braid_at(tag, _apply_braid_at(tag, _apply_braid_at(tag, start, 0), 1), 0)
                rhs = _apply_braid_at(tag, _apply_braid_at(tag, _apply_braid_at(tag, start, 1), 0), 1)
                if lhs != rhs:
                    bad += 1
    return bad
