"""Reference computations that share no code with the package.

Everything here is a direct loop over a definition: plain mpmath q-Pochhammer
symbols, brute-force bilateral Jackson sums, letter-by-letter word rewriting
and the three-term Hermite recurrences over Fractions.
"""

from fractions import Fraction

import mpmath


def small_e(y, Q):
    """e_Q(y) = sum y^k / (Q; Q)_k = 1 / (y; Q)_inf."""
    return 1 / mpmath.qp(y, Q)


def big_E(y, Q):
    """E_Q(y) = sum Q^(k(k-1)/2) y^k / (Q; Q)_k = (-y; Q)_inf."""
    return mpmath.qp(-y, Q)


def jackson(h, gamma, q, K=160):
    """(1 - q^2) sum_{|k| <= K} q^(2k) gamma [h(q^(2k) gamma) + h(-q^(2k) gamma)]."""
    p = mpmath.mpf(q) ** 2
    gamma = mpmath.mpf(gamma)
    total = mpmath.mpf(0)
    for k in range(-K, K + 1):
        t = p ** k * gamma
        total += t * (h(t) + h(-t))
    return (1 - p) * total


def gaussian_moment(a, gamma, q):
    """Jackson integral of e_{q^4}(-t^2) t^a over the lattice through gamma."""
    q4 = mpmath.mpf(q) ** 4
    return jackson(lambda t: small_e(-t * t, q4) * t ** a, gamma, q)


def c_closed(gamma, q):
    """Closed form of the Jackson integral of e_{q^4}(-t^2) through gamma."""
    q = mpmath.mpf(q)
    g = mpmath.mpf(gamma)
    q2, q4 = q * q, q ** 4
    num = 2 * g * (1 - q2) * mpmath.qp(q4, q4) * mpmath.qp(-q2 * g * g, q4) * mpmath.qp(-q2 / (g * g), q4)
    den = mpmath.qp(-g * g, q4) * mpmath.qp(-q4 / (g * g), q4) * mpmath.qp(q2, q4)
    return num / den


def big_gaussian_integral(q, c=1):
    """Jackson integral of E_{q^4}(-c t^2) through 1, by direct summation."""
    q4 = mpmath.mpf(q) ** 4
    return jackson(lambda t: big_E(-c * t * t, q4), 1, q)


def b_closed(q):
    q2 = mpmath.mpf(q) ** 2
    return (1 - q2) * mpmath.qp(q2, q2) * mpmath.qp(-q2, q2) * mpmath.qp(-1, q2)


def rewrite_word(word, kind="covector"):
    """Bubble a word of generator indices into normal order.

    Returns (k, exponents): the word equals q^k times the normal-form monomial.
    Covector letters sort ascending (x_i x_j = q x_j x_i for i > j), vector
    letters descending (d_i d_j = q d_j d_i for i < j).
    """
    w = list(word)
    k = 0
    swapped = True
    while swapped:
        swapped = False
        for i in range(len(w) - 1):
            a, b = w[i], w[i + 1]
            if (a > b) if kind == "covector" else (a < b):
                w[i], w[i + 1] = b, a
                k += 1
                swapped = True
    n = max(w, default=0)
    return k, tuple(w.count(j) for j in range(1, n + 1))


def word_of(E, kind="covector"):
    """Normal-form letters of the monomial with exponent vector E."""
    letters = [j for j, e in enumerate(E, 1) for _ in range(e)]
    return letters if kind == "covector" else letters[::-1]


def hermite_recurrence(kind, L, b):
    """Coefficient dicts of h_0..h_L from the three-term recurrences, base b.

    I:  h_{l+1} = z h_l - b^(l-1) (1 - b^l) h_{l-1}
    II: h_{l+1} = z h_l - b^(1-2l) (1 - b^l) h_{l-1}
    """
    b = Fraction(b)
    h = [{0: Fraction(1)}, {1: Fraction(1)}]
    for l in range(1, L):
        c = -(b ** (l - 1) if kind == "I" else b ** (1 - 2 * l)) * (1 - b ** l)
        new = {m + 1: v for m, v in h[l].items()}
        for m, v in h[l - 1].items():
            new[m] = new.get(m, 0) + c * v
        h.append({m: v for m, v in new.items() if v})
    return h[:L + 1]


def qpoch_frac(a, base, k):
    out = Fraction(1)
    for j in range(k):
        out *= 1 - Fraction(a) * Fraction(base) ** j
    return out


def realized_big_gaussian_2d(z1, z2, q, L=80):
    """Realization of E_{q^4}(-x2^2) E_{q^4}(-x1^2) at (z1, z2).

    Reordering x2^(2k) x1^(2l) = q^(4kl) x1^(2l) x2^(2k) turns the inner sum
    over k into E_{q^4}(-q^(4l) z2^2) = (q^(4l) z2^2; q^4)_inf.
    """
    q = mpmath.mpf(q)
    q4 = q ** 4
    total = mpmath.mpf(0)
    for l in range(L + 1):
        c = (-1) ** l * q ** (2 * l * (l - 1)) / mpmath.qp(q4, q4, l)
        total += c * z1 ** (2 * l) * mpmath.qp(q4 ** l * z2 ** 2, q4)
    return total
