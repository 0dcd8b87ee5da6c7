"""Table of realized Gaussian moments against the closed moment formula.

For f = e(-x1^2) x1^a1 e(-x2^2) x2^a2 the realized integral at gamma should be
q^(-sum a^2/2) prod (q^2; q^4)_(a/2) times the integral of g when every a is
even, and zero otherwise.  The second block shows the same monomials placed
after the whole Gaussian (g x^A), which picks up extra powers of q.
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import mpmath

from braidq.calculus import global_integral
from braidq.scalars import Params, current_q, use_params
from braidq.qspecial import gaussian_analytic


@dataclass
class TableConfig:
    q: Fraction = Fraction(1, 2)
    max_a: int = 4
    gamma: tuple = (1, 1)


def formula(A, base):
    q = current_q()
    if any(a % 2 for a in A):
        return mpmath.mpf(0)
    out = base * q ** (-sum(a * a for a in A) / 2)
    for a in A:
        out *= mpmath.qp(q ** 2, q ** 4, a // 2)
    return out


def main(cfg: TableConfig):
    with use_params(Params(q=cfg.q)):
        g = gaussian_analytic("g", 2)
        base = mpmath.re(global_integral(g, cfg.gamma, "I"))
        print(f"integral of g at gamma={cfg.gamma}: {mpmath.nstr(base, 25)}")
        print(f"{'A':>8}  {'interleaved':>26}  {'formula':>26}  {'g x^A / formula':>16}")
        for A in product(range(cfg.max_a + 1), repeat=2):
            inter = global_integral(gaussian_analytic("g", 2, polys=[{a: 1} for a in A]), cfg.gamma, "I")
            right = global_integral(g.times_monomial(A, "right"), cfg.gamma, "I")
            expect = formula(A, base)
            ratio = mpmath.nstr(mpmath.re(right / expect), 8) if expect else "-"
            print(f"{str(A):>8}  {mpmath.nstr(mpmath.re(inter), 20):>26}  "
                  f"{mpmath.nstr(expect, 20):>26}  {ratio:>16}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--max-a", type=int, default=4)
    a = ap.parse_args()
    main(TableConfig(a.q, a.max_a))
