"""Growth of the realized big Gaussian G(q^2) along (q^(2-2r), q^(-2r)).

Prints |G| at the ray points, the successive ratios, and the probe verdicts
for G and for the ascending product E(-x1^2) E(-x2^2) on the lattice (q, 1).
"""

import argparse
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from braidq.calculus import integrability_probe
from braidq.factored import AnalyticSeries, OneVar
from braidq.qalgebra import COVECTOR
from braidq.qspecial import gaussian_analytic
from braidq.scalars import Params, current_q, use_params


@dataclass
class GrowthConfig:
    q: Fraction = Fraction(1, 2)
    r_max: int = 10


def main(cfg: GrowthConfig):
    with use_params(Params(q=cfg.q)):
        q = current_q()
        G = gaussian_analytic("G", 2)
        prev = None
        for r in range(1, cfg.r_max + 1):
            v = abs(G.evaluate_realized([q ** (2 - 2 * r), q ** (-2 * r)]))
            ratio = "" if prev in (None, 0) else mpmath.nstr(v / prev, 8)
            print(f"r={r:>2}  |G| = {mpmath.nstr(v, 12):>20}  ratio {ratio}")
            prev = v
        print("G:", integrability_probe(G, [q, 1]).verdict)
        asc = AnalyticSeries.product(COVECTOR, 2, [("f", 1, OneVar.gaussian("E", 1)),
                                                   ("f", 2, OneVar.gaussian("E", 1))])
        print("E(-x1^2) E(-x2^2):", integrability_probe(asc, [q, 1]).verdict)


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--r-max", type=int, default=10)
    a = ap.parse_args()
    main(GrowthConfig(a.q, a.r_max))
