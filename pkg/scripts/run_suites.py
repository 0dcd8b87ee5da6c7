"""Run every verification suite and print one line per suite.

    python scripts/run_suites.py [--only NAME ...] [--json out.json]
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction

from braidq.scalars import Params, use_params
from braidq.suites import SUITES, run_suite


@dataclass
class RunConfig:
    q: Fraction = Fraction(1, 2)
    precision: int = 128
    only: list = field(default_factory=list)
    json_path: str | None = None


def main(cfg: RunConfig) -> int:
    names = cfg.only or list(SUITES)
    results = []
    with use_params(Params(q=cfg.q, precision=cfg.precision)):
        for name in names:
            for res in run_suite(name):
                print(res.line(), flush=True)
                results.append(res)
    if cfg.json_path:
        with open(cfg.json_path, "w") as fh:
            json.dump([r.to_json() for r in results], fh, indent=2, default=str)
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--q", type=Fraction, default=Fraction(1, 2))
    ap.add_argument("--precision", type=int, default=128)
    ap.add_argument("--only", nargs="*", default=[])
    ap.add_argument("--json", dest="json_path")
    a = ap.parse_args()
    sys.exit(main(RunConfig(a.q, a.precision, a.only, a.json_path)))
