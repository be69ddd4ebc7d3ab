"""Tightness sweep over the parametric families.

Prints one line per instance: the scenario size and whether the instance
is a facet of the correlation polytope.
"""
import argparse
import itertools

from bellcut.analysis import tightness_report
from bellcut.families import (CliqueWebParams, WeightVector, cliqueweb_bell,
                              cliqueweb_bell_literal, hypermetric_bell,
                              hypermetric_tightness_condition, immm22)
from bellcut.model import ModelError


def _line(label, ineq):
    rep = tightness_report(ineq)
    status = "facet" if rep.is_facet else ("valid" if rep.valid else "INVALID")
    print(f"{label:<40} ({ineq.mA},{ineq.mB})  {status}", flush=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-m", type=int, default=5)
    parser.add_argument("--max-s", type=int, default=5)
    args = parser.parse_args()
    for m in range(2, args.max_m + 1):
        _line(f"I_mm22 m={m}", immm22(m))
    for s in range(2, args.max_s + 1):
        for t in range(2, s + 1):
            if (s - t) % 2:
                continue
            try:
                p = CliqueWebParams(s, t, (s - t) // 2)
            except ModelError:
                continue
            _line(f"clique-web {p.s},{p.t},{p.r}", cliqueweb_bell(p))
            if p.r:
                _line(f"clique-web {p.s},{p.t},{p.r} literal",
                      cliqueweb_bell_literal(p))
    for bA, bB in itertools.product([(1, 1), (1, 1, 1), (2, 1)],
                                    [(-1, -1), (-1, -1, -1), (1, -1)]):
        b = WeightVector(bA, bB)
        cond = hypermetric_tightness_condition(b)
        _line(f"hypermetric {bA} {bB} [{cond}]", hypermetric_bell(b))


if __name__ == "__main__":
    main()
