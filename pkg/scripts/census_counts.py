"""Facet classes of CUT_n and the TE classes they generate, per n.

Usage: python3 scripts/census_counts.py [--max-n 6] [--long-running]
         [--workers K] [--json out.json]
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass

from bellcut.elimination import CensusOptions, census, census_class_counts
from bellcut.hull import LONG_RUNNING_N, cut_polytope_facets


@dataclass
class Row:
    n: int
    facets: int
    rhs_zero: int
    facet_classes: int
    te_classes: int
    dropped: int
    by_scenario: dict
    seconds: float


def run_row(n: int, workers: int, long_running: bool) -> Row:
    start = time.time()
    hrep = cut_polytope_facets(n, long_running=long_running)
    result = census(n, [c.representative for c in hrep.classes],
                    CensusOptions(workers=workers))
    scenarios = {f"{a}x{b}": k for (a, b), k in
                 census_class_counts(result).items()}
    return Row(n, len(hrep.facets), sum(f.rhs == 0 for f in hrep.facets),
               hrep.class_count, result.count, len(result.dropped),
               scenarios, round(time.time() - start, 1))


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--max-n", type=int, default=6)
    parser.add_argument("--long-running", action="store_true",
                        help=f"include n = {LONG_RUNNING_N}")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--json", dest="json_path")
    args = parser.parse_args()
    top = LONG_RUNNING_N if args.long_running else args.max_n
    rows = []
    print(f"{'n':>2} {'facets':>7} {'rhs=0':>6} {'classes':>7} {'TE':>4} "
          f"{'dropped':>7} {'sec':>7}")
    for n in range(3, top + 1):
        row = run_row(n, args.workers, args.long_running)
        rows.append(row)
        print(f"{row.n:>2} {row.facets:>7} {row.rhs_zero:>6} "
              f"{row.facet_classes:>7} {row.te_classes:>4} {row.dropped:>7} "
              f"{row.seconds:>7}", flush=True)
        print(f"   TE classes per scenario: {row.by_scenario}")
    if args.json_path:
        with open(args.json_path, "w", encoding="utf-8") as fh:
            json.dump([asdict(r) for r in rows], fh, indent=2)


if __name__ == "__main__":
    main()
