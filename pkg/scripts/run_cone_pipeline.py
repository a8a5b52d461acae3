"""End-to-end walkthrough on the cone potential V = w1^3, w1^2 = q1^2 + q2^2.

Prints each pipeline stage (homogeneity, Darboux hunt, spectra, table
verdicts, certificate) in a readable form, then a single summary line.
"""

import argparse
import sys

import numpy as np

from algpot.parsing import parse_problem
from algpot.pipeline import AnalysisOptions, analyze

CONE = """\
vars q1 q2
ext w1 : w1^2 - q1^2 - q2^2
potential w1^3
"""


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-random", type=int, default=24)
    args = ap.parse_args()

    setup = parse_problem(CONE, label="cone demo")
    report, code = analyze(setup, AnalysisOptions(seed=args.seed,
                                                  n_random=args.n_random))

    hom = report["homogeneity"]
    print(f"weights: base {hom['base_weight']}, fiber {hom['fiber_weights']}, "
          f"value {hom['value_weight']}  ->  degree k = {hom['degree']}")

    print(f"darboux: {report['darboux']['n_accepted']} accepted, "
          f"{report['darboux']['n_rejected']} rejected")
    for entry in report["points"]:
        x = np.asarray(entry["point"])
        rats = [str(c["rational"]) for c in entry["spectrum"]["clusters"]]
        print(f"  point #{entry['index']}: w1 = {x[2].real:.6f}, "
              f"|pi(c)|^2 = {np.sum(x[:2] ** 2).real:.6f}, "
              f"spectrum {{{', '.join(rats)}}}")
        for row in entry["verdicts"]:
            t = row["table"]
            wit = ", ".join(f"{w['row']} p={w['p']}" for w in t["witnesses"])
            print(f"    eigenvalue {t['lambda']}: "
                  f"{'admissible' if t['matched'] else 'MISS'} ({wit})")

    status = report["certificate"]["status"]
    ok = status == "no_obstruction" and code == 0
    print(f"{'PASS' if ok else 'FAIL'}: certificate {status}, exit {code}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
