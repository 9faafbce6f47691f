"""Empirical growth exponents of sum h_g(-d)^k against the proven ones.

    python3 scripts/fit_exponents.py --g 3 --k 1,2,3/2 --grid 10000,100000,1000000
"""

import argparse
from fractions import Fraction

from classmoments.moments import moment_report, read_table, sweep


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--g", type=int, default=3)
    p.add_argument("--k", default="1,2,3,4")
    p.add_argument("--grid", default="10000,100000,1000000")
    p.add_argument("--column", choices=["torsion", "sylow"], default="torsion")
    p.add_argument("--table")
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    grid = sorted(int(x) for x in args.grid.split(","))
    table = read_table(args.table) if args.table else sweep(1, grid[-1], (args.g,), jobs=args.jobs)
    print(f"{'k':>5} {'fitted':>8} {'proven':>8}  case")
    for k in (Fraction(x) for x in args.k.split(",")):
        rep = moment_report(table, args.g, k, grid, column=args.column)
        print(f"{str(k):>5} {rep.fitted:8.4f} {rep.sigma_float:8.4f}  {rep.case}")


if __name__ == "__main__":
    main()
