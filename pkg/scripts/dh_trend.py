"""Average 3-torsion over imaginary quadratic fields with |disc| < X.

Prints the running average at each X of the grid; it should creep up
towards 2 from below.
"""

import argparse

from classmoments.moments import dh_average, read_table, sweep


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--grid", default="1000,10000,100000,1000000")
    p.add_argument("--table", help="sweep CSV covering d < max(grid)")
    p.add_argument("--jobs", type=int, default=1)
    args = p.parse_args()
    grid = sorted(int(x) for x in args.grid.split(","))
    table = read_table(args.table) if args.table else sweep(1, grid[-1], (3,), jobs=args.jobs)
    for X in grid:
        print(f"X={X:>9}  average h_3 = {dh_average(table, X):.4f}")


if __name__ == "__main__":
    main()
