"""Resumable class-number sweep to CSV.

    python3 scripts/run_sweep.py --to 1000000 --g 3,5 --jobs 4 --out runs/sweep.csv

Re-running with the same arguments continues from the last completed chunk.
"""

import argparse
import sys
import time

from classmoments.moments import sweep


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--from", dest="lo", type=int, default=1)
    p.add_argument("--to", dest="hi", type=int, required=True)
    p.add_argument("--g", default="3")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--chunk", type=int, default=100000)
    p.add_argument("--out", required=True)
    args = p.parse_args()
    g_list = tuple(int(x) for x in args.g.split(","))
    t0 = time.time()

    def progress(done_to):
        print(f"  d < {done_to} done ({time.time() - t0:.0f}s)", file=sys.stderr)

    table = sweep(args.lo, args.hi, g_list, path=args.out, chunk=args.chunk,
                  jobs=args.jobs, progress=progress)
    print(f"{len(table)} rows -> {args.out}")


if __name__ == "__main__":
    main()
