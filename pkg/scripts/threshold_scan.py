"""Dissipativity threshold along l = i c x^g, v = x^g, located by bisection
and compared with 8 g (g + 1) / (2 g + 1).  Writes a CSV table."""

import argparse
import csv
import sys
import time

from dissext.first_order import bisect_threshold
from dissext.funcspace import FuncExpr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.1, 0.3, 0.5, 1, 2, 5, 10])
    ap.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    ap.add_argument("--out", default="-")
    args = ap.parse_args()
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["gamma", "c_bisect", "c_formula", "rel_error", "seconds"])
    for g in args.gammas:
        t0 = time.perf_counter()
        c = bisect_threshold(FuncExpr.power(g), FuncExpr.power(g, 1j), g, 1e-3, 1e3,
                             method=args.method)
        exact = 8 * g * (g + 1) / (2 * g + 1)
        w.writerow([g, repr(c), repr(exact), f"{abs(c - exact) / exact:.3e}",
                    f"{time.perf_counter() - t0:.3f}"])


if __name__ == "__main__":
    main()
