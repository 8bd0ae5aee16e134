"""Accretivity interval in c for v = e^{-x}, l = c x e^{-x} on the half-line,
for several potentials (eta'(0) computed by the Riccati solver)."""

import argparse
import json

from dissext.funcspace import FuncExpr
from dissext.schrodinger import HALF_LINE, PotentialSpec, accretive_interval, solve_eta


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--values", type=float, nargs="+", default=[0.25, 1.0, 4.0, 9.0])
    args = ap.parse_args()
    v = FuncExpr.power(0.0, beta=-1.0, interval=HALF_LINE)
    w = FuncExpr.power(1.0, beta=-1.0, interval=HALF_LINE)
    pots = [(f"V={c:g}", PotentialSpec.constant(c)) for c in args.values]
    one_plus_exp = (FuncExpr.power(0.0, interval=HALF_LINE)
                    + FuncExpr.power(0.0, beta=-1.0, interval=HALF_LINE))
    pots.append(("V=1+exp(-x)", PotentialSpec.from_funcexpr(one_plus_exp, 1.0, 2.0)))
    for label, pot in pots:
        eta = solve_eta(pot)
        print(json.dumps({"potential": label, "eta_prime_0": eta.eta_prime_0,
                          "interval": accretive_interval(v, w, pot, eta.eta_prime_0)}))


if __name__ == "__main__":
    main()
