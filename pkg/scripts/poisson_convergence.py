"""Convergence sweep for the steady Poisson problems (glass, tilted_square, bone).

Prints one table per strategy/cycle and writes CSVs plus least-squares rates
fitted over the whole sweep.

    python scripts/poisson_convergence.py --problem glass --N 50,100,200,320
"""

import argparse
import os

import numpy as np

from embound.harness.experiments import format_table, run_convergence, write_csv


def fitted_rate(rows, key):
    h = np.log([r.h for r in rows])
    e = np.log([getattr(r, key) for r in rows])
    return float(np.polyfit(h, e, 1)[0])


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--problem", default="glass", choices=("glass", "tilted_square", "bone", "disk"))
    p.add_argument("--N", default="50,100,200")
    p.add_argument("--strategies", default="mixed,rbf")
    p.add_argument("--cycles", default="W,V")
    p.add_argument("--out", default="results")
    args = p.parse_args()
    ns = [int(v) for v in args.N.split(",")]
    os.makedirs(args.out, exist_ok=True)
    for strategy in args.strategies.split(","):
        for cycle in args.cycles.split(","):
            rows = run_convergence(args.problem, ns, strategy, cycle)
            print(f"\n{args.problem}  strategy={strategy}  cycle={cycle}")
            print(format_table(rows))
            if len(rows) > 2:
                fits = {k: fitted_rate(rows, k) for k in ("E_l2", "E_linf", "grad_l2", "grad_linf")}
                print("fitted rates " + "  ".join(f"{k}={v:.2f}" for k, v in fits.items()))
            write_csv(rows, os.path.join(args.out, f"{args.problem}_{strategy}_{cycle}.csv"))


if __name__ == "__main__":
    main()
