"""Helmholtz problem on the star domain, solved with MINRES.

    python scripts/helmholtz_star.py --N 200,280
"""

import argparse

import numpy as np

from embound.harness.experiments import solve_steady
from embound.harness.problems import named_problem


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", default="200,280")
    p.add_argument("--strategy", default="mixed")
    args = p.parse_args()
    print(f"{'N':>5} {'iters':>7} {'residual':>10} {'max|u|':>10} {'solve s':>8}")
    for n in (int(v) for v in args.N.split(",")):
        rep = solve_steady(named_problem("star", n=n), n, args.strategy)
        print(f"{n:5d} {rep.iterations:7d} {rep.residual:10.2e} {np.max(np.abs(rep.u)):10.4g}"
              f" {rep.t_solve:8.2f}")


if __name__ == "__main__":
    main()
