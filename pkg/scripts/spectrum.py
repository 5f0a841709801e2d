"""Extremal eigenvalues of the scaled operator h^2 L over a grid sweep.

    python scripts/spectrum.py --problem glass --N 50,100,200
"""

import argparse

from embound.harness.experiments import eig_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--problem", default="glass")
    p.add_argument("--N", default="50,100,200")
    p.add_argument("--strategy", default="mixed")
    p.add_argument("--method", default="lanczos", choices=("lanczos", "power"))
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    rows = eig_sweep(args.problem, [int(v) for v in args.N.split(",")], args.strategy,
                     args.method, seed=args.seed)
    print(f"{'N':>5} {'h':>10} {'|lam| max':>12} {'|lam| min':>12}")
    for r in rows:
        print(f"{r.N:5d} {r.h:10.4g} {abs(r.lam_large):12.6f} {abs(r.lam_small):12.4g}")


if __name__ == "__main__":
    main()
