"""Heat equation on the disk with Crank-Nicolson in time (dt = h, T = 0.5).

    python scripts/heat_disk.py --N 50,100,200
"""

import argparse

from embound.harness.experiments import run_heat
from embound.harness.norms import observed_rates


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", default="50,100,200")
    p.add_argument("--cfl", type=float, default=1.0, help="dt / h")
    p.add_argument("--T", type=float, default=0.5)
    p.add_argument("--strategy", default="mixed")
    args = p.parse_args()
    res = [run_heat(int(n), args.T, args.cfl, args.strategy) for n in args.N.split(",")]
    hs = [r.h for r in res]
    r2 = observed_rates(hs, [r.E_l2 for r in res])
    ri = observed_rates(hs, [r.E_linf for r in res])
    print(f"{'N':>5} {'h':>9} {'steps':>6} {'E_l2':>10} {'rate':>6} {'E_linf':>10} {'rate':>6}"
          f" {'grad_linf':>10} {'iters':>6}")
    for r, a, b in zip(res, r2, ri):
        print(f"{r.N:5d} {r.h:9.4g} {r.n_steps:6d} {r.E_l2:10.3e} {a:6.2f} {r.E_linf:10.3e} {b:6.2f}"
              f" {r.grad_linf:10.3e} {r.mean_iters:6.2f}")


if __name__ == "__main__":
    main()
