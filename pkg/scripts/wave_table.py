"""Standing Bessel mode on the unit disk with the theta scheme.

Reproduces the max-error table: one column per (theta, dt/h) pair, errors at
the final time after the requested number of periods.

    python scripts/wave_table.py --N 100,200,400
"""

import argparse
from fractions import Fraction

from embound.harness.experiments import run_wave
from embound.harness.norms import observed_rates

SCHEMES = ((0.0, 0.7), (0.5, 2.0), (0.25, 2.0), (1 / 12, 0.85))


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--N", default="100,200")
    p.add_argument("--periods", type=float, default=10.2)
    p.add_argument("--thetas", default="all", help="comma separated subset such as 0,1/12")
    args = p.parse_args()
    ns = [int(v) for v in args.N.split(",")]
    schemes = SCHEMES
    if args.thetas != "all":
        want = {float(Fraction(v)) for v in args.thetas.split(",")}
        schemes = [s for s in SCHEMES if any(abs(s[0] - w) < 1e-12 for w in want)]
    for theta, cfl in schemes:
        res = [run_wave(n, theta, cfl, args.periods) for n in ns]
        rates = observed_rates([r.h for r in res], [r.max_error for r in res])
        print(f"\ntheta={theta:.4g}  dt/h={cfl}")
        print(f"{'N':>5} {'h':>9} {'max error':>10} {'rate':>6} {'iters':>6} stable")
        for r, q in zip(res, rates):
            print(f"{r.N:5d} {r.h:9.4g} {r.max_error:10.3e} {q:6.2f} {r.mean_iters:6.2f} {r.stable}")


if __name__ == "__main__":
    main()
