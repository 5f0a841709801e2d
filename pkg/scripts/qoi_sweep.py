"""Quantity-of-interest sweeps over ellipse aspect ratio and rotation angle.

    python scripts/qoi_sweep.py --family ellipse --N 200
    python scripts/qoi_sweep.py --family rotated_ellipse --N 200
"""

import argparse

import numpy as np

from embound.harness.experiments import qoi_sweep


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--family", default="ellipse", choices=("ellipse", "rotated_ellipse"))
    p.add_argument("--N", type=int, default=200)
    p.add_argument("--samples", type=int, default=21)
    args = p.parse_args()
    if args.family == "ellipse":
        params = 2.0 ** np.linspace(-1, 1, args.samples)
    else:
        params = np.linspace(0, np.pi, args.samples, endpoint=False)
    rows = qoi_sweep(args.family, params, args.N)
    print(f"{'param':>9} {'qoi':>14} {'dqoi':>11} {'E_linf':>10}")
    for r in rows:
        print(f"{r.param:9.4f} {r.qoi:14.8f} {r.dqoi:11.4g} {r.E_linf:10.3e} {r.error}")


if __name__ == "__main__":
    main()
