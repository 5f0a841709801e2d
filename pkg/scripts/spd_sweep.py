"""Certificate and diagonal-dominance sweep over every grid size in a range.

    python scripts/spd_sweep.py --problem tilted_square --N-min 50 --N-max 500
"""

import argparse

from embound.assembly import build_system
from embound.harness.problems import named_problem
from embound.spd import check_operator


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--problem", default="tilted_square")
    p.add_argument("--N-min", type=int, default=50)
    p.add_argument("--N-max", type=int, default=500)
    p.add_argument("--strategy", default="mixed")
    args = p.parse_args()
    non_dominant, uncertified = [], []
    for n in range(args.N_min, args.N_max + 1):
        chk = check_operator(build_system(named_problem(args.problem, n=n), n, args.strategy))
        if chk.diag_dominant is False:
            non_dominant.append(n)
        if chk.status == "not-certified":
            uncertified.append(n)
            print(f"N={n}\n{chk.report()}")
    total = args.N_max - args.N_min + 1
    print(f"{args.problem}: {total} sizes, not diagonally dominant at {non_dominant}, "
          f"not certified at {uncertified}")


if __name__ == "__main__":
    main()
