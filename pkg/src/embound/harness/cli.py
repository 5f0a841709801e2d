"""Batch command line: ``embound <command> [options]``.

Exit codes: 0 success, 2 configuration or usage error, 3 solver failure,
4 certification failure when ``--require-certified`` is set.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import os
import sys

import numpy as np

from ..assembly import build_system, export_matrix
from .config import COMMANDS, ConfigError, load_config, parse_list
from .experiments import (
    CertificationFailure,
    SolverFailure,
    eig_sweep,
    format_table,
    qoi_sweep,
    run_convergence,
    run_heat,
    run_wave,
    solve_steady,
    spd_report,
    write_csv,
)
from .norms import observed_rates
from .problems import named_problem

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_CERT = 0, 2, 3, 4
log = logging.getLogger("embound")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser():
    p = _Parser(prog="embound", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    defaults_problem = {
        "poisson": "glass", "heat": "heat_disk", "wave": "wave_disk", "helmholtz": "star",
        "qoi": "ellipse", "spdcheck": "tilted_square", "eig": "glass",
    }
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="INI file with experiment settings")
        s.add_argument("--problem", help=f"named problem (default {defaults_problem[name]})")
        s.add_argument("--N", dest="ns", help="comma separated grid sizes")
        s.add_argument("--strategy", choices=("mixed", "rbf"))
        s.add_argument("--cycle", choices=("V", "W"))
        s.add_argument("--out", dest="output_dir", help="output directory")
        s.add_argument("--seed", type=int)
        s.add_argument("--require-certified", action="store_true", default=None)
        s.add_argument("--no-timings", dest="timings", action="store_false", default=None,
                       help="write NaN in the wall-time columns for bit-identical CSVs")
        s.add_argument("-v", "--verbose", action="store_true")
        if name in ("wave", "heat"):
            s.add_argument("--theta", type=float)
            s.add_argument("--cfl", type=float, help="dt / h")
            s.add_argument("--periods", type=float)
            s.add_argument("--T", type=float)
        if name == "qoi":
            s.add_argument("--family", choices=("ellipse", "rotated_ellipse"))
            s.add_argument("--params", help="comma separated parameter values")
        if name == "eig":
            s.add_argument("--method", dest="eig_method", choices=("lanczos", "power"))
        if name in ("poisson", "spdcheck"):
            s.add_argument("--dump-mask", action="store_true", help="write the ASCII point map")
            s.add_argument("--export-matrix", action="store_true",
                           help="write the assembled matrix as coordinate triplets")
    return p, defaults_problem


def _resolve(args, defaults_problem):
    cfg = load_config(args.config)
    cfg.command = args.command
    if args.config is None or args.problem is not None:
        cfg.problem = args.problem or defaults_problem[args.command]
    over = {k: getattr(args, k, None) for k in (
        "strategy", "cycle", "output_dir", "seed", "require_certified", "timings",
        "theta", "cfl", "periods", "T", "family", "eig_method")}
    if args.ns is not None:
        over["ns"] = parse_list(args.ns, int)
    if getattr(args, "params", None) is not None:
        over["params"] = parse_list(args.params, float)
    cfg.update(**over)
    if args.command == "qoi" and cfg.problem not in ("ellipse", "rotated_ellipse"):
        cfg.problem = cfg.family
    if args.command == "qoi":
        cfg.family = cfg.problem
    return cfg.validate()


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["nan" if isinstance(v, float) and math.isnan(v) else
                        (repr(v) if isinstance(v, float) else v) for v in r])


def _cmd_poisson(cfg, args):
    rows = run_convergence(cfg.problem, cfg.ns, cfg.strategy, cfg.cycle, cfg.require_certified)
    if not cfg.timings:
        for r in rows:
            r.t_setup_s = r.t_solve_s = math.nan
    path = os.path.join(cfg.output_dir, f"{cfg.problem}_{cfg.strategy}_{cfg.cycle}.csv")
    write_csv(rows, path)
    print(format_table(rows))
    print(f"wrote {path}")
    for n in cfg.ns:
        if getattr(args, "dump_mask", False) or getattr(args, "export_matrix", False):
            sys_ = build_system(named_problem(cfg.problem, n=n), n, cfg.strategy)
            if args.dump_mask:
                with open(os.path.join(cfg.output_dir, f"{cfg.problem}_N{n}_mask.txt"), "w") as fh:
                    fh.write(sys_.ctx.cls.ascii() + "\n")
            if args.export_matrix:
                export_matrix(sys_.A, os.path.join(cfg.output_dir, f"{cfg.problem}_N{n}_A.txt"))
    if any(r.certified == "not-certified" for r in rows) and cfg.require_certified:
        return EXIT_CERT
    if any(r.error for r in rows):
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_heat(cfg, args):
    res = [run_heat(n, T=cfg.T, dt_over_h=cfg.cfl or 1.0,
                    strategy=cfg.strategy, cycle=args.cycle or "V") for n in cfg.ns]
    hs = [r.h for r in res]
    r2 = observed_rates(hs, [r.E_l2 for r in res])
    ri = observed_rates(hs, [r.E_linf for r in res])
    header = ("N", "h", "dt", "n_steps", "E_l2", "E_linf", "rate_l2", "rate_linf",
              "grad_l2", "grad_linf", "mean_iters")
    rows = [(r.N, r.h, r.dt, r.n_steps, r.E_l2, r.E_linf, float(a), float(b), r.grad_l2,
             r.grad_linf, r.mean_iters) for r, a, b in zip(res, r2, ri)]
    path = os.path.join(cfg.output_dir, f"heat_{cfg.strategy}.csv")
    _write_rows(path, header, rows)
    for row in rows:
        print("  ".join(f"{v:.4g}" if isinstance(v, float) else str(v) for v in row))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_wave(cfg, args):
    res = [run_wave(n, cfg.theta, cfg.cfl or 0.7, cfg.periods, cfg.strategy, args.cycle or "V")
           for n in cfg.ns]
    rates = observed_rates([r.h for r in res], [r.max_error for r in res])
    header = ("N", "h", "dt", "theta", "n_steps", "max_error", "rate", "mean_iters", "stable")
    rows = [(r.N, r.h, r.dt, r.theta, r.n_steps, r.max_error, float(p), r.mean_iters, r.stable)
            for r, p in zip(res, rates)]
    path = os.path.join(cfg.output_dir, f"wave_theta{cfg.theta:.6g}_cfl{cfg.cfl or 0.7:g}.csv")
    _write_rows(path, header, rows)
    for row in rows:
        print("  ".join(f"{v:.4g}" if isinstance(v, float) else str(v) for v in row))
    print(f"wrote {path}")
    unstable = [r for r in res if not r.stable]
    for r in unstable:
        print(f"N={r.N}: {r.message}", file=sys.stderr)
    return EXIT_SOLVER if unstable else EXIT_OK


def _cmd_helmholtz(cfg, args):
    rows = []
    for n in cfg.ns:
        rep = solve_steady(named_problem(cfg.problem, n=n), n, cfg.strategy)
        rows.append((n, rep.sys.h, rep.iterations, rep.residual, float(np.max(np.abs(rep.u)))))
    path = os.path.join(cfg.output_dir, f"{cfg.problem}_helmholtz.csv")
    _write_rows(path, ("N", "h", "iterations", "residual", "u_max"), rows)
    for row in rows:
        print("  ".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in row))
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_qoi(cfg, args):
    n = cfg.ns[-1]
    rows = qoi_sweep(cfg.family, cfg.params, n, cfg.strategy, cfg.cycle)
    path = os.path.join(cfg.output_dir, f"qoi_{cfg.family}_N{n}.csv")
    _write_rows(path, ("param", "qoi", "dqoi", "E_linf", "error"),
                [(r.param, r.qoi, r.dqoi, r.E_linf, r.error) for r in rows])
    for r in rows:
        print(f"{r.param:.6g}  {r.qoi:.8g}  {r.dqoi:.6g}  {r.error}")
    print(f"wrote {path}")
    return EXIT_SOLVER if any(r.error for r in rows) else EXIT_OK


def _cmd_spdcheck(cfg, args):
    status = EXIT_OK
    for n in cfg.ns:
        sys_, chk = spd_report(cfg.problem, n, cfg.strategy)
        text = f"problem: {cfg.problem}\nN: {n}\n{chk.report()}\n"
        print(text)
        with open(os.path.join(cfg.output_dir, f"spdcheck_{cfg.problem}_N{n}.txt"), "w") as fh:
            fh.write(text)
        if args.dump_mask:
            with open(os.path.join(cfg.output_dir, f"{cfg.problem}_N{n}_mask.txt"), "w") as fh:
                fh.write(sys_.ctx.cls.ascii() + "\n")
        if args.export_matrix:
            export_matrix(sys_.A, os.path.join(cfg.output_dir, f"{cfg.problem}_N{n}_A.txt"))
        if cfg.require_certified and chk.status != "certified":
            status = EXIT_CERT
    return status


def _cmd_eig(cfg, args):
    rows = eig_sweep(cfg.problem, cfg.ns, cfg.strategy, cfg.eig_method, seed=cfg.seed)
    path = os.path.join(cfg.output_dir, f"eig_{cfg.problem}_{cfg.strategy}.csv")
    _write_rows(path, ("N", "h", "lam_large", "lam_small"),
                [(r.N, r.h, r.lam_large, r.lam_small) for r in rows])
    for r in rows:
        print(f"N={r.N}  lam_large={r.lam_large:.8g}  lam_small={r.lam_small:.8g}")
    print(f"wrote {path}")
    return EXIT_OK


HANDLERS = {
    "poisson": _cmd_poisson, "heat": _cmd_heat, "wave": _cmd_wave, "helmholtz": _cmd_helmholtz,
    "qoi": _cmd_qoi, "spdcheck": _cmd_spdcheck, "eig": _cmd_eig,
}


def main(argv=None) -> int:
    parser, defaults_problem = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _resolve(args, defaults_problem)
        os.makedirs(cfg.output_dir, exist_ok=True)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return HANDLERS[cfg.command](cfg, args)
    except CertificationFailure as exc:
        print(f"certification failure: {exc}", file=sys.stderr)
        return EXIT_CERT
    except (SolverFailure, ArithmeticError, RuntimeError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
