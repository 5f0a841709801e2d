"""Experiment runners: steady solves, convergence sweeps, time stepping, QOI sweeps."""

from __future__ import annotations

import csv
import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..assembly import build_system, grid_field
from ..linalg import (
    ConvergenceError,
    IndefiniteError,
    amg_setup,
    cg_solve,
    extremal_eigs,
    minres_solve,
)
from ..spd import check_operator
from ..timestepping import CrankNicolson, ThetaScheme
from .norms import error_norms, gradient_error, observed_rates
from .problems import named_problem

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "N", "h", "E_l2", "E_linf", "rate_l2", "rate_linf", "grad_l2", "grad_linf",
    "iters", "certified", "t_setup_s", "t_solve_s",
)
CG_TOL = 1e-12
MINRES_TOL = 1e-10


class SolverFailure(RuntimeError):
    pass


class CertificationFailure(RuntimeError):
    pass


@dataclass
class ResultRow:
    N: int
    h: float
    E_l2: float = math.nan
    E_linf: float = math.nan
    rate_l2: float = math.nan
    rate_linf: float = math.nan
    grad_l2: float = math.nan
    grad_linf: float = math.nan
    iters: float = math.nan
    certified: str = ""
    t_setup_s: float = math.nan
    t_solve_s: float = math.nan
    error: str = ""
    extra: dict = field(default_factory=dict)

    def as_csv(self):
        out = []
        for c in CSV_COLUMNS:
            v = getattr(self, c)
            if isinstance(v, float):
                out.append("nan" if math.isnan(v) else repr(v))
            else:
                out.append(str(v))
        return out


@dataclass
class SolveReport:
    sys: object
    u: np.ndarray
    iterations: int
    certification: object
    t_setup: float
    t_solve: float
    solver: str = "cg"
    residual: float = math.nan


def solve_steady(problem, n, strategy="mixed", cycle="W", tol=None, require_certified=False):
    """Assemble, certify and solve one steady problem (Poisson or Helmholtz).

    Helmholtz systems are indefinite and go to unpreconditioned MINRES with
    the iteration cap raised to max(2 N_C, 2000), since convergence needs a
    Krylov space comparable to the number of unknowns.
    """
    t0 = time.perf_counter()
    sys = build_system(problem, n, strategy)
    if problem.equation == "helmholtz":
        shift = (problem.omega * sys.h) ** 2
        M = (sys.A - shift * sp.identity(sys.n, format="csr")).tocsr()
        t1 = time.perf_counter()
        try:
            res = minres_solve(M, sys.rhs(), tol=tol or MINRES_TOL, maxiter=max(2 * sys.n, 2000))
        except ConvergenceError as exc:
            raise SolverFailure(str(exc)) from exc
        t2 = time.perf_counter()
        return SolveReport(sys, res.x, res.iterations, None, t1 - t0, t2 - t1, "minres",
                           res.final_residual)
    cert = check_operator(sys)
    if require_certified and cert.status == "not-certified":
        raise CertificationFailure(f"{problem.name} N={n}: operator not certified SPD")
    tol = tol or CG_TOL
    hier = amg_setup(sys.A, cycle)
    t1 = time.perf_counter()
    solver = "cg"
    try:
        res = cg_solve(sys.A, sys.rhs(), tol=tol, precond=hier)
    except IndefiniteError:
        log.warning("CG breakdown for %s N=%d; falling back to MINRES", problem.name, n)
        solver = "minres"
        try:
            res = minres_solve(sys.A, sys.rhs(), tol=tol)
        except ConvergenceError as exc:
            raise SolverFailure(str(exc)) from exc
    except ConvergenceError as exc:
        raise SolverFailure(str(exc)) from exc
    t2 = time.perf_counter()
    return SolveReport(sys, res.x, res.iterations, cert, t1 - t0, t2 - t1, solver,
                       res.final_residual)


def _fill_rates(rows):
    ok = [r for r in rows if not r.error]
    hs = [r.h for r in ok]
    for key in ("l2", "linf"):
        rates = observed_rates(hs, [getattr(r, f"E_{key}") for r in ok])
        for r, v in zip(ok, rates):
            setattr(r, f"rate_{key}", float(v))
    return rows


def run_convergence(problem_name, ns, strategy="mixed", cycle="W", require_certified=False,
                    problem_kw=None):
    """One row per N; stage failures are recorded and the sweep continues."""
    rows = []
    for n in ns:
        problem = named_problem(problem_name, n=n, **(problem_kw or {}))
        h = (problem.box[1] - problem.box[0]) / n
        row = ResultRow(N=n, h=h)
        try:
            rep = solve_steady(problem, n, strategy, cycle, require_certified=require_certified)
        except CertificationFailure as exc:
            row.error, row.certified = str(exc), "not-certified"
            rows.append(row)
            continue
        except Exception as exc:  # recorded per N
            row.error = f"{type(exc).__name__}: {exc}"
            log.error("N=%d failed: %s", n, row.error)
            rows.append(row)
            continue
        row.h = rep.sys.h
        row.iters = rep.iterations
        row.certified = rep.certification.status if rep.certification else "n/a"
        row.t_setup_s, row.t_solve_s = rep.t_setup, rep.t_solve
        if problem.exact is not None:
            row.E_l2, row.E_linf = error_norms(rep.sys, rep.u, problem.exact)
        if problem.exact_grad is not None:
            row.grad_l2, row.grad_linf = gradient_error(rep.sys, rep.u, problem.exact_grad)
        row.extra = {
            "n_unknowns": rep.sys.n,
            "u_max": float(np.max(np.abs(rep.u))),
            "solver": rep.solver,
            "diag_dominant": rep.certification.diag_dominant if rep.certification else None,
            **rep.sys.info,
        }
        rows.append(row)
    return _fill_rates(rows)


def write_csv(rows, path, columns=CSV_COLUMNS):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow(r.as_csv() if hasattr(r, "as_csv") else [r[c] for c in columns])


def format_table(rows, columns=("N", "h", "E_l2", "E_linf", "rate_l2", "rate_linf", "iters",
                                "certified")):
    lines = ["  ".join(f"{c:>10}" for c in columns)]
    for r in rows:
        vals = []
        for c in columns:
            v = getattr(r, c) if hasattr(r, c) else r[c]
            vals.append(f"{v:10.3e}" if isinstance(v, float) and c != "iters" else f"{v!s:>10}")
        if getattr(r, "error", ""):
            vals.append(f"ERROR {r.error}")
        lines.append("  ".join(vals))
    return "\n".join(lines)


# ---- time dependent -------------------------------------------------------


@dataclass
class HeatResult:
    N: int
    h: float
    dt: float
    n_steps: int
    E_l2: float
    E_linf: float
    grad_l2: float
    grad_linf: float
    mean_iters: float


def run_heat(n, T=0.5, dt_over_h=1.0, strategy="mixed", cycle="V"):
    problem = named_problem("heat_disk")
    sys = build_system(problem, n, strategy)
    n_steps = max(1, round(T / (dt_over_h * sys.h)))
    dt = T / n_steps
    x, y = sys.points
    u = problem.exact(x, y, 0.0)
    cn = CrankNicolson(sys, dt, cycle=cycle)
    t = 0.0
    for _ in range(n_steps):
        u = cn.step(u, t)
        t += dt
    el2, elinf = error_norms(sys, u, problem.exact, T)
    gl2, glinf = gradient_error(sys, u, problem.exact_grad, T)
    return HeatResult(n, sys.h, dt, n_steps, el2, elinf, gl2, glinf, float(np.mean(cn.iterations)))


@dataclass
class WaveResult:
    N: int
    h: float
    dt: float
    theta: float
    n_steps: int
    max_error: float
    mean_iters: float
    stable: bool
    message: str = ""
    history: list = field(default_factory=list)


def run_wave(n, theta=0.0, cfl=0.7, periods=10.2, strategy="mixed", cycle="V", record_every=0):
    """Standing mode on the unit disk; ``n`` intervals across [-1.1, 1.1]."""
    from ..timestepping import InstabilityError

    problem = named_problem("wave_disk")
    sys = build_system(problem, n, strategy)
    kappa = problem.extras["kappa"]
    T = periods * 2 * math.pi / kappa
    n_steps = max(2, math.ceil(T / (cfl * sys.h)))
    dt = T / n_steps
    x, y = sys.points
    u0 = problem.exact(x, y, 0.0)
    u1 = problem.exact(x, y, dt)
    scheme = ThetaScheme(sys, dt, theta, cycle=cycle)
    history = []

    def cb(step, t, u_prev, u_cur):
        if record_every and step % record_every == 0:
            _, einf = error_norms(sys, u_cur, problem.exact, t)
            history.append((step, t, einf))

    try:
        _, u, t = scheme.run(u0, u1, 0.0, n_steps, callback=cb if record_every else None)
    except InstabilityError as exc:
        return WaveResult(n, sys.h, dt, theta, n_steps, math.inf,
                          float(np.mean(scheme.iterations)) if scheme.iterations else 0.0,
                          False, str(exc), history)
    _, einf = error_norms(sys, u, problem.exact, T)
    iters = float(np.mean(scheme.iterations)) if scheme.iterations else 0.0
    return WaveResult(n, sys.h, dt, theta, n_steps, einf, iters, True, "", history)


# ---- quantities of interest ----------------------------------------------


def bilinear_at(sys, u, x0, y0, t=0.0):
    """Bilinear interpolation of the grid solution from the 4 enclosing grid values."""
    g = sys.ctx.grid
    F = grid_field(sys, u, t, include_isolated=True)
    fx, fy = (x0 - g.x_lo) / g.h, (y0 - g.y_lo) / g.h
    i, j = int(math.floor(fx)), int(math.floor(fy))
    i, j = min(max(i, 0), g.nx - 2), min(max(j, 0), g.ny - 2)
    sx, sy = fx - i, fy - j
    vals = F[i : i + 2, j : j + 2]
    if np.isnan(vals).any():
        raise ValueError("QOI point is not surrounded by solution values")
    return float(
        (1 - sx) * (1 - sy) * vals[0, 0] + sx * (1 - sy) * vals[1, 0]
        + (1 - sx) * sy * vals[0, 1] + sx * sy * vals[1, 1]
    )


def box_integral(sys, u, rect=(-1.0, 1.0, -0.5, 0.5)):
    """h^2 times the sum of u over computational points inside ``rect``."""
    x, y = sys.points
    sel = (x >= rect[0]) & (x <= rect[1]) & (y >= rect[2]) & (y <= rect[3])
    return float(sys.h**2 * np.sum(u[sel]))


@dataclass
class QoiRow:
    param: float
    qoi: float
    dqoi: float = math.nan
    E_linf: float = math.nan
    error: str = ""


def qoi_sweep(family, params, n, strategy="mixed", cycle="W"):
    """QOI per parameter sample and its central-difference derivative.

    ``family='ellipse'`` evaluates u(0, 0); ``'rotated_ellipse'`` integrates
    u over [-1, 1] x [-0.5, 0.5].
    """
    rows = []
    for p in params:
        kw = {"a": p} if family == "ellipse" else {"alpha": p}
        problem = named_problem(family, **kw)
        try:
            rep = solve_steady(problem, n, strategy, cycle)
            q = bilinear_at(rep.sys, rep.u, 0.0, 0.0) if family == "ellipse" else box_integral(rep.sys, rep.u)
            _, einf = error_norms(rep.sys, rep.u, problem.exact)
            rows.append(QoiRow(float(p), q, E_linf=einf))
        except Exception as exc:
            rows.append(QoiRow(float(p), math.nan, error=f"{type(exc).__name__}: {exc}"))
    ps = np.array([r.param for r in rows])
    qs = np.array([r.qoi for r in rows])
    if len(rows) >= 3:
        d = np.gradient(qs, ps)
        for r, v in zip(rows, d):
            r.dqoi = float(v)
    return rows


# ---- spectra and certification -------------------------------------------


@dataclass
class EigRow:
    N: int
    h: float
    lam_large: float  # largest magnitude eigenvalue of h^2 L
    lam_small: float  # smallest magnitude eigenvalue of h^2 L


def eig_sweep(problem_name, ns, strategy="mixed", method="lanczos", tol=1e-10, seed=0):
    """Extremal eigenvalues of the scaled operator h^2 L = -A.

    A constant conductivity is folded into the source, so for those problems
    this is the spectrum of the scaled discrete Laplacian.
    """
    rows = []
    for n in ns:
        problem = named_problem(problem_name, n=n)
        sys = build_system(problem, n, strategy)
        lmax = extremal_eigs(sys.A, "max", tol=tol, method=method, seed=seed)
        lmin = extremal_eigs(sys.A, "min", tol=tol, method=method, seed=seed)
        rows.append(EigRow(n, sys.h, -lmax, -lmin))
    return rows


def spd_report(problem_name, n, strategy="mixed"):
    problem = named_problem(problem_name, n=n)
    sys = build_system(problem, n, strategy)
    return sys, check_operator(sys)


def comp_mask_ascii(problem_name, n):
    problem = named_problem(problem_name, n=n)
    sys = build_system(problem, n)
    return sys.ctx.cls.ascii()


__all__ = [
    "CSV_COLUMNS", "CertificationFailure", "ResultRow", "SolveReport", "SolverFailure",
    "bilinear_at", "box_integral", "eig_sweep", "format_table", "qoi_sweep", "run_convergence",
    "run_heat", "run_wave", "solve_steady", "spd_report", "write_csv",
]
