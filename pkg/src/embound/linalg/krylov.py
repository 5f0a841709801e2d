from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ConvergenceError(RuntimeError):
    def __init__(self, msg, x=None, history=None):
        super().__init__(msg)
        self.x = x
        self.history = history or []


class IndefiniteError(ConvergenceError):
    """CG met p^T A p <= 0; the matrix is not positive definite (try MINRES)."""


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    residuals: list = field(default_factory=list)

    @property
    def final_residual(self):
        return self.residuals[-1] if self.residuals else 0.0


def _as_precond(M):
    if M is None:
        return lambda r: r
    if hasattr(M, "apply"):
        return M.apply
    if callable(M):
        return M
    return lambda r: M @ r


def cg_solve(A, b, x0=None, tol=1e-12, precond=None, maxiter=None) -> SolveResult:
    """(Preconditioned) conjugate gradients to ``||b - A x|| <= tol ||b||``.

    ``precond`` is an :class:`AmgHierarchy`, a callable ``r -> z`` or a matrix;
    it must be symmetric positive definite.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if maxiter is None:
        maxiter = max(20, int(math.ceil(10 * math.sqrt(n))))
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float, copy=True)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return SolveResult(np.zeros(n), 0, [0.0])
    apply_m = _as_precond(precond)
    r = b - A @ x
    hist = [np.linalg.norm(r) / bnorm]
    if hist[-1] <= tol:
        return SolveResult(x, 0, hist)
    z = apply_m(r)
    p = z.copy()
    rz = r @ z
    best_true = hist[0]
    for it in range(1, maxiter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0:
            raise IndefiniteError(
                f"CG breakdown at iteration {it}: p^T A p = {pAp:.3e}; use MINRES", x, hist
            )
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        rel = np.linalg.norm(r) / bnorm
        if rel <= tol:
            # confirm against the true residual before stopping
            r = b - A @ x
            rel = np.linalg.norm(r) / bnorm
            hist.append(rel)
            if rel <= tol:
                return SolveResult(x, it, hist)
            if rel >= 0.5 * best_true:
                raise ConvergenceError(
                    f"CG stagnated at true residual {rel:.3e} (tol={tol:g}); round-off floor",
                    x,
                    hist,
                )
            best_true = rel
            # recurrence drifted: restart from the current iterate
            z = apply_m(r)
            p = z.copy()
            rz = r @ z
            continue
        hist.append(rel)
        z = apply_m(r)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise ConvergenceError(
        f"CG did not reach tol={tol:g} in {maxiter} iterations (residual {hist[-1]:.3e})", x, hist
    )


def minres_solve(A, b, x0=None, tol=1e-12, maxiter=None) -> SolveResult:
    """MINRES (Paige and Saunders) for symmetric, possibly indefinite ``A``."""
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if maxiter is None:
        maxiter = max(20, int(math.ceil(20 * math.sqrt(n))))
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float, copy=True)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return SolveResult(np.zeros(n), 0, [0.0])
    eps = np.finfo(float).eps

    r1 = b - A @ x
    beta1 = np.linalg.norm(r1)
    hist = [beta1 / bnorm]
    if hist[-1] <= tol:
        return SolveResult(x, 0, hist)
    y = r1.copy()
    r2 = r1.copy()
    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros(n)
    w2 = np.zeros(n)
    for it in range(1, maxiter + 1):
        v = y / beta
        y = A @ v
        if it >= 2:
            y = y - (beta / oldb) * r1
        alfa = v @ y
        y = y - (alfa / beta) * r2
        r1, r2 = r2, y
        oldb, beta = beta, np.linalg.norm(y)
        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = max(np.hypot(gbar, beta), eps)
        cs, sn = gbar / gamma, beta / gamma
        phi = cs * phibar
        phibar = sn * phibar
        w1, w2 = w2, w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        rel = phibar / bnorm
        if rel <= tol or beta == 0:
            true_rel = np.linalg.norm(b - A @ x) / bnorm
            hist.append(true_rel)
            if true_rel <= tol:
                return SolveResult(x, it, hist)
            if beta == 0:
                break
            # estimate drifted from the true residual; restart from x
            res = minres_solve(A, b, x, tol, maxiter - it)
            return SolveResult(res.x, it + res.iterations, hist + res.residuals[1:])
        hist.append(rel)
    raise ConvergenceError(
        f"MINRES did not reach tol={tol:g} in {maxiter} iterations (residual {hist[-1]:.3e})",
        x,
        hist,
    )
