from __future__ import annotations

import numpy as np
import scipy.sparse.linalg as spla

from .amg import amg_setup
from .krylov import cg_solve


def _power(A, tol, maxiter, rng):
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(maxiter):
        w = A @ v
        lam_new = v @ w
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


def _inverse(A, tol, maxiter, rng):
    hier = amg_setup(A, "V")
    v = rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam = np.inf
    for _ in range(maxiter):
        w = cg_solve(A, v, tol=1e-12, precond=hier, maxiter=10 * A.shape[0]).x
        mu = v @ w
        v = w / np.linalg.norm(w)
        lam_new = 1.0 / mu
        if abs(lam_new - lam) <= tol * abs(lam_new):
            return lam_new
        lam = lam_new
    return lam


def extremal_eigs(A, which="max", tol=1e-10, method="lanczos", maxiter=20000, seed=0):
    """Largest (``which='max'``) or smallest (``'min'``) magnitude eigenvalue of symmetric A.

    ``method='power'`` uses power iteration / inverse iteration with AMG-CG
    inner solves; ``'lanczos'`` uses ARPACK (shift-invert about zero for 'min').
    """
    if which not in ("max", "min"):
        raise ValueError("which must be 'max' or 'min'")
    n = A.shape[0]
    if n <= 2:
        vals = np.linalg.eigvalsh(A.toarray() if hasattr(A, "toarray") else np.asarray(A))
        return float(vals[np.argmax(np.abs(vals))] if which == "max" else vals[np.argmin(np.abs(vals))])
    rng = np.random.default_rng(seed)
    if method == "power":
        return float(_power(A, tol, maxiter, rng) if which == "max" else _inverse(A, tol, maxiter, rng))
    if method != "lanczos":
        raise ValueError(f"unknown method {method!r}")
    v0 = rng.standard_normal(n)
    if which == "max":
        vals = spla.eigsh(A, k=1, which="LM", tol=tol, v0=v0, return_eigenvectors=False)
    else:
        vals = spla.eigsh(A.tocsc(), k=1, sigma=0.0, which="LM", tol=tol, v0=v0,
                          return_eigenvectors=False)
    return float(vals[0])
