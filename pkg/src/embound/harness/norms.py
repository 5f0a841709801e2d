"""Discrete error norms for solutions and their gradients."""

from __future__ import annotations

import numpy as np

from ..assembly import grid_field
from ..grid import COMPUTATIONAL


def norms_from_errors(err, h):
    """(sqrt(sum h^2 e^2), max |e|) of a flat error vector."""
    err = np.asarray(err, dtype=float)
    if err.size == 0:
        return 0.0, 0.0
    return float(h * np.sqrt(np.sum(err * err))), float(np.max(np.abs(err)))


def error_field(sys, u, exact, t=0.0, include_boundary=True):
    """Pointwise error on the grid; NaN where no value is compared."""
    F = grid_field(sys, u, t)
    if not include_boundary:
        F[sys.ctx.cls.tag != COMPUTATIONAL] = np.nan
    X, Y = sys.ctx.grid.mesh()
    return F - exact(X, Y, t)


def error_norms(sys, u, exact, t=0.0, include_boundary=True):
    """Norms over computational points plus reconstructed boundary points.

    Boundary points that no stencil touches have no reconstructed value and
    are left out.
    """
    e = error_field(sys, u, exact, t, include_boundary)
    return norms_from_errors(e[~np.isnan(e)], sys.h)


def _derivative(F, comp, h, axis):
    """d/dx_axis of the grid field F at computational points."""
    Fm = np.moveaxis(F, axis, 0)
    Cm = np.moveaxis(comp, axis, 0)
    n = Fm.shape[0]
    D = np.full(Fm.shape, np.nan)

    def sh(A, k, fill):
        out = np.full(A.shape, fill, dtype=A.dtype)
        if k > 0:
            out[: n - k] = A[k:]
        elif k < 0:
            out[-k:] = A[: n + k]
        else:
            out[:] = A
        return out

    Fp1, Fm1, Fp2, Fm2 = sh(Fm, 1, np.nan), sh(Fm, -1, np.nan), sh(Fm, 2, np.nan), sh(Fm, -2, np.nan)
    Cp1, Cm1, Cp2, Cm2 = sh(Cm, 1, False), sh(Cm, -1, False), sh(Cm, 2, False), sh(Cm, -2, False)

    central = Cm & Cp1 & Cm1
    D[central] = (Fp1 - Fm1)[central] / (2 * h)
    fwd = Cm & ~central & Cp1 & Cp2
    D[fwd] = (-3 * Fm + 4 * Fp1 - Fp2)[fwd] / (2 * h)
    bwd = Cm & ~central & ~fwd & Cm1 & Cm2
    D[bwd] = (3 * Fm - 4 * Fm1 + Fm2)[bwd] / (2 * h)
    # short segments: central difference through reconstructed boundary values
    rest = Cm & ~central & ~fwd & ~bwd
    D[rest] = (Fp1 - Fm1)[rest] / (2 * h)
    return np.moveaxis(D, 0, axis)


def numerical_gradient(sys, u, t=0.0):
    """(du/dx, du/dy) on the grid, defined at computational points only."""
    F = grid_field(sys, u, t)
    comp = sys.ctx.cls.tag == COMPUTATIONAL
    return _derivative(F, comp, sys.h, 0), _derivative(F, comp, sys.h, 1)


def gradient_error(sys, u, exact_grad, t=0.0):
    """Norms of |grad u_h - grad u| over computational points where both components exist."""
    gx, gy = numerical_gradient(sys, u, t)
    X, Y = sys.ctx.grid.mesh()
    ex, ey = exact_grad(X, Y, t)
    e = np.hypot(gx - ex, gy - ey)
    return norms_from_errors(e[~np.isnan(e)], sys.h)


def convergence_rates(errors):
    """log2(E_k / E_{k+1}) between consecutive sweep levels; first entry NaN.

    Assumes each level halves h, as in the standard sweeps.
    """
    errors = np.asarray(errors, dtype=float)
    rates = np.full(errors.shape, np.nan)
    if errors.size > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            rates[1:] = np.log2(errors[:-1] / errors[1:])
    return rates


def observed_rates(hs, errors):
    """log(E_k / E_{k+1}) / log(h_k / h_{k+1}); reduces to log2 ratios when h halves."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    rates = np.full(errors.shape, np.nan)
    if errors.size > 1:
        with np.errstate(divide="ignore", invalid="ignore"):
            rates[1:] = np.log(errors[:-1] / errors[1:]) / np.log(hs[:-1] / hs[1:])
    return rates
