"""Classical (Ruge-Stueben) AMG used as a symmetric CG preconditioner.

The C/F splitting and interpolation come from pyamg; the cycle itself
(one symmetric Gauss-Seidel sweep, forward then backward, before and after
the coarse correction, so the V and W cycles are symmetric operators) and
the dense coarse solve live here.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import pyamg
import scipy.linalg as sla
import scipy.sparse as sp
from pyamg.relaxation.relaxation import gauss_seidel

log = logging.getLogger(__name__)


@dataclass
class AmgParams:
    theta: float = 0.25
    max_levels: int = 25
    max_coarse: int = 50
    interpolation: str = "classical"


@dataclass
class AmgHierarchy:
    A: list
    P: list
    R: list
    cycle: str
    params: AmgParams
    coarse: tuple = field(repr=False, default=None)

    @property
    def n_levels(self):
        return len(self.A)

    @property
    def sizes(self):
        return [M.shape[0] for M in self.A]

    def apply(self, r):
        return amg_apply(self, r)

    def galerkin_error(self):
        """max over levels of ||R A P - A_coarse||_max / ||A||_max."""
        worst = 0.0
        for lvl in range(self.n_levels - 1):
            diff = self.R[lvl] @ self.A[lvl] @ self.P[lvl] - self.A[lvl + 1]
            scale = abs(self.A[lvl]).max()
            if diff.nnz:
                worst = max(worst, abs(diff).max() / scale)
        return worst


def amg_setup(A, cycle="V", params: AmgParams | None = None) -> AmgHierarchy:
    if cycle not in ("V", "W"):
        raise ValueError("cycle must be 'V' or 'W'")
    params = params or AmgParams()
    A = sp.csr_matrix(A)
    if np.any(A.diagonal() <= 0):
        raise ValueError("AMG setup needs a positive diagonal")
    As, Ps, Rs = [A], [], []
    if A.shape[0] > params.max_coarse:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            ml = pyamg.ruge_stuben_solver(
                A,
                strength=("classical", {"theta": params.theta}),
                CF="RS",
                interpolation=params.interpolation,
                presmoother=None,
                postsmoother=None,
                max_levels=params.max_levels,
                max_coarse=params.max_coarse,
                keep=False,
            )
        for lvl in range(len(ml.levels) - 1):
            fine, coarse = ml.levels[lvl], ml.levels[lvl + 1]
            if coarse.A.shape[0] >= fine.A.shape[0]:
                log.warning("AMG coarsening stagnated at level %d; truncating", lvl)
                break
            Ps.append(sp.csr_matrix(fine.P))
            Rs.append(sp.csr_matrix(fine.R))
            As.append(sp.csr_matrix(coarse.A))
    coarse = sla.lu_factor(As[-1].toarray())
    return AmgHierarchy(As, Ps, Rs, cycle, params, coarse)


def _cycle(hier: AmgHierarchy, lvl: int, b):
    if lvl == hier.n_levels - 1:
        return sla.lu_solve(hier.coarse, b)
    A = hier.A[lvl]
    x = np.zeros_like(b)
    gauss_seidel(A, x, b, iterations=1, sweep="symmetric")
    rc = hier.R[lvl] @ (b - A @ x)
    visits = 2 if hier.cycle == "W" and lvl + 1 < hier.n_levels - 1 else 1
    ec = _cycle(hier, lvl + 1, rc)
    for _ in range(visits - 1):
        ec += _cycle(hier, lvl + 1, rc - hier.A[lvl + 1] @ ec)
    x += hier.P[lvl] @ ec
    gauss_seidel(A, x, b, iterations=1, sweep="symmetric")
    return x


def amg_apply(hier: AmgHierarchy, r):
    """One V or W cycle with zero initial guess."""
    return _cycle(hier, 0, np.asarray(r, dtype=float))
