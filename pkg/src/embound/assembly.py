"""Assembly of the symmetric embedded-boundary operator over computational points.

The stored matrix is ``A = -h^2 L`` where ``L`` is the five-point
discretization of ``div(beta grad .)`` with the boundary points eliminated.
Boundary points enter only through the diagonal of ``A`` and a right-hand
side vector of boundary data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .geometry import GeometryError, bracketed_root
from .grid import BOUNDARY, COMPUTATIONAL, GridContext, build_context, Grid
from .interpolation import (
    EPS_DISTINCT,
    BoundaryCorrection,
    DegenerateStencil,
    line_weights,
    rbf_weights,
    rotate_for_second_point,
    select_rbf_points,
)
from .problem import ProblemSpec

log = logging.getLogger(__name__)

STRATEGIES = ("mixed", "rbf")
LINE, RBF = 0, 1
# (di, dj, axis) for the W, E, S, N neighbours
SIDES = ((-1, 0, "x"), (1, 0, "x"), (0, -1, "y"), (0, 1, "y"))
SIDE_NAMES = ("W", "E", "S", "N")


class AssemblyError(RuntimeError):
    pass


def face_coefficient(beta, i, j, face, grid: Grid):
    """beta at the midpoint of face ``face`` of grid point (i, j)."""
    di, dj = {"E": (1, 0), "W": (-1, 0), "N": (0, 1), "S": (0, -1)}[face]
    x = grid.x_lo + (i + 0.5 * di) * grid.h
    y = grid.y_lo + (j + 0.5 * dj) * grid.h
    if callable(beta):
        return float(beta(x, y))
    return float(beta)


@dataclass
class CorrectionSet:
    """Struct-of-arrays record of every boundary correction applied to ``A``."""

    k: np.ndarray
    bp: np.ndarray  # (M, 2) grid indices of the boundary point
    side: np.ndarray
    method: np.ndarray
    w_c: np.ndarray
    beta_face: np.ndarray
    node_x: np.ndarray  # (M, 2) boundary nodes carrying data
    node_y: np.ndarray
    node_w: np.ndarray
    rotated: np.ndarray

    def __len__(self):
        return int(self.k.size)

    def g_d(self, dirichlet, t=0.0):
        vals = dirichlet(self.node_x, self.node_y, t)
        return np.sum(self.node_w * vals, axis=1)

    def records(self, dirichlet, t=0.0):
        g = self.g_d(dirichlet, t)
        return [
            BoundaryCorrection(
                boundary_point=(int(self.bp[m, 0]), int(self.bp[m, 1])),
                computational=int(self.k[m]),
                w_c=float(self.w_c[m]),
                g_d=float(g[m]),
                method="line" if self.method[m] == LINE else "rbf",
                direction=SIDE_NAMES[self.side[m]],
            )
            for m in range(len(self))
        ]

    def to_csv(self, path, dirichlet, t=0.0):
        g = self.g_d(dirichlet, t)
        with open(path, "w") as fh:
            fh.write("k,bp_i,bp_j,side,method,w_c,g_d\n")
            for m in range(len(self)):
                fh.write(
                    f"{self.k[m]},{self.bp[m, 0]},{self.bp[m, 1]},{SIDE_NAMES[self.side[m]]},"
                    f"{'line' if self.method[m] == LINE else 'rbf'},{self.w_c[m]:.17g},{g[m]:.17g}\n"
                )


@dataclass
class OperatorSystem:
    problem: ProblemSpec
    ctx: GridContext
    strategy: str
    A: sp.csr_matrix
    corrections: CorrectionSet
    # diagonal contributions of the x- and y-direction second differences
    xdiag: np.ndarray
    ydiag: np.ndarray
    # constant beta folded into the source (poisson/helmholtz), else 1
    source_scale: float = 1.0
    beta_constant: float | None = None
    info: dict = field(default_factory=dict)

    @property
    def h(self):
        return self.ctx.grid.h

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def points(self):
        g = self.ctx.grid
        ij = self.ctx.cls.ij
        return g.x_lo + g.h * ij[:, 0], g.y_lo + g.h * ij[:, 1]

    def boundary_vector(self, t=0.0):
        """h^2 times the boundary-data part of L, per unknown."""
        g = self.corrections.g_d(self.problem.dirichlet, t)
        return np.bincount(self.corrections.k, self.corrections.beta_face * g, minlength=self.n)

    def source_vector(self, t=0.0):
        x, y = self.points
        return self.source_scale * np.asarray(self.problem.source(x, y, t), dtype=float)

    def rhs(self, t=0.0):
        """Right-hand side of ``A u = -h^2 f + bc`` for the steady problem at time ``t``."""
        return -self.h**2 * self.source_vector(t) + self.boundary_vector(t)

    def apply_laplacian(self, u, t=0.0):
        """Action of the (unscaled) discrete operator L including boundary data."""
        return (-(self.A @ u) + self.boundary_vector(t)) / self.h**2

    def mixed_rows(self):
        return np.unique(self.corrections.k[self.corrections.method == RBF])


def refresh_rhs(sys: OperatorSystem, problem: ProblemSpec | None = None, t=0.0):
    if problem is not None and problem is not sys.problem:
        sys = OperatorSystem(**{**sys.__dict__, "problem": problem})
    return sys.rhs(t)


def _line_distance(problem, ctx, bp, out, side_axis):
    """Distance from each boundary point to the crossing toward ``out``."""
    geom = problem.geometry
    g = ctx.grid
    h = g.h
    x_bp = g.x_lo + h * bp[:, 0]
    y_bp = g.y_lo + h * bp[:, 1]
    if geom.uses_distance_approx:
        psi_in = ctx.psi[bp[:, 0], bp[:, 1]]
        inside_grid = (out[:, 0] >= 0) & (out[:, 0] < g.nx) & (out[:, 1] >= 0) & (out[:, 1] < g.ny)
        psi_out = np.empty_like(psi_in)
        psi_out[inside_grid] = ctx.psi[out[inside_grid, 0], out[inside_grid, 1]]
        if (~inside_grid).any():
            psi_out[~inside_grid] = geom.psi(
                g.x_lo + h * out[~inside_grid, 0], g.y_lo + h * out[~inside_grid, 1]
            )
        return -psi_in / (psi_out - psi_in) * h
    # bracket ends and their psi values taken from the same samples as the mask
    on = (out[:, 0] >= 0) & (out[:, 0] < g.nx) & (out[:, 1] >= 0) & (out[:, 1] < g.ny)
    x_out = g.x_lo + h * out[:, 0]
    y_out = g.y_lo + h * out[:, 1]
    f_bp = ctx.psi[bp[:, 0], bp[:, 1]]
    f_out = np.empty_like(f_bp)
    f_out[on] = ctx.psi[out[on, 0], out[on, 1]]
    if (~on).any():
        f_out[~on] = geom.psi(x_out[~on], y_out[~on])
    if side_axis == "x":
        f = lambda s: geom.psi(s, y_bp)
        xi = bracketed_root(f, x_out, x_bp, f_out, f_bp)
        return np.abs(xi - x_bp)
    f = lambda s: geom.psi(x_bp, s)
    xi = bracketed_root(f, y_out, y_bp, f_out, f_bp)
    return np.abs(xi - y_bp)


def assemble(problem: ProblemSpec, ctx: GridContext, strategy: str = "mixed", eps=EPS_DISTINCT):
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    g = ctx.grid
    cls = ctx.cls
    h = g.h
    n = cls.n_comp
    if n == 0:
        raise AssemblyError("no computational points")
    ij = cls.ij
    xs = g.x_lo + h * ij[:, 0]
    ys = g.y_lo + h * ij[:, 1]

    beta_c = problem.beta_constant
    normalize = beta_c is not None and problem.equation in ("poisson", "helmholtz")
    if normalize:
        if beta_c == 0:
            raise AssemblyError("beta must be nonzero")
        face_x = face_y = None
        source_scale = 1.0 / beta_c
    else:
        # one evaluation per face keeps A exactly symmetric
        face_x = problem.beta_at(g.x_lo + h * (np.arange(g.nx - 1) + 0.5)[:, None], g.y[None, :])
        face_y = problem.beta_at(g.x[:, None], g.y_lo + h * (np.arange(g.ny - 1) + 0.5)[None, :])
        face_x = np.broadcast_to(face_x, (g.nx - 1, g.ny))
        face_y = np.broadcast_to(face_y, (g.nx, g.ny - 1))
        source_scale = 1.0

    xdiag = np.zeros(n)
    ydiag = np.zeros(n)
    rows, cols, vals = [], [], []
    corr = {key: [] for key in ("k", "bp", "side", "method", "w_c", "beta", "nx", "ny", "nw", "rot")}

    for s, (di, dj, axis) in enumerate(SIDES):
        ni = ij[:, 0] + di
        nj = ij[:, 1] + dj
        if normalize:
            beta_f = np.ones(n)
        elif axis == "x":
            beta_f = face_x[np.minimum(ij[:, 0], ni), ij[:, 1]]
        else:
            beta_f = face_y[ij[:, 0], np.minimum(ij[:, 1], nj)]
        (xdiag if axis == "x" else ydiag)[:] += beta_f

        ntag = cls.tag[ni, nj]
        comp = ntag == COMPUTATIONAL
        rows.append(np.flatnonzero(comp))
        cols.append(cls.index[ni[comp], nj[comp]])
        vals.append(-beta_f[comp])

        bnd = np.flatnonzero(ntag == BOUNDARY)
        if bnd.size == 0:
            continue
        if np.any(ntag[~comp] != BOUNDARY):
            raise AssemblyError("computational point adjacent to an exterior point")
        bp = np.column_stack([ni[bnd], nj[bnd]])
        out = np.column_stack([ni[bnd] + di, nj[bnd] + dj])
        on_grid = (out[:, 0] >= 0) & (out[:, 0] < g.nx) & (out[:, 1] >= 0) & (out[:, 1] < g.ny)
        outside = ~on_grid
        outside[on_grid] = cls.mask[out[on_grid, 0], out[on_grid, 1]] == 0
        use_line = outside if strategy == "mixed" else np.zeros(bnd.size, dtype=bool)

        m = bnd.size
        w_c = np.empty(m)
        node_x = np.empty((m, 2))
        node_y = np.empty((m, 2))
        node_w = np.zeros((m, 2))
        rot = np.zeros(m, dtype=bool)
        x_bp = g.x_lo + h * bp[:, 0]
        y_bp = g.y_lo + h * bp[:, 1]

        li = np.flatnonzero(use_line)
        if li.size:
            d = _line_distance(problem, ctx, bp[li], out[li], axis)
            g_gamma, g_1 = line_weights(-d, np.zeros_like(d), np.full_like(d, h))
            w_c[li] = g_1
            node_x[li, :] = (x_bp[li] + di * d)[:, None]
            node_y[li, :] = (y_bp[li] + dj * d)[:, None]
            node_w[li, 0] = g_gamma

        ri = np.flatnonzero(~use_line)
        if ri.size:
            p_ij = np.column_stack([xs[bnd[ri]], ys[bnd[ri]]])
            p_bp = np.column_stack([x_bp[ri], y_bp[ri]])
            g1, g2, rotated = select_rbf_points(problem.geometry, p_ij, p_bp, h, eps)
            try:
                w = rbf_weights(p_ij, p_bp, g1, g2)
            except DegenerateStencil:
                w = np.empty((ri.size, 3))
                for q in range(ri.size):
                    try:
                        w[q] = rbf_weights(p_ij[q], p_bp[q], g1[q], g2[q])
                    except DegenerateStencil:
                        if np.linalg.norm(g1[q] - p_bp[q]) <= eps * h:
                            # BP sits on Gamma: u_BP is the boundary value itself
                            w[q] = (0.0, 1.0, 0.0)
                            continue
                        g2[q] = rotate_for_second_point(problem.geometry, p_bp[q], g1[q], h)
                        rotated[q] = True
                        try:
                            w[q] = rbf_weights(p_ij[q], p_bp[q], g1[q], g2[q])
                        except DegenerateStencil as exc:
                            raise DegenerateStencil(
                                f"degenerate RBF stencil at boundary point {tuple(p_bp[q])}"
                            ) from exc
            w_c[ri] = w[:, 0]
            node_x[ri] = np.column_stack([g1[:, 0], g2[:, 0]])
            node_y[ri] = np.column_stack([g1[:, 1], g2[:, 1]])
            node_w[ri] = w[:, 1:]
            rot[ri] = rotated

        k = bnd
        (xdiag if axis == "x" else ydiag)[:] -= np.bincount(k, beta_f[bnd] * w_c, minlength=n)
        corr["k"].append(k)
        corr["bp"].append(bp)
        corr["side"].append(np.full(m, s))
        corr["method"].append(np.where(use_line, LINE, RBF))
        corr["w_c"].append(w_c)
        corr["beta"].append(beta_f[bnd])
        corr["nx"].append(node_x)
        corr["ny"].append(node_y)
        corr["nw"].append(node_w)
        corr["rot"].append(rot)

    diag = xdiag + ydiag
    r = np.concatenate(rows + [np.arange(n)])
    c = np.concatenate(cols + [np.arange(n)])
    v = np.concatenate(vals + [diag])
    A = sp.coo_matrix((v, (r, c)), shape=(n, n)).tocsr()
    A.sum_duplicates()
    A.sort_indices()
    A.eliminate_zeros()

    def cat(key, shape=(0,)):
        return np.concatenate(corr[key]) if corr[key] else np.zeros(shape)

    corrections = CorrectionSet(
        k=cat("k").astype(np.int64),
        bp=cat("bp", (0, 2)).astype(np.int64),
        side=cat("side").astype(np.int64),
        method=cat("method").astype(np.int64),
        w_c=cat("w_c"),
        beta_face=cat("beta"),
        node_x=cat("nx", (0, 2)),
        node_y=cat("ny", (0, 2)),
        node_w=cat("nw", (0, 2)),
        rotated=cat("rot").astype(bool),
    )
    info = {
        "n_line": int(np.sum(corrections.method == LINE)),
        "n_rbf": int(np.sum(corrections.method == RBF)),
        "n_rotated": int(np.sum(corrections.rotated)),
    }
    return OperatorSystem(
        problem=problem,
        ctx=ctx,
        strategy=strategy,
        A=A,
        corrections=corrections,
        xdiag=xdiag,
        ydiag=ydiag,
        source_scale=source_scale,
        beta_constant=1.0 if normalize else beta_c,
        info=info,
    )


def build_system(problem: ProblemSpec, n: int, strategy="mixed"):
    """Grid, classification and assembly for ``n`` intervals across the problem box."""
    x_lo, x_hi, y_lo, y_hi = problem.box
    grid = Grid.from_box(x_lo, x_hi, y_lo, y_hi, n)
    ctx = build_context(grid, problem.geometry)
    return assemble(problem, ctx, strategy)


@dataclass
class BoundaryValues:
    ij: np.ndarray
    values: np.ndarray
    isolated: np.ndarray


def reconstruct_boundary_values(sys: OperatorSystem, u, t=0.0) -> BoundaryValues:
    """u_BP = w_c u_C + g_d per correction, averaged when several apply.

    Boundary points without any correction get the Dirichlet datum at their
    closest boundary point and are flagged ``isolated``.
    """
    cls = sys.ctx.cls
    g = sys.ctx.grid
    bij = cls.boundary_ij
    flat = np.full(cls.tag.shape, -1, dtype=np.int64)
    flat[bij[:, 0], bij[:, 1]] = np.arange(len(bij))
    corr = sys.corrections
    cand = corr.w_c * u[corr.k] + corr.g_d(sys.problem.dirichlet, t)
    slot = flat[corr.bp[:, 0], corr.bp[:, 1]]
    total = np.bincount(slot, cand, minlength=len(bij))
    count = np.bincount(slot, minlength=len(bij))
    values = np.zeros(len(bij))
    has = count > 0
    values[has] = total[has] / count[has]
    isolated = ~has
    if isolated.any():
        xb = g.x_lo + g.h * bij[isolated, 0]
        yb = g.y_lo + g.h * bij[isolated, 1]
        try:
            cx, cy = sys.problem.geometry.closest_point(xb, yb)
            values[isolated] = sys.problem.dirichlet(np.asarray(cx), np.asarray(cy), t)
        except GeometryError:
            log.warning("closest point failed for isolated boundary points; using u_D at the point")
            values[isolated] = sys.problem.dirichlet(xb, yb, t)
    return BoundaryValues(bij, values, isolated)


def grid_field(sys: OperatorSystem, u, t=0.0, include_isolated=False):
    """Solution on the full grid; NaN where no value is defined."""
    cls = sys.ctx.cls
    out = np.full(cls.tag.shape, np.nan)
    out[cls.ij[:, 0], cls.ij[:, 1]] = u
    bv = reconstruct_boundary_values(sys, u, t)
    keep = np.ones(len(bv.values), dtype=bool) if include_isolated else ~bv.isolated
    out[bv.ij[keep, 0], bv.ij[keep, 1]] = bv.values[keep]
    return out


def export_matrix(A, path):
    """Coordinate triplets, 1-based, sorted by row then column."""
    coo = sp.coo_matrix(A)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r + 1} {c + 1} {v:.17g}\n")
