"""Boundary-point elimination weights: line-by-line Lagrange and cubic RBF.

Both methods express a boundary-point value as ``w_c * u_c + g_d`` where
``u_c`` is the single adjacent computational unknown, so folding the result
into the stencil only touches the diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError

EPS_DISTINCT = 0.025
RBF_COND_MAX = 1e12


class DegenerateStencil(RuntimeError):
    pass


@dataclass(frozen=True)
class BoundaryCorrection:
    """u_BP = w_c * u_C + g_d, with g_d a fixed combination of boundary data."""

    boundary_point: tuple[int, int]
    computational: int
    w_c: float
    g_d: float
    method: str
    direction: str


def line_weights(xi_gamma, xi_bp, xi_1):
    """Lagrange weights (g_gamma, g_1) of the two-point interpolant evaluated at ``xi_bp``.

    Requires ``xi_gamma <= xi_bp < xi_1`` (or the mirrored ordering).
    """
    xi_gamma = np.asarray(xi_gamma, dtype=float)
    xi_bp = np.asarray(xi_bp, dtype=float)
    xi_1 = np.asarray(xi_1, dtype=float)
    forward = (xi_gamma <= xi_bp) & (xi_bp < xi_1)
    backward = (xi_gamma >= xi_bp) & (xi_bp > xi_1)
    if not np.all(forward | backward):
        raise ValueError("line_weights requires xi_gamma <= xi_bp < xi_1")
    g_gamma = (xi_bp - xi_1) / (xi_gamma - xi_1)
    g_1 = (xi_bp - xi_gamma) / (xi_1 - xi_gamma)
    return g_gamma, g_1


def _phi(r):
    return r**3


def rbf_weights(x_ij, x_bp, x_g1, x_g2):
    """Weights (w_ij, w_g1, w_g2) of the r^3 + linear interpolant at ``x_bp``.

    Accepts single points of shape (2,) or batches of shape (M, 2). The system
    is solved in coordinates centred at ``x_bp`` and scaled by the stencil size;
    the interpolant is invariant under that map, so the weights are unchanged.
    """
    x_ij, x_bp, x_g1, x_g2 = (np.asarray(p, dtype=float) for p in (x_ij, x_bp, x_g1, x_g2))
    single = x_ij.ndim == 1
    if single:
        x_ij, x_bp, x_g1, x_g2 = (p[None, :] for p in (x_ij, x_bp, x_g1, x_g2))
    nodes = np.stack([x_ij, x_g1, x_g2], axis=1) - x_bp[:, None, :]  # (M, 3, 2)
    diff = nodes[:, :, None, :] - nodes[:, None, :, :]
    dist = np.linalg.norm(diff, axis=-1)
    iu = np.triu_indices(3, 1)
    min_sep = dist[:, iu[0], iu[1]].min(axis=1)
    if np.any(min_sep == 0):
        raise DegenerateStencil("RBF nodes are not pairwise distinct")
    scale = dist.max(axis=(1, 2))
    nodes = nodes / scale[:, None, None]
    dist = dist / scale[:, None, None]

    m = nodes.shape[0]
    B = np.zeros((m, 6, 6))
    B[:, :3, :3] = _phi(dist)
    B[:, 3, :3] = 1.0
    B[:, 4, :3] = nodes[:, :, 0]
    B[:, 5, :3] = nodes[:, :, 1]
    B[:, :3, 3:] = np.transpose(B[:, 3:, :3], (0, 2, 1))
    rhs = np.zeros((m, 6))
    rhs[:, :3] = _phi(np.linalg.norm(nodes, axis=-1))
    rhs[:, 3] = 1.0  # p_BP = (1, 0, 0) at the local origin

    cond = np.linalg.cond(B)
    bad = ~np.isfinite(cond) | (cond > RBF_COND_MAX)
    if np.any(bad):
        raise DegenerateStencil(f"singular RBF system for {int(bad.sum())} stencil(s)")
    # B is symmetric, so (phi_BP, p_BP)^T B^{-1} = (B^{-1} (phi_BP, p_BP))^T
    w = np.linalg.solve(B, rhs[..., None])[..., 0][:, :3]
    # at a node the interpolant returns the nodal value; skip solve round-off
    at_node = np.linalg.norm(nodes, axis=-1) == 0
    hit = at_node.any(axis=1)
    w[hit] = at_node[hit].astype(float)
    return w[0] if single else w


def _closest(geom, pts):
    cx, cy = geom.closest_point(pts[:, 0], pts[:, 1])
    return np.column_stack([np.ravel(cx), np.ravel(cy)])


def select_rbf_points(geom, x_ij, x_bp, h, eps=EPS_DISTINCT):
    """Pick the two boundary nodes of the RBF stencil.

    Returns ``(x_g1, x_g2, rotated)`` where ``rotated`` marks stencils whose
    second node came from the pi/4 rotated ray because the two closest points
    were within ``eps * h`` of each other.
    """
    x_ij = np.atleast_2d(np.asarray(x_ij, dtype=float))
    x_bp = np.atleast_2d(np.asarray(x_bp, dtype=float))
    g1 = _closest(geom, x_bp)
    g2 = _closest(geom, x_ij)
    rotated = np.linalg.norm(g1 - g2, axis=1) <= eps * h
    for k in np.flatnonzero(rotated):
        g2[k] = rotate_for_second_point(geom, x_bp[k], g1[k], h)
    return g1, g2, rotated


def rotate_for_second_point(geom, x_bp, x_g1, h):
    """Rotate the ray x_bp -> x_g1 by +pi/4 (then -pi/4) and intersect with Gamma."""
    errors = []
    for angle in (np.pi / 4, -np.pi / 4):
        try:
            return geom.rotated_ray_intersection(x_bp, x_g1, 0.25 * h, angle=angle)
        except GeometryError as exc:
            errors.append(str(exc))
    raise GeometryError(f"rotated rays miss the boundary near {tuple(x_bp)}: {errors}")
