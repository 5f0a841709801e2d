import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from embound.geometry import Circle, glass
from embound.interpolation import (
    DegenerateStencil,
    line_weights,
    rbf_weights,
    select_rbf_points,
)

coord = st.floats(-2.0, 2.0, allow_nan=False)


def test_line_weights_collocation():
    gg, g1 = line_weights(0.0, 0.0, 1.0)
    assert (gg, g1) == (1.0, 0.0)


def test_line_weights_symmetric():
    h = 0.1
    gg, g1 = line_weights(-h, 0.0, h)
    assert gg == pytest.approx(0.5) and g1 == pytest.approx(0.5)


def test_line_weights_lagrange():
    h = 0.02
    gg, g1 = line_weights(-0.3 * h, 0.0, h)
    assert gg == pytest.approx(10 / 13) and g1 == pytest.approx(3 / 13)


def test_line_weights_ordering_violated():
    with pytest.raises(ValueError):
        line_weights(0.5, 0.0, 1.0)


@given(st.floats(0.0, 1.0), st.floats(1e-3, 1.0), st.booleans())
def test_line_weights_partition_of_unity(frac, h, backward):
    s = -1.0 if backward else 1.0
    gg, g1 = line_weights(-s * frac * h, 0.0, s * h)
    assert gg + g1 == pytest.approx(1.0, abs=1e-14)
    assert 0.0 <= g1 <= 0.5 + 1e-15 and 0.5 - 1e-15 <= gg <= 1.0


def test_rbf_at_nodes():
    a, b, c = np.array([0.0, 0.0]), np.array([0.3, 0.1]), np.array([0.1, 0.4])
    assert np.allclose(rbf_weights(a, a, b, c), [1, 0, 0], atol=1e-12)
    assert np.allclose(rbf_weights(a, b, b, c), [0, 1, 0], atol=1e-12)


def _dense_rbf(xi, xb, x1, x2):
    """Unscaled 6x6 solve, straight from the interpolation conditions."""
    nodes = np.array([xi, x1, x2])
    r = np.linalg.norm(nodes[:, None] - nodes[None], axis=-1)
    B = np.zeros((6, 6))
    B[:3, :3] = r**3
    B[:3, 3] = 1
    B[:3, 4:] = nodes
    B[3:, :3] = B[:3, 3:].T
    rhs = np.r_[np.linalg.norm(nodes - xb, axis=1) ** 3, 1.0, xb]
    return np.linalg.solve(B, rhs)[:3]


@given(coord, coord, coord, coord, coord, coord, coord, coord)
def test_rbf_reproduces_linear_fields(x0, y0, x1, y1, x2, y2, xb, yb):
    nodes = np.array([[x0, y0], [x1, y1], [x2, y2]])
    e1, e2 = nodes[1] - nodes[0], nodes[2] - nodes[0]
    area = abs(e1[0] * e2[1] - e1[1] * e2[0])
    span = np.max(np.ptp(nodes, axis=0))
    if area < 1e-2 * max(span, 1e-3) ** 2:
        return
    xb_ = np.array([xb, yb])
    w = rbf_weights(nodes[0], xb_, nodes[1], nodes[2])
    u = 1 + 2 * nodes[:, 0] + 3 * nodes[:, 1]
    assert w @ u == pytest.approx(1 + 2 * xb + 3 * yb, abs=1e-10 * (1 + abs(xb) + abs(yb)))
    assert np.allclose(w, _dense_rbf(nodes[0], xb_, nodes[1], nodes[2]), atol=1e-8)


def test_rbf_batch_matches_single():
    rng = np.random.default_rng(0)
    p = rng.standard_normal((5, 4, 2))
    batch = rbf_weights(p[:, 0], p[:, 1], p[:, 2], p[:, 3])
    for k in range(5):
        assert np.allclose(batch[k], rbf_weights(p[k, 0], p[k, 1], p[k, 2], p[k, 3]))


def test_rbf_coincident_nodes():
    a = np.array([0.0, 0.0])
    with pytest.raises(DegenerateStencil):
        rbf_weights(a, np.array([0.1, 0.1]), a, np.array([1.0, 0.0]))


def test_rbf_collinear_nodes():
    with pytest.raises(DegenerateStencil):
        rbf_weights(np.array([0.0, 0.0]), np.array([0.5, 0.5]), np.array([1.0, 0.0]),
                    np.array([2.0, 0.0]))


def test_select_points_distinct_glass():
    g = glass()
    h = 0.02
    x_bp = np.array([[0.25 + 0.25 * math.cos(2.0), 0.5 + 0.25 * math.sin(2.0)]])
    x_ij = x_bp + np.array([[h, 0.0]])
    g1, g2, rot = select_rbf_points(g, x_ij, x_bp, h)
    c1 = g.closest_point(x_bp[:, 0], x_bp[:, 1])
    c2 = g.closest_point(x_ij[:, 0], x_ij[:, 1])
    assert not rot[0]
    assert np.allclose(g1[0], np.ravel(c1)) and np.allclose(g2[0], np.ravel(c2))


def test_select_points_rotation_branch():
    circ = Circle()
    h = 0.1
    g1, g2, rot = select_rbf_points(circ, np.array([[0.0, 0.5]]), np.array([[0.0, 0.9]]), h)
    assert rot[0]
    assert np.allclose(g1[0], [0.0, 1.0])
    assert circ.psi(*g2[0]) == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.norm(g2[0] - g1[0]) > 0.025 * h
