import numpy as np
import pytest

from embound.geometry import Circle, glass
from embound.grid import (
    BOUNDARY,
    COMPUTATIONAL,
    Grid,
    GridError,
    build_context,
    build_mask,
    classify,
    extract_segments,
)


def test_mask_small_disk():
    g = Grid.from_box(-1, 1, -1, 1, 4)
    m = build_mask(g, Circle(radius=0.5))
    assert m.sum() == 1 and m[2, 2] == 1


def test_mask_outside_box_is_empty():
    g = Grid.from_box(-1, 1, -1, 1, 10)
    assert build_mask(g, Circle(cx=5, cy=5, radius=0.5)).sum() == 0


def test_mask_psi_zero_is_outside():
    g = Grid.from_box(-1, 1, -1, 1, 4)
    m = build_mask(g, Circle(radius=0.5))
    # (0.5, 0) lies on the circle
    assert m[3, 2] == 0


def test_glass_area_against_supersampling():
    g = Grid.from_box(0, 1, 0, 1, 50)
    count = build_mask(g, glass()).sum()
    fine = Grid.from_box(0, 1, 0, 1, 500)
    area = build_mask(fine, glass()).sum() * fine.h**2
    assert count * g.h**2 == pytest.approx(area, rel=0.05)


def test_classify_single_point():
    g = Grid(0.0, 0.0, 1.0, 5, 5)
    m = np.zeros((5, 5), dtype=np.int8)
    m[2, 2] = 1
    c = classify(g, m)
    assert c.tag[2, 2] == BOUNDARY and c.n_comp == 0


def test_classify_block():
    g = Grid(0.0, 0.0, 1.0, 5, 5)
    m = np.zeros((5, 5), dtype=np.int8)
    m[1:4, 1:4] = 1
    c = classify(g, m)
    assert c.n_comp == 1 and c.tag[2, 2] == COMPUTATIONAL
    assert c.counts()["boundary"] == 8


def test_classify_touching_edge():
    g = Grid(0.0, 0.0, 1.0, 5, 5)
    m = np.zeros((5, 5), dtype=np.int8)
    m[0, 2] = 1
    with pytest.raises(GridError):
        classify(g, m)


def test_disk_computational_neighbours():
    g = Grid.from_box(-1.2, 1.2, -1.2, 1.2, 100)
    c = build_context(g, Circle()).cls
    i, j = c.ij.T
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        assert np.all(c.mask[i + di, j + dj] == 1)


def test_index_orderings_are_permutations():
    g = Grid.from_box(-1.2, 1.2, -1.2, 1.2, 30)
    c = build_context(g, Circle()).cls
    assert sorted(c.perm) == list(range(c.n_comp))
    # lexicographic: x fastest
    assert np.all(np.diff(c.ij[:, 1]) >= 0)


def test_segments_from_runs():
    g = Grid(0.0, 0.0, 1.0, 14, 5)
    m = np.zeros((14, 5), dtype=np.int8)
    m[1:13, 1:4] = 1
    c = classify(g, m)
    c.tag[5, 2] = BOUNDARY
    c.tag[9, 2] = BOUNDARY
    c.tag[12, 2] = BOUNDARY  # already boundary
    segs = [s for s in extract_segments(c, "x") if s.line == 2]
    assert [s.n for s in segs] == [3, 3, 2]


def test_segment_full_row():
    g = Grid(0.0, 0.0, 1.0, 8, 5)
    m = np.zeros((8, 5), dtype=np.int8)
    m[1:7, 1:4] = 1
    c = classify(g, m)
    segs = extract_segments(c, "x")
    assert len(segs) == 1 and segs[0].n == 4


def test_segments_cover_same_points():
    g = Grid.from_box(-1.2, 1.2, -1.2, 1.2, 20)
    c = build_context(g, Circle()).cls

    def cover(direction):
        pts = set()
        for s in extract_segments(c, direction):
            for k in range(s.n):
                pts.add((s.start + k, s.line) if direction == "x" else (s.line, s.start + k))
        return pts

    assert cover("x") == cover("y")
    assert len(cover("x")) == c.n_comp


def test_grid_rounds_y_count_up():
    g = Grid.from_box(-2, 2, -1, 3.01, 40)
    assert g.y_lo + g.h * (g.ny - 1) >= 3.01
