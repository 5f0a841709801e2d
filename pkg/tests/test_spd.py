import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from embound.assembly import build_system
from embound.geometry import LevelSet
from embound.harness.problems import named_problem
from embound.problem import ProblemSpec
from embound.spd import (
    check_operator,
    check_segment,
    diag_dominance,
    full_minor_p,
    leading_minors_q,
    minor_oracle,
)


def _dense(n, a, b):
    D = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
    D[0, 0] = a
    D[-1, -1] = b if n > 1 else a
    return D


def test_segment_condition_cases():
    c = check_segment(2, 0.8, 1.5)
    assert c.certified and all(m > 0 for m in minor_oracle(2, 0.8, 1.5))
    assert check_segment(3, 2.0, 2.0).certified
    assert not check_segment(3, 0.6, 0.6).certified
    assert check_segment(1, 0.1, 0.1).certified


def test_certifies_segment_that_is_not_diagonally_dominant():
    # first row 0.9 vs off-diagonal 1: not dominant, yet positive definite
    c = check_segment(4, 0.9, 1.5)
    assert c.certified and c.margin > 0
    assert np.linalg.eigvalsh(_dense(4, 0.9, 1.5)).min() > 0


@pytest.mark.parametrize("n,a,b", [(4, 1.5, 0.8), (6, 0.9, 1.2), (6, 1.6, 0.85), (7, 1.25, 0.9)])
def test_singular_segments_by_roundoff_not_certified(n, a, b):
    # exactly singular in real arithmetic; float evaluation lands within round-off of zero
    c = check_segment(n, a, b)
    assert not c.certified
    assert abs(c.margin) < 1e-14


def test_minor_oracle_values():
    assert minor_oracle(3, 2, 2) == pytest.approx([2, 3, 4])
    assert minor_oracle(1, 5, 5) == [5.0]
    assert minor_oracle(3, 0.6, 0.6) == pytest.approx([0.6, 0.2, -0.48])


@given(st.integers(1, 12), st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_minor_oracle_matches_determinants(n, a, b):
    D = _dense(n, a, b)
    dets = [np.linalg.det(D[:k, :k]) for k in range(1, n + 1)]
    assert np.allclose(minor_oracle(n, a, b), dets, rtol=1e-9, atol=1e-9)


@given(st.integers(1, 10), st.floats(0.05, 3.0), st.floats(0.05, 3.0))
def test_certified_implies_positive_definite(n, a, b):
    if check_segment(n, a, b).certified:
        assert np.linalg.eigvalsh(_dense(n, a, b)).min() > 0


@given(st.integers(1, 10), st.floats(0.05, 3.0), st.floats(0.05, 3.0),
       st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_checker_is_monotone(n, a, b, da, db):
    if check_segment(n, a, b).certified:
        assert check_segment(n, a + da, b + db).certified


@given(st.integers(2, 10), st.floats(0.5, 3.0), st.floats(0.05, 3.0))
def test_recurrences(n, a, b):
    q = leading_minors_q(n - 1, a)
    assert q == pytest.approx(a * leading_minors_q(n - 2, 2 - 1 / a), rel=1e-10, abs=1e-12)
    p = full_minor_p(n, a, b)
    if n > 2:
        assert p == pytest.approx(a * full_minor_p(n - 1, 2 - 1 / a, b), rel=1e-10, abs=1e-12)


def test_bad_segment_length():
    with pytest.raises(ValueError):
        check_segment(0, 1.0, 1.0)


def test_uncut_square_certified_and_dominant():
    sq = LevelSet(func=lambda x, y: np.maximum(np.abs(x), np.abs(y)) - (0.7 + 1e-13))
    sys = build_system(ProblemSpec("sq", sq, (-1, 1, -1, 1)), 20)
    chk = check_operator(sys)
    assert chk.certified and chk.diag_dominant


def test_variable_beta_skipped():
    sys = build_system(named_problem("bone"), 40)
    assert check_operator(sys).status == "skipped"


def test_tilted_square_certified():
    sys = build_system(named_problem("tilted_square"), 137)
    chk = check_operator(sys)
    assert chk.certified and "status: certified" in chk.report()


def test_diag_dominance_on_matrix():
    import scipy.sparse as sp

    A = sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 0.5]]))
    ok, worst, margin = diag_dominance(A)
    assert not ok and worst == 1 and margin == pytest.approx(-0.5)
