"""A-priori positive-definiteness certificate for constant-conductivity operators.

Along each grid line the second difference splits into tridiagonal blocks
``D(a, b)`` (interior diagonal 2, off-diagonals -1, modified end values a, b).
If every block in both directions passes the one-dimensional test the whole
operator is SPD, since it is the sum of the two block-diagonal parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import extract_segments


@dataclass(frozen=True)
class SegmentCheck:
    n: int
    a: float
    b: float
    certified: bool
    condition: str
    direction: str = ""
    line: int = -1
    start: int = -1
    margin: float = float("nan")


_EPS = np.finfo(float).eps


def _positive(value, scale):
    """value > 0 beyond its floating-point evaluation error (about 8 eps * scale)."""
    return value > 8 * _EPS * scale


def check_segment(n: int, a: float, b: float) -> SegmentCheck:
    """Sufficient conditions for D^(n)(a, b) to be positive definite.

    Each inequality is evaluated as a margin (a leading minor in closed form)
    that must exceed its own round-off bound, so a segment that only passes by
    round-off is reported not certified. ``margin`` is the smallest margin.
    """
    if n < 1:
        raise ValueError("segment length must be positive")
    a, b = float(a), float(b)
    if n == 1:
        return SegmentCheck(n, a, a, a > 0, "n=1: a>0", margin=a)
    if n == 2:
        m = a * b - 1.0
        ok = a > 0 and _positive(m, abs(a * b) + 1.0)
        return SegmentCheck(n, a, b, bool(ok), "n=2: a>0, ab>1", margin=min(a, m))
    if a > 1 and b > 1:
        return SegmentCheck(n, a, b, True, "a>1, b>1", margin=min(a, b) - 1.0)
    # Q_{n-1}(x) = (n-1) x - (n-2);  det = (n-1) ab - (n-2)(a+b) + (n-3)
    qa, qb = (n - 1) * a - (n - 2), (n - 1) * b - (n - 2)
    det = (n - 1) * a * b - (n - 2) * (a + b) + (n - 3)
    scale_q = lambda x: (n - 1) * abs(x) + (n - 2)
    scale_d = (n - 1) * abs(a * b) + (n - 2) * (abs(a) + abs(b)) + (n - 3)
    ok = _positive(qa, scale_q(a)) and _positive(qb, scale_q(b)) and _positive(det, scale_d)
    return SegmentCheck(n, a, b, bool(ok), "n>=3: general", margin=min(qa, qb, det))


def minor_oracle(n: int, a: float, b: float) -> list[float]:
    """Leading principal minors of D^(n)(a, b) by the three-term recurrence."""
    if n < 1:
        raise ValueError("n must be positive")
    if n > 2000:
        raise ValueError("minor oracle is limited to n <= 2000")
    if n == 1:
        return [float(a)]
    diag = np.full(n, 2.0)
    diag[0] = a
    diag[-1] = b
    minors = []
    prev2, prev = 1.0, float(diag[0])
    minors.append(prev)
    for k in range(1, n):
        cur = diag[k] * prev - prev2
        minors.append(cur)
        prev2, prev = prev, cur
    return minors


def leading_minors_q(k: int, a: float) -> float:
    """Q_k(a): k-th leading minor of the tridiagonal matrix with first entry a, rest 2."""
    if k < 1:
        return 1.0
    prev2, prev = 1.0, float(a)
    for _ in range(1, k):
        prev2, prev = prev, 2.0 * prev - prev2
    return prev


def full_minor_p(n: int, a: float, b: float) -> float:
    return minor_oracle(n, a, b)[-1]


@dataclass
class OperatorCheck:
    status: str  # certified | not-certified | skipped
    segments_x: int = 0
    segments_y: int = 0
    failing: list = field(default_factory=list)
    diag_dominant: bool | None = None
    worst_row: int | None = None
    worst_margin: float | None = None

    @property
    def certified(self):
        return self.status == "certified"

    def report(self) -> str:
        lines = [
            f"status: {self.status}",
            f"segments_x: {self.segments_x}",
            f"segments_y: {self.segments_y}",
            f"failing_segments: {len(self.failing)}",
        ]
        for s in self.failing[:20]:
            lines.append(
                f"  {s.direction} line={s.line} start={s.start} n={s.n} a={s.a:.6g} b={s.b:.6g}"
                f" margin={s.margin:.3g}"
            )
        lines.append(f"diag_dominant: {self.diag_dominant}")
        if self.worst_row is not None:
            lines.append(f"worst_row: {self.worst_row} margin={self.worst_margin:.6g}")
        return "\n".join(lines)


def segment_checks(sys, direction: str) -> list[SegmentCheck]:
    cls = sys.ctx.cls
    beta = sys.beta_constant
    part = sys.xdiag if direction == "x" else sys.ydiag
    idx = cls.index
    out = []
    for seg in extract_segments(cls, direction):
        if direction == "x":
            k_first = idx[seg.start, seg.line]
            k_last = idx[seg.start + seg.n - 1, seg.line]
        else:
            k_first = idx[seg.line, seg.start]
            k_last = idx[seg.line, seg.start + seg.n - 1]
        a = part[k_first] / beta
        b = part[k_last] / beta
        c = check_segment(seg.n, a, b)
        out.append(
            SegmentCheck(c.n, c.a, c.b, c.certified, c.condition, direction, seg.line, seg.start,
                         c.margin)
        )
    return out


def diag_dominance(sys_or_matrix):
    """(dominant, worst_row, margin) with margin = A_kk - sum_{m != k} |A_km|."""
    A = getattr(sys_or_matrix, "A", sys_or_matrix).tocsr()
    d = A.diagonal()
    offsum = np.asarray(abs(A).sum(axis=1)).ravel() - np.abs(d)
    margin = d - offsum
    worst = int(np.argmin(margin))
    # round-off slack only; the certificate itself uses exact comparisons
    ok = bool(np.all(d > 0) and np.all(margin >= -1e-12 * np.abs(d)))
    return ok, worst, float(margin[worst])


def check_operator(sys) -> OperatorCheck:
    dom, worst, margin = diag_dominance(sys)
    if sys.beta_constant is None:
        return OperatorCheck("skipped", diag_dominant=dom, worst_row=worst, worst_margin=margin)
    if sys.beta_constant <= 0:
        return OperatorCheck("not-certified", diag_dominant=dom, worst_row=worst, worst_margin=margin)
    sx = segment_checks(sys, "x")
    sy = segment_checks(sys, "y")
    failing = [s for s in sx + sy if not s.certified]
    return OperatorCheck(
        "certified" if not failing else "not-certified",
        segments_x=len(sx),
        segments_y=len(sy),
        failing=failing,
        diag_dominant=dom,
        worst_row=worst,
        worst_margin=margin,
    )
