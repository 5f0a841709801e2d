"""Geometry descriptions of the physical domain and the queries the discretization needs.

All geometries follow one sign convention: ``psi < 0`` strictly inside the
domain, ``psi > 0`` outside. Every query is vectorized over numpy arrays of
coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

ROOT_TOL = 1e-12
ROOT_MAXITER = 100
PROJECTION_STEPS = 50
N_GUESS = 1000


class GeometryError(RuntimeError):
    """A geometric query failed to converge or has no answer."""


class NoIntersection(GeometryError):
    """No sign change of psi in the requested bracket."""


def bracketed_root(f, lo, hi, flo=None, fhi=None, tol=ROOT_TOL, maxiter=ROOT_MAXITER):
    """Vectorized safeguarded secant (Illinois regula falsi) on ``[lo, hi]``.

    ``f`` maps an array of abscissae to psi values. Each bracket must carry a
    sign change (zero endpoints count). Falls back to bisection whenever the
    secant iterate stalls.
    """
    a = np.array(lo, dtype=float, copy=True).ravel()
    b = np.array(hi, dtype=float, copy=True).ravel()
    fa = f(a) if flo is None else np.array(flo, dtype=float, copy=True).ravel()
    fb = f(b) if fhi is None else np.array(fhi, dtype=float, copy=True).ravel()
    if np.any(np.sign(fa) * np.sign(fb) > 0):
        raise NoIntersection("no sign change in bracket")

    x = np.where(np.abs(fa) <= np.abs(fb), a, b)
    fx = np.where(np.abs(fa) <= np.abs(fb), fa, fb)
    done = np.abs(fx) <= tol
    side = np.zeros(a.shape, dtype=int)
    scale = np.maximum(np.abs(a), np.abs(b)) + 1.0
    for _ in range(maxiter):
        act = ~done
        if not act.any():
            break
        denom = fb - fa
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = b - fb * (b - a) / denom
        bad = ~np.isfinite(xs) | (xs <= np.minimum(a, b)) | (xs >= np.maximum(a, b))
        xs = np.where(bad, 0.5 * (a + b), xs)
        xs = np.where(act, xs, x)
        fs = np.where(act, f(xs), fx)
        x, fx = xs, fs
        # keep the sign change in [a, b]; Illinois halving on repeated side
        left = np.sign(fs) == np.sign(fa)
        a_new = np.where(left, xs, a)
        fa_new = np.where(left, fs, np.where(side == -1, 0.5 * fa, fa))
        b_new = np.where(left, b, xs)
        fb_new = np.where(left, np.where(side == 1, 0.5 * fb, fb), fs)
        side = np.where(left, 1, -1)
        a = np.where(act, a_new, a)
        b = np.where(act, b_new, b)
        fa = np.where(act, fa_new, fa)
        fb = np.where(act, fb_new, fb)
        done |= (np.abs(fx) <= tol) | (np.abs(b - a) <= 4e-16 * scale)
    if not done.all():
        raise GeometryError(
            f"root finder did not converge; max residual {np.max(np.abs(fx[~done])):.3e}"
        )
    return x


def approx_boundary_distance(psi_in, psi_out, h):
    """Distance from an inside sample to the crossing, from linear psi interpolation.

    Exact when psi is affine along the line.
    """
    psi_in = np.asarray(psi_in, dtype=float)
    psi_out = np.asarray(psi_out, dtype=float)
    denom = psi_in - psi_out
    if np.any(denom == 0):
        raise GeometryError("degenerate psi samples: psi_in == psi_out")
    return psi_in / denom * h


def _rotate(dx, dy, angle):
    c, s = np.cos(angle), np.sin(angle)
    return c * dx - s * dy, s * dx + c * dy


@dataclass
class Geometry:
    """Base class. Subclasses implement ``psi`` and may override the queries."""

    name: str = "geometry"
    # parametric geometries replace exact crossings by the linear-psi estimate
    uses_distance_approx: bool = field(default=False, init=False)

    def psi(self, x, y):
        raise NotImplementedError

    def grad_psi(self, x, y, step=1e-7):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        gx = (self.psi(x + step, y) - self.psi(x - step, y)) / (2 * step)
        gy = (self.psi(x, y + step) - self.psi(x, y - step)) / (2 * step)
        return gx, gy

    def closest_point(self, x, y):
        """Projection x <- x - psi grad(psi)/|grad(psi)|^2 onto the zero level."""
        px = np.array(x, dtype=float, copy=True)
        py = np.array(y, dtype=float, copy=True)
        for _ in range(PROJECTION_STEPS):
            p = self.psi(px, py)
            if np.all(np.abs(p) <= ROOT_TOL):
                return px, py
            gx, gy = self.grad_psi(px, py)
            g2 = gx * gx + gy * gy
            if np.any(g2 == 0):
                raise GeometryError("vanishing level-set gradient during projection")
            px = px - p * gx / g2
            py = py - p * gy / g2
        p = self.psi(px, py)
        if np.any(np.abs(p) > 1e3 * ROOT_TOL):
            raise GeometryError(
                f"closest-point projection did not converge; residual {np.max(np.abs(p)):.3e}"
            )
        return px, py

    def line_intersection(self, axis, fixed, lo, hi):
        """Crossing of Gamma with the grid line ``axis`` at coordinate ``fixed``."""
        fixed = np.asarray(fixed, dtype=float).ravel()
        if axis == "x":
            f = lambda s: self.psi(s, fixed)
        elif axis == "y":
            f = lambda s: self.psi(fixed, s)
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        return bracketed_root(f, lo, hi)

    def rotated_ray_intersection(self, x_bp, x_g1, step, angle=np.pi / 4, max_length=None):
        """Intersect Gamma with the ray from ``x_bp`` along (x_g1 - x_bp) rotated by ``angle``.

        Marches in increments of ``step`` until psi changes sign, then refines.
        """
        bx, by = map(float, x_bp)
        dx, dy = float(x_g1[0]) - bx, float(x_g1[1]) - by
        norm = np.hypot(dx, dy)
        if norm == 0:
            raise GeometryError("x_gamma1 coincides with the boundary point")
        dx, dy = _rotate(dx / norm, dy / norm, angle)
        if max_length is None:
            max_length = 1e3 * step
        f = lambda s: self.psi(bx + s * dx, by + s * dy)
        s0, f0 = 0.0, float(f(np.array([0.0]))[0])
        while s0 < max_length:
            s1 = s0 + step
            f1 = float(f(np.array([s1]))[0])
            if np.sign(f1) != np.sign(f0) or f1 == 0:
                s = bracketed_root(f, [s0], [s1], [f0], [f1])[0]
                return np.array([bx + s * dx, by + s * dy])
            s0, f0 = s1, f1
        raise GeometryError("rotated ray does not meet the boundary")


@dataclass
class LevelSet(Geometry):
    """Domain given by an analytic level-set function (and optionally its gradient)."""

    func: Callable = None
    grad: Callable | None = None

    def psi(self, x, y):
        return self.func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def grad_psi(self, x, y, step=1e-7):
        if self.grad is None:
            return super().grad_psi(x, y, step)
        return self.grad(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


@dataclass
class Circle(Geometry):
    """Disk with level set ``|x-c|^2 - r^2`` and closed-form queries."""

    cx: float = 0.0
    cy: float = 0.0
    radius: float = 1.0

    def psi(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 - self.radius**2

    def grad_psi(self, x, y, step=None):
        return 2 * (np.asarray(x, dtype=float) - self.cx), 2 * (np.asarray(y, dtype=float) - self.cy)

    def closest_point(self, x, y):
        dx = np.asarray(x, dtype=float) - self.cx
        dy = np.asarray(y, dtype=float) - self.cy
        r = np.hypot(dx, dy)
        if np.any(r == 0):
            raise GeometryError("closest point undefined at the circle center")
        return self.cx + self.radius * dx / r, self.cy + self.radius * dy / r

    def line_intersection(self, axis, fixed, lo, hi):
        lo = np.asarray(lo, dtype=float).ravel()
        hi = np.asarray(hi, dtype=float).ravel()
        fixed = np.asarray(fixed, dtype=float).ravel()
        if axis == "x":
            c_run, c_fix = self.cx, self.cy
        elif axis == "y":
            c_run, c_fix = self.cy, self.cx
        else:
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        disc = self.radius**2 - (fixed - c_fix) ** 2
        if np.any(disc < 0):
            raise NoIntersection("grid line misses the circle")
        root = np.sqrt(disc)
        cand_hi = c_run + root
        cand_lo = c_run - root
        tol = 1e-14 * (1 + np.abs(c_run) + self.radius)
        in_hi = (cand_hi >= np.minimum(lo, hi) - tol) & (cand_hi <= np.maximum(lo, hi) + tol)
        in_lo = (cand_lo >= np.minimum(lo, hi) - tol) & (cand_lo <= np.maximum(lo, hi) + tol)
        if np.any(~(in_hi | in_lo)):
            raise NoIntersection("no circle crossing in bracket")
        mid = 0.5 * (lo + hi)
        both = in_hi & in_lo
        pick_hi = np.where(both, np.abs(cand_hi - mid) <= np.abs(cand_lo - mid), in_hi)
        return np.where(pick_hi, cand_hi, cand_lo)

    def rotated_ray_intersection(self, x_bp, x_g1, step=None, angle=np.pi / 4, max_length=None):
        bx, by = float(x_bp[0]) - self.cx, float(x_bp[1]) - self.cy
        dx, dy = float(x_g1[0]) - float(x_bp[0]), float(x_g1[1]) - float(x_bp[1])
        norm = np.hypot(dx, dy)
        if norm == 0:
            raise GeometryError("x_gamma1 coincides with the boundary point")
        dx, dy = _rotate(dx / norm, dy / norm, angle)
        # |b + s d|^2 = r^2, b inside -> unique positive root
        bd = bx * dx + by * dy
        c = bx * bx + by * by - self.radius**2
        disc = bd * bd - c
        if disc < 0:
            raise GeometryError("rotated ray does not meet the boundary")
        s = -bd + np.sqrt(disc)
        if s < 0:
            raise GeometryError("rotated ray does not meet the boundary")
        return np.array([self.cx + bx + s * dx, self.cy + by + s * dy])


@dataclass
class Ellipse(LevelSet):
    """Ellipse ``(X/a)^2 + (Y/b)^2 - 1`` in a frame rotated by ``angle`` about the center."""

    a: float = 1.0
    b: float = 1.0
    angle: float = 0.0
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self):
        c, s = np.cos(self.angle), np.sin(self.angle)
        a2, b2 = self.a**2, self.b**2

        def func(x, y):
            dx, dy = x - self.cx, y - self.cy
            X = c * dx - s * dy
            Y = s * dx + c * dy
            return X * X / a2 + Y * Y / b2 - 1.0

        def grad(x, y):
            dx, dy = x - self.cx, y - self.cy
            X = c * dx - s * dy
            Y = s * dx + c * dy
            gX, gY = 2 * X / a2, 2 * Y / b2
            return c * gX + s * gY, -s * gX + c * gY

        self.func = func
        self.grad = grad


@dataclass
class TiltedSquare(Geometry):
    """Square |X| + |Y| <= 1 in a frame rotated by ``theta*pi`` about ``(px, py)``.

    The level set is the max-form ``max(|X-Y|, |X+Y|) - 1``; closest points are
    exact edge projections.
    """

    px: float = 0.691
    py: float = 0.357
    theta: float = 0.313

    def _local(self, x, y):
        t = self.theta * np.pi
        dx = np.asarray(x, dtype=float) - self.px
        dy = np.asarray(y, dtype=float) - self.py
        return np.cos(t) * dx - np.sin(t) * dy, np.sin(t) * dx + np.cos(t) * dy

    def psi(self, x, y):
        X, Y = self._local(x, y)
        return np.maximum(np.abs(X - Y), np.abs(X + Y)) - 1

    def vertices(self):
        t = self.theta * np.pi
        loc = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]])
        # inverse rotation back to physical coordinates
        xs = np.cos(t) * loc[:, 0] + np.sin(t) * loc[:, 1] + self.px
        ys = -np.sin(t) * loc[:, 0] + np.cos(t) * loc[:, 1] + self.py
        return np.column_stack([xs, ys])

    def closest_point(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        v = self.vertices()
        best = np.full(x.shape, np.inf)
        bx = np.zeros(x.shape)
        by = np.zeros(x.shape)
        for k in range(4):
            p0, p1 = v[k], v[(k + 1) % 4]
            ex, ey = p1 - p0
            t = ((x - p0[0]) * ex + (y - p0[1]) * ey) / (ex * ex + ey * ey)
            t = np.clip(t, 0.0, 1.0)
            qx, qy = p0[0] + t * ex, p0[1] + t * ey
            d = (x - qx) ** 2 + (y - qy) ** 2
            better = d < best
            best = np.where(better, d, best)
            bx = np.where(better, qx, bx)
            by = np.where(better, qy, by)
        return bx, by


@dataclass
class ParametricCurve(Geometry):
    """Closed curve (x(t), y(t)), t in [t_lo, t_hi]; psi is the signed distance.

    ``curve(t)`` returns (x, y); ``d1`` and ``d2`` return first and second
    derivatives. The curve is reoriented counterclockwise if needed.
    """

    curve: Callable = None
    d1: Callable = None
    d2: Callable = None
    t_lo: float = 0.0
    t_hi: float = 2 * np.pi
    n_guess: int = N_GUESS
    chunk: int = 2048

    def __post_init__(self):
        self.uses_distance_approx = True
        t = np.linspace(self.t_lo, self.t_hi, self.n_guess, endpoint=False)
        sx, sy = self.curve(t)
        area = 0.5 * np.sum(sx * np.roll(sy, -1) - np.roll(sx, -1) * sy)
        self._orient = 1.0 if area > 0 else -1.0
        self._samples = (t, np.asarray(sx, dtype=float), np.asarray(sy, dtype=float))

    def _nearest_param(self, x, y):
        t, sx, sy = self._samples
        x = np.asarray(x, dtype=float).ravel()
        y = np.asarray(y, dtype=float).ravel()
        idx = np.empty(x.size, dtype=int)
        for s in range(0, x.size, self.chunk):
            e = s + self.chunk
            d2 = (x[s:e, None] - sx[None, :]) ** 2 + (y[s:e, None] - sy[None, :]) ** 2
            idx[s:e] = np.argmin(d2, axis=1)
        theta = t[idx]
        dt = (self.t_hi - self.t_lo) / self.n_guess
        lo, hi = theta - dt, theta + dt
        # Newton on g(t) = (c(t) - x) . c'(t), safeguarded to one sample spacing
        for _ in range(60):
            cx, cy = self.curve(theta)
            ux, uy = self.d1(theta)
            vx, vy = self.d2(theta)
            rx, ry = cx - x, cy - y
            g = rx * ux + ry * uy
            gp = ux * ux + uy * uy + rx * vx + ry * vy
            gp = np.where(gp > 0, gp, ux * ux + uy * uy)
            step = g / gp
            theta = np.clip(theta - step, lo, hi)
            if np.all(np.abs(step) <= 1e-14 * (1 + np.abs(theta))):
                break
        return theta

    def closest_point(self, x, y):
        shape = np.shape(x)
        theta = self._nearest_param(x, y)
        cx, cy = self.curve(theta)
        return np.reshape(cx, shape), np.reshape(cy, shape)

    def signed_distance(self, x, y):
        shape = np.shape(x)
        xr = np.asarray(x, dtype=float).ravel()
        yr = np.asarray(y, dtype=float).ravel()
        theta = self._nearest_param(xr, yr)
        cx, cy = self.curve(theta)
        tx, ty = self.d1(theta)
        nx, ny = cx - xr, cy - yr
        dist = np.hypot(nx, ny)
        cross = self._orient * (tx * ny - ty * nx)
        return np.reshape(np.where(cross < 0, -dist, dist), shape)

    def psi(self, x, y):
        return self.signed_distance(x, y)


def circle_curve(cx=0.0, cy=0.0, r=1.0, n_guess=N_GUESS):
    return ParametricCurve(
        name="circle_curve",
        curve=lambda t: (cx + r * np.cos(t), cy + r * np.sin(t)),
        d1=lambda t: (-r * np.sin(t), r * np.cos(t)),
        d2=lambda t: (-r * np.cos(t), -r * np.sin(t)),
        n_guess=n_guess,
    )


def glass():
    def func(x, y):
        return (
            0.5
            - np.exp(-20 * ((x - 0.25) ** 2 + (y - 0.5) ** 2))
            - np.exp(-20 * ((x - 0.75) ** 2 + (y - 0.5) ** 2))
        )

    def grad(x, y):
        e1 = np.exp(-20 * ((x - 0.25) ** 2 + (y - 0.5) ** 2))
        e2 = np.exp(-20 * ((x - 0.75) ** 2 + (y - 0.5) ** 2))
        gx = 40 * (x - 0.25) * e1 + 40 * (x - 0.75) * e2
        gy = 40 * (y - 0.5) * (e1 + e2)
        return gx, gy

    return LevelSet(name="glass", func=func, grad=grad)


def bone(n_guess=N_GUESS):
    def curve(t):
        return (
            0.6 * np.cos(t) - 0.3 * np.cos(3 * t),
            1.5 + 0.7 * np.sin(t) - 0.07 * np.sin(3 * t) + 0.2 * np.sin(7 * t),
        )

    def d1(t):
        return (
            -0.6 * np.sin(t) + 0.9 * np.sin(3 * t),
            0.7 * np.cos(t) - 0.21 * np.cos(3 * t) + 1.4 * np.cos(7 * t),
        )

    def d2(t):
        return (
            -0.6 * np.cos(t) + 2.7 * np.cos(3 * t),
            -0.7 * np.sin(t) + 0.63 * np.sin(3 * t) - 9.8 * np.sin(7 * t),
        )

    return ParametricCurve(name="bone", curve=curve, d1=d1, d2=d2, n_guess=n_guess)


def star(n_guess=N_GUESS):
    c0 = 0.02 * np.sqrt(5.0)

    def curve(t):
        r = 0.5 + 0.2 * np.sin(5 * t)
        return c0 + r * np.cos(t), c0 + r * np.sin(t)

    def d1(t):
        r = 0.5 + 0.2 * np.sin(5 * t)
        rp = np.cos(5 * t)
        return rp * np.cos(t) - r * np.sin(t), rp * np.sin(t) + r * np.cos(t)

    def d2(t):
        r = 0.5 + 0.2 * np.sin(5 * t)
        rp = np.cos(5 * t)
        rpp = -5 * np.sin(5 * t)
        return (
            rpp * np.cos(t) - 2 * rp * np.sin(t) - r * np.cos(t),
            rpp * np.sin(t) + 2 * rp * np.cos(t) - r * np.sin(t),
        )

    return ParametricCurve(name="star", curve=curve, d1=d1, d2=d2, n_guess=n_guess)


def ellipse_fixed_area(a):
    """x^2/a^2 + y^2 a^2 = 1 (area pi for every a)."""
    return Ellipse(name=f"ellipse_fixed_area({a:g})", a=a, b=1.0 / a)


def rotated_ellipse(alpha):
    """Semi-axes 4 and 2 rotated by ``alpha``."""
    return Ellipse(name=f"rotated_ellipse({alpha:g})", a=4.0, b=2.0, angle=alpha)


def level_set_eval(geom: Geometry, x, y):
    return geom.psi(x, y)


def signed_distance(curve: ParametricCurve, x, y):
    return curve.signed_distance(x, y)


def closest_point(geom: Geometry, x, y):
    return geom.closest_point(x, y)


def line_intersection(geom: Geometry, axis, fixed, bracket):
    lo, hi = bracket
    return geom.line_intersection(axis, fixed, lo, hi)


def rotated_ray_intersection(geom: Geometry, x_bp, x_g1, step=1e-2):
    return geom.rotated_ray_intersection(x_bp, x_g1, step)
