"""Named benchmark problems with manufactured or exact solutions."""

from __future__ import annotations

import numpy as np

from .. import geometry as geo
from ..problem import ProblemSpec
from ..timestepping import KAPPA_77, standing_mode


def _zero(x, y, t=0.0):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def glass_problem():
    beta = -8.0
    centers = ((0.25, 0.5), (0.75, 0.5))

    def exact(x, y, t=0.0):
        return geo.glass().psi(x, y)

    def lap(x, y):
        out = 0.0
        for cx, cy in centers:
            r2 = (x - cx) ** 2 + (y - cy) ** 2
            out = out + (80.0 - 1600.0 * r2) * np.exp(-20.0 * r2)
        return out

    def grad(x, y, t=0.0):
        return geo.glass().grad(x, y)

    return ProblemSpec(
        name="glass",
        geometry=geo.glass(),
        box=(0.0, 1.0, 0.0, 1.0),
        beta=beta,
        source=lambda x, y, t=0.0: beta * lap(x, y),
        dirichlet=exact,
        exact=exact,
        exact_grad=grad,
    )


def tilted_square_problem(px=0.691, py=0.357, theta=0.313):
    def exact(x, y, t=0.0):
        return np.exp(-(x**2) - y**2)

    def grad(x, y, t=0.0):
        e = exact(x, y)
        return -2 * x * e, -2 * y * e

    def source(x, y, t=0.0):
        r2 = x**2 + y**2
        return (4 * r2 - 4) * np.exp(-r2)

    return ProblemSpec(
        name="tilted_square",
        geometry=geo.TiltedSquare(name="tilted_square", px=px, py=py, theta=theta),
        box=(-3.0, 3.0, -3.0, 3.0),
        beta=1.0,
        source=source,
        dirichlet=exact,
        exact=exact,
        exact_grad=grad,
    )


def _bone_fields():
    def u(x, y, t=0.0):
        return np.exp(x) * (x**2 * np.sin(y) + y**2)

    def grad(x, y, t=0.0):
        e = np.exp(x)
        return e * (x**2 * np.sin(y) + y**2 + 2 * x * np.sin(y)), e * (x**2 * np.cos(y) + 2 * y)

    def beta(x, y):
        return 2.0 + np.sin(x * y)

    def source(x, y, t=0.0):
        e = np.exp(x)
        uxx = e * (x**2 * np.sin(y) + y**2 + 4 * x * np.sin(y) + 2 * np.sin(y))
        uyy = e * (-(x**2) * np.sin(y) + 2)
        ux, uy = grad(x, y)
        c = np.cos(x * y)
        return beta(x, y) * (uxx + uyy) + y * c * ux + x * c * uy

    return u, grad, beta, source


def bone_problem():
    u, grad, beta, source = _bone_fields()
    return ProblemSpec(
        name="bone",
        geometry=geo.bone(),
        box=(-2.0, 2.0, -1.0, 3.0),
        beta=beta,
        source=source,
        dirichlet=u,
        exact=u,
        exact_grad=grad,
    )


def hat_source(xs, ys, h, strength=1.0):
    """Tensor-product hat of half-width h centred at (xs, ys); grid sum times h^2 is 1."""

    def f(x, y, t=0.0):
        wx = np.maximum(0.0, 1.0 - np.abs(np.asarray(x) - xs) / h)
        wy = np.maximum(0.0, 1.0 - np.abs(np.asarray(y) - ys) / h)
        return strength * wx * wy / h**2

    return f


def star_helmholtz_problem(n, omega=50.0, xs=-0.375, ys=0.125, strength=1000.0):
    box = (-1.0, 1.0, -1.0, 1.0)
    h = (box[1] - box[0]) / n
    return ProblemSpec(
        name="star",
        geometry=geo.star(),
        box=box,
        beta=1.0,
        source=hat_source(xs, ys, h, strength),
        dirichlet=_zero,
        equation="helmholtz",
        omega=omega,
        extras={"source_point": (xs, ys)},
    )


def heat_disk_problem():
    def exact(x, y, t=0.0):
        return np.exp(-t) * (x**2 + y**2 - 0.25)

    def grad(x, y, t=0.0):
        e = np.exp(-t)
        return 2 * x * e, 2 * y * e

    def source(x, y, t=0.0):
        return np.exp(-t) * (7 * (x**2 + y**2) - 0.75)

    return ProblemSpec(
        name="heat_disk",
        geometry=geo.Circle(name="heat_disk", radius=0.5),
        box=(-1.0, 1.0, -1.0, 1.0),
        beta=lambda x, y: 0.25 - x**2 - y**2,
        source=source,
        dirichlet=exact,
        exact=exact,
        exact_grad=grad,
        equation="heat",
    )


def wave_disk_problem(m=7, n=7, kappa=KAPPA_77):
    def exact(x, y, t=0.0):
        r = np.hypot(x, y)
        return standing_mode(np.minimum(r, 200.0 / kappa), np.arctan2(y, x), t, m, n, kappa)

    return ProblemSpec(
        name="wave_disk",
        geometry=geo.Circle(name="wave_disk", radius=1.0),
        box=(-1.1, 1.1, -1.1, 1.1),
        beta=1.0,
        source=_zero,
        dirichlet=_zero,
        exact=exact,
        equation="wave",
        extras={"kappa": kappa, "m": m, "n": n},
    )


def ellipse_qoi_problem(a, box_half=2.5):
    """Delta u = 3 in x^2/a^2 + a^2 y^2 < 1, u = 0 on the boundary; exact u = C psi."""
    c = 3.0 / (2.0 * (a**-2 + a**2))
    g = geo.ellipse_fixed_area(a)

    def exact(x, y, t=0.0):
        return c * g.psi(x, y)

    def grad(x, y, t=0.0):
        gx, gy = g.grad(x, y)
        return c * gx, c * gy

    return ProblemSpec(
        name=f"ellipse({a:g})",
        geometry=g,
        box=(-box_half, box_half, -box_half, box_half),
        beta=1.0,
        source=lambda x, y, t=0.0: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, 3.0),
        dirichlet=_zero,
        exact=exact,
        exact_grad=grad,
        extras={"a": a},
    )


def rotated_ellipse_problem(alpha):
    c = 3.0 / (2.0 * (1 / 16 + 1 / 4))
    g = geo.rotated_ellipse(alpha)

    def exact(x, y, t=0.0):
        return c * g.psi(x, y)

    def grad(x, y, t=0.0):
        gx, gy = g.grad(x, y)
        return c * gx, c * gy

    return ProblemSpec(
        name=f"rotated_ellipse({alpha:g})",
        geometry=g,
        box=(-5.0, 5.0, -5.0, 5.0),
        beta=1.0,
        source=lambda x, y, t=0.0: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, 3.0),
        dirichlet=_zero,
        exact=exact,
        exact_grad=grad,
        extras={"alpha": alpha},
    )


def disk_problem(radius=1.0):
    """Delta u = 4 on a disk, exact u = r^2 - R^2."""

    def exact(x, y, t=0.0):
        return x**2 + y**2 - radius**2

    return ProblemSpec(
        name="disk",
        geometry=geo.Circle(name="disk", radius=radius),
        box=(-1.5 * radius, 1.5 * radius, -1.5 * radius, 1.5 * radius),
        beta=1.0,
        source=lambda x, y, t=0.0: np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, 4.0),
        dirichlet=exact,
        exact=exact,
        exact_grad=lambda x, y, t=0.0: (2 * x, 2 * y),
    )


POISSON_PROBLEMS = {
    "glass": glass_problem,
    "tilted_square": tilted_square_problem,
    "bone": bone_problem,
    "disk": disk_problem,
}


def named_problem(name, n=None, **kw):
    """Problem factory by name; ``n`` is needed only where the set-up depends on h."""
    if name in POISSON_PROBLEMS:
        return POISSON_PROBLEMS[name](**kw)
    if name == "star":
        if n is None:
            raise ValueError("star problem needs N for its source")
        return star_helmholtz_problem(n, **kw)
    if name == "heat_disk":
        return heat_disk_problem()
    if name == "wave_disk":
        return wave_disk_problem(**kw)
    if name == "ellipse":
        return ellipse_qoi_problem(kw.get("a", 1.0))
    if name == "rotated_ellipse":
        return rotated_ellipse_problem(kw.get("alpha", 0.0))
    raise KeyError(f"unknown problem {name!r}")


PROBLEM_NAMES = ("glass", "tilted_square", "bone", "disk", "star", "heat_disk", "wave_disk",
                 "ellipse", "rotated_ellipse")
