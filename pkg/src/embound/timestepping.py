"""Time integrators on top of an assembled operator, and exact wave modes on the disk."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.special
from scipy.optimize import brentq

from .linalg import amg_setup, cg_solve

KAPPA_77 = 31.4227941922
BLOWUP_FACTOR = 1e6


class InstabilityError(RuntimeError):
    pass


def _forcing(sys, t):
    """L-part from boundary data plus the source, as it enters u_t or u_tt."""
    return sys.boundary_vector(t) / sys.h**2 + sys.source_vector(t)


@dataclass
class ThetaScheme:
    """u^{n+1} - th dt^2 F^{n+1} = 2u^n + (1-2th) dt^2 F^n - u^{n-1} + th dt^2 F^{n-1}.

    ``F(u, t) = L u + f``; theta=0 is explicit leap-frog.
    """

    sys: object
    dt: float
    theta: float = 0.0
    cycle: str = "V"
    tol: float = 1e-12
    iterations: list = field(default_factory=list)

    def __post_init__(self):
        self.kappa = self.dt**2 / self.sys.h**2
        self.hier = None
        if self.theta > 0:
            n = self.sys.n
            self.M = (sp.identity(n, format="csr") + (self.theta * self.kappa) * self.sys.A).tocsr()
            self.hier = amg_setup(self.M, self.cycle)

    def _F(self, u, t):
        return -(self.sys.A @ u) / self.sys.h**2 + _forcing(self.sys, t)

    def step(self, u_prev, u_cur, t_cur):
        th, dt2 = self.theta, self.dt**2
        t_next = t_cur + self.dt
        rhs = 2 * u_cur - u_prev + (1 - 2 * th) * dt2 * self._F(u_cur, t_cur)
        if th == 0:
            return rhs
        rhs += th * dt2 * self._F(u_prev, t_cur - self.dt)
        rhs += th * dt2 * _forcing(self.sys, t_next)
        # extrapolated warm start
        x0 = 2 * u_cur - u_prev
        res = cg_solve(self.M, rhs, x0=x0, tol=self.tol, precond=self.hier)
        self.iterations.append(res.iterations)
        return res.x

    def run(self, u0, u1, t0, n_steps, callback=None):
        u_prev, u_cur = np.array(u0, dtype=float), np.array(u1, dtype=float)
        ref = max(np.max(np.abs(u_prev)), np.max(np.abs(u_cur)), 1e-300)
        t = t0 + self.dt
        for n in range(1, n_steps):
            u_next = self.step(u_prev, u_cur, t)
            t += self.dt
            if not np.all(np.isfinite(u_next)) or np.max(np.abs(u_next)) > BLOWUP_FACTOR * ref:
                raise InstabilityError(f"solution blew up at step {n + 1} (t={t:.4g})")
            u_prev, u_cur = u_cur, u_next
            if callback is not None:
                callback(n + 1, t, u_prev, u_cur)
        return u_prev, u_cur, t


def taylor_start(sys, u0, v0, dt, t0=0.0):
    """Second-order start u^1 = u^0 + dt v^0 + dt^2/2 (L u^0 + f)."""
    acc = -(sys.A @ u0) / sys.h**2 + _forcing(sys, t0)
    return u0 + dt * v0 + 0.5 * dt**2 * acc


def theta_step(sys, state, dt, theta, t=0.0, scheme=None):
    """Single theta-scheme step from ``state = (u_prev, u_cur)`` at time ``t``."""
    scheme = scheme or ThetaScheme(sys, dt, theta)
    return scheme.step(state[0], state[1], t)


def leapfrog_energy(sys, u_cur, u_next, dt):
    """Discrete energy conserved by the explicit scheme with homogeneous data."""
    K = sys.A / sys.h**2
    v = (u_next - u_cur) / dt
    return float(v @ v + u_next @ (K @ u_cur))


@dataclass
class CrankNicolson:
    sys: object
    dt: float
    cycle: str = "V"
    tol: float = 1e-12
    iterations: list = field(default_factory=list)

    def __post_init__(self):
        n = self.sys.n
        c = 0.5 * self.dt / self.sys.h**2
        self.c = c
        self.M = (sp.identity(n, format="csr") + c * self.sys.A).tocsr()
        self.hier = amg_setup(self.M, self.cycle)

    def step(self, u, t):
        dt = self.dt
        rhs = u - self.c * (self.sys.A @ u)
        rhs += 0.5 * dt * (_forcing(self.sys, t) + _forcing(self.sys, t + dt))
        res = cg_solve(self.M, rhs, x0=u, tol=self.tol, precond=self.hier)
        self.iterations.append(res.iterations)
        return res.x


def crank_nicolson_step(sys, u, dt, t, scheme=None):
    scheme = scheme or CrankNicolson(sys, dt)
    return scheme.step(u, t)


def bessel_j(m: int, z):
    """J_m(z) for integer order 0..20 and 0 <= z <= 200."""
    if int(m) != m or not 0 <= m <= 20:
        raise ValueError("order must be an integer in [0, 20]")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > 200):
        raise ValueError("argument must lie in [0, 200]")
    return scipy.special.jv(int(m), z)


def bessel_zero(m: int, n: int) -> float:
    """n-th positive zero of J_m by bracketing and Brent's method on ``bessel_j``."""
    zeros = []
    step = 0.05
    z0 = max(m, 1e-3) * 0.5 + 1e-3
    f0 = float(bessel_j(m, z0))
    while len(zeros) < n:
        z1 = z0 + step
        if z1 > 200:
            raise ValueError("zero beyond supported argument range")
        f1 = float(bessel_j(m, z1))
        if f0 == 0:
            zeros.append(z0)
        elif f0 * f1 < 0:
            zeros.append(brentq(lambda z: float(bessel_j(m, z)), z0, z1, xtol=1e-14))
        z0, f0 = z1, f1
    return zeros[n - 1]


def standing_mode(r, phi, t, m=7, n=7, kappa=None):
    """J_m(r kappa) cos(m phi) cos(kappa t)."""
    if kappa is None:
        kappa = KAPPA_77 if (m, n) == (7, 7) else bessel_zero(m, n)
    r = np.asarray(r, dtype=float)
    return bessel_j(m, np.minimum(r * kappa, 200.0)) * np.cos(m * np.asarray(phi)) * math.cos(kappa * t)
