from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import Geometry

EQUATIONS = ("poisson", "helmholtz", "heat", "wave")


def _zero(x, y, t=0.0):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


@dataclass
class ProblemSpec:
    """div(beta grad u) = f in the domain, u = u_D on its boundary.

    ``beta`` is either a float (constant conductivity) or a callable ``(x, y)``.
    ``source``, ``dirichlet`` and ``exact`` take ``(x, y, t)``; the time
    argument is ignored by steady problems. For ``helmholtz`` the equation is
    ``omega^2 u + laplace(u) = f``; for ``heat`` it is ``u_t = div(beta grad u) + f``
    and for ``wave`` ``u_tt = laplace(u) + f``.
    """

    name: str
    geometry: Geometry
    box: tuple[float, float, float, float]
    beta: float | Callable = 1.0
    source: Callable = _zero
    dirichlet: Callable = _zero
    exact: Callable | None = None
    exact_grad: Callable | None = None
    equation: str = "poisson"
    omega: float = 0.0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.equation not in EQUATIONS:
            raise ValueError(f"unknown equation {self.equation!r}")

    @property
    def beta_constant(self) -> float | None:
        if callable(self.beta):
            return None
        return float(self.beta)

    def beta_at(self, x, y):
        if callable(self.beta):
            return np.asarray(self.beta(x, y), dtype=float)
        return np.full(np.broadcast(np.asarray(x), np.asarray(y)).shape, float(self.beta))
