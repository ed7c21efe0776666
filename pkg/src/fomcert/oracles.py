"""Oracle contracts: smooth part f, simple part, and the problem bundle."""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .linalg import LinearMap
from .reference import ReferenceFunction, ZeroReference

INF = float("inf")

# Slack used when deciding membership for indicator functions and conjugate
# domains; convex combinations of feasible points drift by rounding only.
FEAS_TOL = 1e-9


def fenchel_conjugate_at_subgradient(value, point, g):
    """Conjugate value via the Fenchel-Young equality <g, point> - value.

    Exact whenever g is a subgradient of the function at point.
    """
    return float(g @ point) - value


@dataclass
class SmoothOracle:
    """The smooth (outer) part f with a subgradient and conjugate oracle."""

    value: Callable[[np.ndarray], float]
    subgradient: Callable[[np.ndarray], np.ndarray]
    conjugate: Callable[[np.ndarray], float]
    differentiable: bool = True
    domain: str = "all"


class SimpleFunction:
    """The simple part of the objective (Psi): possibly nonsmooth, possibly
    an indicator; evaluable, conjugable, and linearly minimizable when the
    domain is compact."""

    def value(self, x):
        raise NotImplementedError

    def conjugate(self, v):
        """Psi*(v) = sup_x <v, x> - Psi(x)."""
        raise NotImplementedError

    def linmin(self, c):
        """argmin_s <c, s> + Psi(s); lowest-index vertex on ties."""
        raise NotImplementedError


class ZeroFunction(SimpleFunction):
    def value(self, x):
        return 0.0

    def conjugate(self, v):
        return 0.0 if np.max(np.abs(v), initial=0.0) <= FEAS_TOL else INF


class L1Norm(SimpleFunction):
    def __init__(self, lam):
        if lam <= 0:
            raise ValueError("l1 weight must be positive")
        self.lam = float(lam)

    def value(self, x):
        return self.lam * float(np.sum(np.abs(x)))

    def conjugate(self, v):
        if np.max(np.abs(v), initial=0.0) <= self.lam * (1.0 + FEAS_TOL):
            return 0.0
        return INF


class BoxIndicator(SimpleFunction):
    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, dtype=float)
        self.hi = np.asarray(hi, dtype=float)
        if np.any(self.lo > self.hi):
            raise ValueError("empty box")

    def value(self, x):
        scale = 1.0 + np.maximum(np.abs(self.lo), np.abs(self.hi))
        if np.all(x >= self.lo - FEAS_TOL * scale) and np.all(x <= self.hi + FEAS_TOL * scale):
            return 0.0
        return INF

    def conjugate(self, v):
        # Support function of the box.
        return float(np.sum(np.maximum(v * self.lo, v * self.hi)))

    def project(self, x):
        return np.clip(x, self.lo, self.hi)

    def linmin(self, c):
        return np.where(c > 0, self.lo, np.where(c < 0, self.hi, self.lo))


class SimplexIndicator(SimpleFunction):
    def value(self, x):
        if np.any(x < -FEAS_TOL) or abs(float(np.sum(x)) - 1.0) > FEAS_TOL * x.size:
            return INF
        return 0.0

    def conjugate(self, v):
        return float(np.max(v))

    def project(self, x):
        return _kernels.project_simplex(x)

    def linmin(self, c):
        out = np.zeros_like(c)
        out[int(np.argmin(c))] = 1.0
        return out


class L1BallIndicator(SimpleFunction):
    def __init__(self, radius):
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def value(self, x):
        if float(np.sum(np.abs(x))) <= self.radius * (1.0 + FEAS_TOL):
            return 0.0
        return INF

    def conjugate(self, v):
        return self.radius * float(np.max(np.abs(v), initial=0.0))

    def linmin(self, c):
        # Vertex -R * sign(c_j) e_j for the first coordinate of largest |c_j|.
        out = np.zeros_like(c)
        j = int(np.argmax(np.abs(c)))
        out[j] = -self.radius if c[j] > 0 else self.radius
        return out


@dataclass
class ProblemInstance:
    """Everything a run needs: map, oracles, reference function, constants."""

    A: LinearMap
    f: SmoothOracle
    psi: SimpleFunction
    h: ReferenceFunction
    feasible_start: np.ndarray
    constants: dict = field(default_factory=dict)
    known_optimum: Optional[tuple] = None  # (value, point)
    name: str = ""
    condition: str = ""  # which smoothness/continuity class the instance claims

    @property
    def zero_reference(self):
        return isinstance(self.h, ZeroReference)

    def primal_value(self, x):
        return self.f.value(self.A.apply(x)) + self.psi.value(x)
