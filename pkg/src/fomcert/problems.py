"""Desk-scale benchmark instances with declared constants, domain samplers,
and a numerical verifier for the smoothness/continuity/curvature classes."""

import math

import numpy as np

from .engine import segment_excess
from .linalg import LinearMap
from .oracles import (
    BoxIndicator,
    L1BallIndicator,
    L1Norm,
    ProblemInstance,
    SimplexIndicator,
    SmoothOracle,
)
from .reference import Burg, Entropy, SquaredEuclidean, ZeroReference

INF = float("inf")

_MASK = (1 << 64) - 1


class SplitMix64:
    """Seeded 64-bit generator; fixed algorithm for reproducibility."""

    def __init__(self, seed):
        self.state = seed & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self):
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniforms(self, n):
        return np.array([self.uniform() for _ in range(n)])

    def normal(self):
        # Box-Muller; discard the second variate for simplicity.
        u1 = max(self.uniform(), 1e-300)
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, n):
        return np.array([self.normal() for _ in range(n)])


# Boundary margin for sampling: conditions are tested away from the region
# where Bregman distances blow up.
_MARGIN = 1e-3


def _quadratic_oracle(Q, q):
    # f(x) = 0.5 x'Qx + q'x with Q positive definite.
    Qinv = np.linalg.inv(Q)

    def conjugate(u):
        d = u - q
        return 0.5 * float(d @ (Qinv @ d))

    return SmoothOracle(
        value=lambda x: 0.5 * float(x @ (Q @ x)) + float(q @ x),
        subgradient=lambda x: Q @ x + q,
        conjugate=conjugate,
    )


def _make_simplex_quadratic(rng, n=20, reference="entropy"):
    G = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
    Q = G.T @ G / n + 0.1 * np.eye(n)
    q = 0.5 * rng.normals(n)
    L = float(np.linalg.eigvalsh(Q)[-1])
    f = _quadratic_oracle(Q, q)
    h = Entropy() if reference == "entropy" else SquaredEuclidean()
    start = np.full(n, 1.0 / n)

    def sampler(r):
        p = -np.log(np.maximum(r.uniforms(n), 1e-12))
        p = p / p.sum()
        return (p + 2 * _MARGIN) / (1.0 + 2 * _MARGIN * n)

    # Pinsker: entropy is 1-strongly convex on the simplex in the l1 norm,
    # so D_f <= lambda_max(Q) * D_h there; the same constant covers the
    # Euclidean reference.
    return ProblemInstance(
        A=LinearMap.identity(n), f=f, psi=SimplexIndicator(), h=h,
        feasible_start=start, constants={"L": L},
        name="simplex-quadratic", condition="smooth.1"), sampler


def _make_lasso(rng, n=20, m=30, lam=None, cond=1e5):
    G = np.array([[rng.normal() for _ in range(n)] for _ in range(m)])
    # Stretch the spectrum so the fast method stays in its sublinear regime.
    U, s, Vt = np.linalg.svd(G, full_matrices=False)
    s = np.geomspace(1.0, 1.0 / cond, s.size)
    B = U @ np.diag(s) @ Vt
    x_true = rng.normals(n)
    x_true[np.abs(x_true) < 0.8] = 0.0
    b = B @ x_true + 0.05 * rng.normals(m)
    if lam is None:
        lam = 0.05 * float(np.max(np.abs(B.T @ b)))
    L = float(np.linalg.eigvalsh(B.T @ B)[-1])
    f = SmoothOracle(
        value=lambda y: 0.5 * float((y - b) @ (y - b)),
        subgradient=lambda y: y - b,
        conjugate=lambda u: 0.5 * float(u @ u) + float(u @ b),
    )
    start = np.zeros(n)
    scale = max(1.0, float(np.max(np.abs(x_true))))

    def sampler(r):
        return scale * (2.0 * r.uniforms(n) - 1.0)

    return ProblemInstance(
        A=LinearMap.dense(B), f=f, psi=L1Norm(lam), h=SquaredEuclidean(),
        feasible_start=start, constants={"L": L},
        name="lasso", condition="smooth.1"), sampler


def _make_poisson_burg(rng, n=10, m=15, lo=0.1, hi=10.0):
    B = 0.5 + rng.uniforms(m * n).reshape(m, n)
    x_true = 0.5 + rng.uniforms(n)
    b = B @ x_true

    def value(y):
        if np.any(y <= 0.0):
            return INF
        return float(np.sum(y - b * np.log(y)))

    f = SmoothOracle(
        value=value,
        subgradient=lambda y: 1.0 - b / y,
        conjugate=lambda u: (float(np.sum(b * np.log(b / (1.0 - u)) - b))
                             if np.all(u < 1.0) else INF),
    )
    L = float(np.sum(b))
    start = np.ones(n)

    def sampler(r):
        return lo + _MARGIN + (hi - lo - 2 * _MARGIN) * r.uniforms(n)

    return ProblemInstance(
        A=LinearMap.dense(B), f=f, psi=BoxIndicator(np.full(n, lo), np.full(n, hi)),
        h=Burg(), feasible_start=start, constants={"L": L},
        name="poisson-burg", condition="smooth.1"), sampler


def _make_l1_regression(rng, n=10, m=20, box=1.0):
    B = np.array([[rng.normal() for _ in range(n)] for _ in range(m)])
    x_true = box * (2.0 * rng.uniforms(n) - 1.0)
    b = B @ x_true + 0.1 * rng.normals(m)

    f = SmoothOracle(
        value=lambda y: float(np.sum(np.abs(y - b))),
        subgradient=lambda y: np.sign(y - b),
        conjugate=lambda u: (float(u @ b)
                             if np.max(np.abs(u), initial=0.0) <= 1.0 + 1e-9 else INF),
        differentiable=False,
    )
    # Relative continuity constant: squared bound on any subgradient of
    # x -> |Bx - b|_1, namely (sum of row norms)^2.
    M = float(np.sum(np.linalg.norm(B, axis=1))) ** 2
    start = np.zeros(n)

    def sampler(r):
        return (box - _MARGIN) * (2.0 * r.uniforms(n) - 1.0)

    inst = ProblemInstance(
        A=LinearMap.dense(B), f=f,
        psi=BoxIndicator(np.full(n, -box), np.full(n, box)),
        h=SquaredEuclidean(), feasible_start=start, constants={"M": M},
        name="l1-regression", condition="relcont")
    inst.known_optimum = _l1_regression_optimum(B, b, box)
    return inst, sampler


def _l1_regression_optimum(B, b, box):
    # min |Bx - b|_1 over the box is a linear program in (x, r).
    from scipy.optimize import linprog
    m, n = B.shape
    c = np.concatenate([np.zeros(n), np.ones(m)])
    A_ub = np.block([[B, -np.eye(m)], [-B, -np.eye(m)]])
    b_ub = np.concatenate([b, -b])
    bounds = [(-box, box)] * n + [(0, None)] * m
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs")
    x = res.x[:n]
    return float(np.sum(np.abs(B @ x - b))), x


def _make_holder(rng, n=10, m=12, nu=0.5, box=2.0):
    B = np.array([[rng.normal() for _ in range(n)] for _ in range(m)])
    x_true = 0.5 * box * (2.0 * rng.uniforms(n) - 1.0)
    b = B @ x_true + 0.1 * rng.normals(m)
    p = 1.0 + nu

    def value(y):
        return float(np.linalg.norm(y - b)) ** p / p

    def subgradient(y):
        d = y - b
        nrm = float(np.linalg.norm(d))
        if nrm == 0.0:
            return np.zeros_like(d)
        return nrm ** (nu - 1.0) * d

    def conjugate(u):
        q = p / nu  # conjugate exponent of 1+nu
        return float(u @ b) + float(np.linalg.norm(u)) ** q / q

    f = SmoothOracle(value=value, subgradient=subgradient, conjugate=conjugate)
    sigma = float(np.linalg.svd(B, compute_uv=False)[0])
    M = 2.0 ** (1.0 - nu) * sigma ** p
    start = np.full(n, 0.75 * box)

    def sampler(r):
        return (box - _MARGIN) * (2.0 * r.uniforms(n) - 1.0)

    inst = ProblemInstance(
        A=LinearMap.dense(B), f=f,
        psi=BoxIndicator(np.full(n, -box), np.full(n, box)),
        h=SquaredEuclidean(), feasible_start=start,
        constants={"M": M, "nu": nu}, name="holder", condition="smooth.3")
    inst.known_optimum = _holder_optimum(B, b, nu, box, n)
    return inst, sampler


def _holder_optimum(B, b, nu, box, n):
    from scipy.optimize import minimize
    p = 1.0 + nu

    def fun(x):
        d = B @ x - b
        nrm = np.linalg.norm(d)
        grad = B.T @ (nrm ** (nu - 1.0) * d) if nrm > 0 else np.zeros(n)
        return nrm ** p / p, grad

    res = minimize(fun, np.zeros(n), jac=True, method="L-BFGS-B",
                   bounds=[(-box, box)] * n,
                   options={"maxiter": 5000, "ftol": 1e-16, "gtol": 1e-12})
    return float(res.fun), res.x


def _make_cg_ball(rng, n=10, radius=1.0):
    G = np.array([[rng.normal() for _ in range(n)] for _ in range(n)])
    Q = G.T @ G / n + 0.1 * np.eye(n)
    # Put the unconstrained minimizer outside the ball so the constraint binds.
    x_unc = rng.normals(n)
    x_unc *= 2.0 * radius / float(np.sum(np.abs(x_unc)))
    q = -Q @ x_unc
    L = float(np.linalg.eigvalsh(Q)[-1])
    f = _quadratic_oracle(Q, q)
    M = L * (2.0 * radius) ** 2  # curvature constant: diameter^2 * lambda_max
    start = np.zeros(n)

    def sampler(r):
        y = r.normals(n)
        target = radius * (1.0 - _MARGIN) * r.uniform()
        return y * target / float(np.sum(np.abs(y)))

    return ProblemInstance(
        A=LinearMap.identity(n), f=f, psi=L1BallIndicator(radius),
        h=ZeroReference(), feasible_start=start,
        constants={"M": M, "nu": 1.0}, name="cg-ball",
        condition="curv.nu"), sampler


_REGISTRY = {
    "simplex-quadratic": _make_simplex_quadratic,
    "lasso": _make_lasso,
    "poisson-burg": _make_poisson_burg,
    "l1-regression": _make_l1_regression,
    "holder": _make_holder,
    "cg-ball": _make_cg_ball,
}

REGISTRY_NAMES = tuple(_REGISTRY)


def make_instance(name, seed=0, **params):
    """Build a registry instance deterministically from its seed."""
    if name not in _REGISTRY:
        raise KeyError("unknown instance %r; choose from %s" % (name, REGISTRY_NAMES))
    rng = SplitMix64(seed)
    instance, sampler = _REGISTRY[name](rng, **params)
    instance.sampler = sampler
    return instance


def domain_sampler(instance):
    return instance.sampler


def _composite_bregman(instance, u, v):
    # Bregman distance of the smooth composite x -> f(Ax).
    A, f = instance.A, instance.f
    Au, Av = A.apply(u), A.apply(v)
    g = A.adjoint_apply(f.subgradient(Av))
    return f.value(Au) - f.value(Av) - float(g @ (u - v))


def verify_constants(instance, samples=1000, seed=12345, constants=None):
    """Sample the claimed condition class and report the worst violation ratio.

    Passes iff max_ratio <= 1 + 1e-9.  Ratios with a vanishing right-hand
    side are skipped (both sides are zero to rounding there).
    """
    con = dict(instance.constants)
    if constants:
        con.update(constants)
    rng = SplitMix64(seed)
    sample = domain_sampler(instance)
    h = instance.h
    cond = instance.condition
    max_ratio = 0.0
    tiny = 1e-12

    for _ in range(samples):
        if cond == "smooth.1":
            x, y = sample(rng), sample(rng)
            rhs = con["L"] * h.bregman(y, x)
            if rhs < tiny:
                continue
            ratio = _composite_bregman(instance, y, x) / rhs
        elif cond == "relcont":
            x, s = sample(rng), sample(rng)
            t = 1e-3 + rng.uniform()
            g = instance.A.adjoint_apply(
                instance.f.subgradient(instance.A.apply(x)))
            lhs = -t * float(g @ (s - x)) - h.bregman(s, x)
            rhs = con["M"] * t * t / 2.0
            ratio = lhs / rhs
        elif cond == "smooth.2":
            x, s, s_ = sample(rng), sample(rng), sample(rng)
            theta = rng.uniform()
            rhs = con["L"] * theta ** con["gamma"] * h.bregman(s, s_)
            if rhs < tiny:
                continue
            u = (1.0 - theta) * x + theta * s
            v = (1.0 - theta) * x + theta * s_
            ratio = _composite_bregman(instance, u, v) / rhs
        elif cond == "smooth.3":
            x, s, s_ = sample(rng), sample(rng), sample(rng)
            theta = rng.uniform()
            nu = con["nu"]
            rhs = (2.0 * con["M"] * theta ** (1.0 + nu)
                   * h.bregman(s, s_) ** ((1.0 + nu) / 2.0) / (1.0 + nu))
            if rhs < tiny:
                continue
            u = (1.0 - theta) * x + theta * s
            v = (1.0 - theta) * x + theta * s_
            ratio = _composite_bregman(instance, u, v) / rhs
        elif cond == "curv.nu":
            x, s = sample(rng), sample(rng)
            theta = rng.uniform()
            nu = con["nu"]
            rhs = con["M"] * theta ** (1.0 + nu) / (1.0 + nu)
            if rhs < tiny:
                continue
            g = instance.f.subgradient(instance.A.apply(x))
            ratio = segment_excess(instance, x, g, s, theta) / rhs
        else:
            raise ValueError("instance claims no known condition class")
        max_ratio = max(max_ratio, ratio)

    return {
        "instance": instance.name,
        "condition": cond,
        "constants": con,
        "samples": samples,
        "max_ratio": max_ratio,
        "passed": max_ratio <= 1.0 + 1e-9,
    }


def reference_optimum(instance, budget=20000):
    """Optimal value and point: the registered optimum when present, else a
    long certificate-bracketed run of the matching method."""
    if instance.known_optimum is not None:
        return instance.known_optimum
    from . import methods  # late import: methods builds on problems
    return methods.reference_run(instance, budget)
