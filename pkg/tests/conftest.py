import numpy as np
import pytest

from fomcert.linalg import LinearMap
from fomcert.oracles import ProblemInstance, SmoothOracle, ZeroFunction
from fomcert.reference import SquaredEuclidean


def quadratic_1d(start=1.0, curvature=1.0):
    """f(x) = curvature * x^2 / 2 in one dimension, Psi = 0, h = |.|^2/2."""
    L = float(curvature)
    f = SmoothOracle(
        value=lambda y: 0.5 * L * float(y @ y),
        subgradient=lambda y: L * y,
        conjugate=lambda u: 0.5 * float(u @ u) / L,
    )
    return ProblemInstance(
        A=LinearMap.identity(1), f=f, psi=ZeroFunction(),
        h=SquaredEuclidean(), feasible_start=np.array([float(start)]),
        constants={"L": L}, name="quadratic-1d", condition="smooth.1")


@pytest.fixture
def quad1d():
    return quadratic_1d()
