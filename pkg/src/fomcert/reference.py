"""Reference functions h and their Bregman distances."""

import numpy as np

from . import _kernels


class DomainError(ValueError):
    pass


MIN_POSITIVE = 1e-300


class ReferenceFunction:
    """Convex differentiable generator of a Bregman distance."""

    kind = None

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def bregman(self, s, z):
        """D_h(s, z) = h(s) - h(z) - <grad h(z), s - z>."""
        return self.value(s) - self.value(z) - float(self.gradient(z) @ (s - z))


class SquaredEuclidean(ReferenceFunction):
    kind = "sq_euclid"

    def value(self, x):
        return 0.5 * float(x @ x)

    def gradient(self, x):
        return x.copy()

    def bregman(self, s, z):
        return _kernels.sq_euclid_bregman(s, z)


class Entropy(ReferenceFunction):
    """h(x) = sum x_i log x_i with 0 log 0 = 0; gradient needs x > 0."""

    kind = "entropy"

    def value(self, x):
        if np.any(x < 0.0):
            raise DomainError("entropy needs nonnegative coordinates")
        mask = x > 0.0
        return float(np.sum(x[mask] * np.log(x[mask])))

    def gradient(self, x):
        if np.any(x <= 0.0):
            raise DomainError("entropy gradient needs strictly positive coordinates")
        return 1.0 + np.log(x)

    def bregman(self, s, z):
        if np.any(s < 0.0) or np.any(z <= 0.0):
            raise DomainError("entropy Bregman distance outside domain")
        return _kernels.entropy_bregman(s, z)


class Burg(ReferenceFunction):
    """h(x) = -sum log x_i on the positive orthant."""

    kind = "burg"

    def value(self, x):
        if np.any(x <= 0.0):
            raise DomainError("Burg entropy needs strictly positive coordinates")
        return -float(np.sum(np.log(x)))

    def gradient(self, x):
        if np.any(x <= 0.0):
            raise DomainError("Burg gradient needs strictly positive coordinates")
        return -1.0 / x

    def bregman(self, s, z):
        if np.any(s <= 0.0) or np.any(z <= 0.0):
            raise DomainError("Burg Bregman distance outside domain")
        return _kernels.burg_bregman(s, z)


class ZeroReference(ReferenceFunction):
    """h identically zero; D_h vanishes and the prox step becomes linmin."""

    kind = "zero"

    def value(self, x):
        return 0.0

    def gradient(self, x):
        return np.zeros_like(x)

    def bregman(self, s, z):
        return 0.0
