"""Exception types shared across the package."""


class BohmdynError(Exception):
    """Base class for all package errors."""


class DomainError(BohmdynError, ValueError):
    """A constructor or operation received arguments outside its domain."""


class SingularityError(BohmdynError, ValueError):
    """A configuration sits exactly on a potential singularity."""


class NodeError(BohmdynError, ArithmeticError):
    """The density at a configuration is below the node threshold.

    Raised instead of returning non-finite numbers whenever a quantity
    would divide by the density (or by |psi|).
    """

    def __init__(self, density: float, threshold: float):
        self.density = density
        self.threshold = threshold
        super().__init__(
            f"density {density:.3e} below node threshold {threshold:.3e}"
        )


class UsageError(BohmdynError, ValueError):
    """An operation was called on an object that does not support it."""
