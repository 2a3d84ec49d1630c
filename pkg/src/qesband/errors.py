"""Exception types raised across the package."""


class QESError(Exception):
    """Base class for all package errors."""


class ValidationError(QESError):
    """A computed result failed a consistency check.

    The command-line front end maps every subclass to exit status 2.
    """


class InvalidModulus(QESError, ValueError):
    pass


class SingularPoint(QESError, ValueError):
    """Potential requested too close to one of its poles."""


class RestrictionViolated(QESError, ValueError):
    """Parameters violate the restriction column of an algebraization case."""


class ZeroDenominator(ValidationError):
    pass


class NonRealAssembly(ValidationError):
    """Imaginary parts of an assembled Hamiltonian failed to cancel."""


class RootCountMismatch(ValidationError):
    pass


class CriticalPoint(ValidationError):
    """No algebraic line passes through the requested (m, l)."""


class NumericalPole(ValidationError):
    pass


class DependentPair(ValidationError):
    """Real and imaginary parts of a complex eigenstate are proportional."""


class GridTooCoarse(QESError, ValueError):
    pass


class ConvergenceFailure(ValidationError):
    pass
