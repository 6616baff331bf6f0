"""Exception and warning types.

Input/domain problems derive from :class:`DomainError`, numerical failures
from :class:`NumericalError`; the CLI maps them to exit codes 2 and 3.
"""


class MifdeError(Exception):
    pass


class DomainError(MifdeError, ValueError):
    pass


class NumericalError(MifdeError, ArithmeticError):
    pass


class DimensionMismatch(DomainError):
    pass


class DegenerateInput(DomainError):
    pass


class DegreeViolation(DomainError):
    pass


class NonUniformGrid(DomainError):
    pass


class MethodInapplicable(DomainError):
    pass


class DegenerateOrders(DomainError):
    """Raised for equal orders where a two-order construction is required.

    ``constant`` carries the Matignon value tan(alpha*pi/2) of theta/d.
    """

    def __init__(self, msg, constant=None):
        super().__init__(msg)
        self.constant = constant


class ZeroRoot(DomainError):
    pass


class NoConvergence(NumericalError):
    pass


class NonConvergence(NumericalError):
    """Root iteration did not settle; ``best`` holds the last RootSet."""

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best


class OverflowDomain(NumericalError):
    pass


class RepeatedRoots(NumericalError):
    pass


class SingularMatrix(NumericalError):
    def __init__(self, msg, condition=None):
        super().__init__(msg)
        self.condition = condition


class ConjugacyViolation(NumericalError):
    pass


class PrecisionLossWarning(RuntimeWarning):
    pass


class QuadratureUnderResolved(RuntimeWarning):
    pass


class InexactOrderWarning(UserWarning):
    pass
