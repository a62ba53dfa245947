"""Exception types.  Everything numerical derives from NumericalError so the
CLI can map it to exit code 1."""


class NumericalError(ArithmeticError):
    pass


class DomainError(NumericalError, ValueError):
    """An argument lies outside the region where a formula is defined."""


class SingularMapError(NumericalError):
    """A fractional-linear map hit a vanishing denominator."""


class DegeneratePhaseError(NumericalError):
    """Laplace phase has a Hessian that is not positive definite."""


class ConvergenceError(NumericalError):
    """Quadrature did not reach the requested tolerance.

    Carries the last value and diagnostics as attributes.
    """

    def __init__(self, message, value=None, est_rel_err=None, nodes=None):
        super().__init__(message)
        self.value = value
        self.est_rel_err = est_rel_err
        self.nodes = nodes


class PreconditionError(NumericalError, ValueError):
    pass


class TruncationOverflowError(NumericalError):
    """Group enumeration produced more elements than the configured cap."""


class RepresentationError(NumericalError, ValueError):
    """A representation is not unitary or is inconsistent with the group relations."""
