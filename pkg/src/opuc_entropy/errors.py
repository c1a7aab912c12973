"""Exception hierarchy.

Two families: parameter/precondition violations (``ValidationError``) and
numerical or feasibility failures discovered at run time
(``NumericalError``).  The CLI maps them to exit codes 1 and 2.
"""


class ValidationError(ValueError):
    """A parameter or precondition was violated."""


class InvalidParameterError(ValidationError):
    pass


class OutOfRangeError(ValidationError):
    pass


class NumericalError(RuntimeError):
    """A computation failed for numerical or feasibility reasons."""


class DegenerateMeasureError(NumericalError):
    """Moment matrix is singular: the measure is supported on too few points."""


class ResolutionError(NumericalError):
    """Grid too coarse for the requested quantity."""


class IntegrationError(NumericalError):
    """Non-finite integrand or failed quadrature."""


class CTooSmallError(NumericalError):
    """Breakpoint growth factor too small for the requested gap property."""


class KMaxTooLargeError(NumericalError):
    """Breakpoint sequence exceeds the desk-scale cap."""

    def __init__(self, message, largest_feasible_k=None):
        super().__init__(message)
        self.largest_feasible_k = largest_feasible_k


class InfeasibleParametersError(NumericalError):
    """No admissible transformation within the search budget."""

    def __init__(self, message, attained_kappa=None):
        super().__init__(message)
        self.attained_kappa = attained_kappa


class StageFailureError(NumericalError):
    """A construction stage could not satisfy its persistence requirement.

    ``partial`` holds the state of the completed stages, when any.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
