"""Exception types shared across the package.

Two families matter to callers: ``ValueError`` subclasses mean the input was
invalid (CLI exit code 1), ``NumericalError`` subclasses mean a computation
on valid input failed (CLI exit code 2).
"""


class ValidationError(ValueError):
    """Invalid parameters, states, configuration or input files."""


class DomainError(ValidationError):
    """A state lies outside the region where the model is defined."""


class NumericalError(RuntimeError):
    """A numerical procedure failed on otherwise valid input."""


class IntegrationError(NumericalError):
    """Integration stopped early.

    ``partial`` holds the accepted steps computed before the failure and
    ``t_fail`` the time at which the integrator gave up.
    """

    def __init__(self, message, t_fail, partial=None):
        super().__init__(f"{message} (t={t_fail!r})")
        self.t_fail = t_fail
        self.partial = partial


class StepUnderflowError(IntegrationError):
    pass


class StepBudgetError(IntegrationError):
    pass


class RhsDomainError(IntegrationError):
    """The vector field raised a DomainError that step reduction could not avoid."""


class FixedPointError(NumericalError):
    """The trajectory settled on an equilibrium; there is no cycle to find."""


class CycleBudgetError(NumericalError):
    """No converged cycle within the allowed number of section crossings."""


class AmbiguityError(NumericalError):
    """A scan found more structure than the analysis can interpret."""


class DegenerateGeometryError(ValidationError):
    """An orbit or polyline has zero extent where extent is required."""
