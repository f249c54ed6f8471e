"""Exceptions raised by the heat-kernel library."""


class HeatKernelError(Exception):
    """Base class for every failure the library reports."""


class DomainError(HeatKernelError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularAtAxis(HeatKernelError):
    """The cylindric chart is singular at r = 0 for this operator."""


class NonCylindric(HeatKernelError):
    """The group element cannot be written in cylindric coordinates."""


class QuadratureNoConvergence(HeatKernelError):
    """Adaptive quadrature exhausted its budget above tolerance."""

    def __init__(self, message: str, value: float = float("nan"), err_estimate: float = float("inf")):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class ConvergenceFailure(HeatKernelError):
    """An iterative solver stopped with a residual above tolerance."""


class ExtrapolationUnstable(HeatKernelError):
    """Successive small-time extrapolations disagree."""


class ContinuationAmbiguous(HeatKernelError):
    """The analytic continuation of arccosh is not defined at this point."""


class DegenerateDensity(HeatKernelError):
    """The kernel grid does not resolve the density."""
