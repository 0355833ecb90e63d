"""Semantic exception hierarchy shared across the package."""


class SchemeLabError(Exception):
    """Base class for all scheme-lab errors."""


class DomainError(SchemeLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ParameterError(SchemeLabError, ValueError):
    """A configuration or call parameter is malformed (counts, steps, files)."""


class InfeasibilityError(SchemeLabError):
    """A requested construction cannot satisfy its distributional constraints."""


class KernelError(SchemeLabError):
    """A cost kernel failed to evaluate or validate."""


class RegimeError(SchemeLabError):
    """The budget lies in the trivial full-performance regime (w >= 3/2)."""


class QuadratureError(SchemeLabError):
    """Numerical integration failed to reach the requested tolerance.

    Carries the tolerance actually achieved so callers can decide whether
    the result is still usable.
    """

    def __init__(self, message: str, achieved_tolerance: float):
        super().__init__(f"{message} (achieved tolerance {achieved_tolerance:.3e})")
        self.achieved_tolerance = achieved_tolerance
