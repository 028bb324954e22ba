"""Exception hierarchy shared by all ppf modules."""


class PPFError(Exception):
    """Base class for errors raised by ppf."""


class ValidationError(PPFError, ValueError):
    """An input object violates one of its invariants."""


class DomainError(PPFError, ValueError):
    """A value falls outside the domain where a function is defined."""


class DegenerateInputError(PPFError, ValueError):
    """A closed-form expression has a vanishing denominator."""


class SolverError(PPFError, RuntimeError):
    """The optimizer could not produce a solution meeting its tolerance."""


class NoInteriorOptimumError(SolverError):
    """The objective derivative keeps one sign up to the boundary of the feasible range."""

    def __init__(self, message, boundary=None):
        super().__init__(message)
        self.boundary = boundary
