"""Exception types raised across the package."""


class BorsukError(Exception):
    """Base class for every error raised by borsuk_lp."""


class DomainError(BorsukError, ValueError):
    """An argument lies outside the domain of the operation."""


class CapExceededError(BorsukError):
    """Enumeration would exceed the configured cap.

    The exact number of points that would have been produced is kept on
    ``count`` so callers can report it.
    """

    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(f"enumeration of {count} points exceeds cap {cap}")


class DegenerateFormError(BorsukError):
    """The distance quadratic is not strictly concave."""


class InconsistencyError(BorsukError):
    """Two independent evaluations of the same quantity disagree."""


class NoBracketError(BorsukError):
    """Bisection was asked to find a root that is not bracketed."""


class InfeasibleError(BorsukError):
    """Asymptotic parameters violate the Frankl-Wilson feasibility region."""


class NoCertificateError(BorsukError):
    """A parameter search found no admissible certificate."""
