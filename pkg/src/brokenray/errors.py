"""Exception types raised by the toolkit."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConfigurationError(ValueError):
    """Acquisition or discretization parameters of two objects disagree."""


class RankDeficiencyError(ArithmeticError):
    """A requested truncation rank exceeds the numerical rank of a matrix."""

    def __init__(self, message, usable_rank, n=None):
        super().__init__(message)
        self.usable_rank = usable_rank
        self.n = n
