"""Exception types shared by all modules."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ResourceLimitError(RuntimeError):
    """An exhaustive enumeration would exceed its configured cap."""


class DegenerateInputError(ValueError):
    """Input is structurally valid but leaves the statistic undefined."""
