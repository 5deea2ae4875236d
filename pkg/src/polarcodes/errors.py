"""Exception types shared across the package."""


class PolarError(Exception):
    """Base class for contract violations raised by this package."""


class InvalidParameterError(PolarError, ValueError):
    pass


class SizeLimitError(PolarError):
    """An un-binned channel transform would exceed the output-alphabet cap."""


class BudgetExceededError(PolarError):
    """Subchannel estimation would exceed its work budget.

    ``level`` is the last level that was completed.
    """

    def __init__(self, message, level):
        super().__init__(message)
        self.level = level
