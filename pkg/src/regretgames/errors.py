"""Exception types shared across the package."""


class RegretGamesError(Exception):
    """Base class for every error raised by this package."""


class InputError(RegretGamesError):
    """Invalid input: malformed files, out-of-range indices, broken preconditions."""


class AssumptionError(InputError):
    """A modeling assumption the requested analysis relies on does not hold."""


class ContractError(InputError):
    """A strategy (or caller) violated a behavioral contract during evaluation."""


class SizeError(RegretGamesError):
    """An enumeration would exceed the configured size cap."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count
