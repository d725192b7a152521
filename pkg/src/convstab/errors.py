"""Exception types shared across the package."""


class ConvstabError(Exception):
    """Base class for all errors raised by convstab."""


class InputError(ConvstabError, ValueError):
    """Malformed or out-of-contract input."""


class IndexOverflowError(InputError):
    """Index arithmetic would leave the signed 64-bit range."""


class BudgetError(ConvstabError):
    """A search or enumeration exceeded its configured budget."""
