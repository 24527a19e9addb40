"""Named exception types.

Every failure mode a caller might want to handle gets its own class;
nothing in this package substitutes defaults for bad input or degrades
silently.
"""


class SpinsumError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(SpinsumError, ValueError):
    """An input violates a documented invariant; the message names it."""


class OracleSizeError(SpinsumError):
    """The feasible set is too large for exhaustive enumeration."""


class DegenerateBoundsError(SpinsumError):
    """Oracle max equals oracle min, so a normalized objective is undefined."""


class HardwareContractError(SpinsumError):
    """A program violates the integer-coupling hardware contract."""


class ConfigError(SpinsumError, ValueError):
    """A campaign or CLI configuration is malformed."""
